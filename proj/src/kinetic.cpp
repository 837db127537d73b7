#include "hypokit/kinetic.hpp"

#include <cmath>

#include "hypokit/errors.hpp"
#include "hypokit/multipliers.hpp"

namespace hypokit {

void CoefficientField::check_on(const std::vector<Axis>& axes) const {
  if (!rule) throw InvalidArgument("coefficient '" + name + "' has no rule");
  if (!(lower_bound > 0.0)) throw InvalidArgument("coefficient lower bound a0 must be positive");
  std::size_t it = axes.size(), ix = axes.size(), iv = axes.size();
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a].label == AxisLabel::t) it = a;
    if (axes[a].label == AxisLabel::x) ix = a;
    if (axes[a].label == AxisLabel::v) iv = a;
  }
  if (it == axes.size() || ix == axes.size() || iv == axes.size())
    throw AxisMismatch("coefficient check needs axes t, x, v");
  for (int i = 0; i < axes[it].points; ++i)
    for (int j = 0; j < axes[ix].points; ++j)
      for (int k = 0; k < axes[iv].points; ++k) {
        const double value = rule(axes[it].coordinate(i), axes[ix].coordinate(j), axes[iv].coordinate(k));
        if (!(value >= lower_bound) || std::abs(value) > sup_bound)
          throw InvalidArgument("coefficient '" + name + "' leaves [a0, sup] = [" + std::to_string(lower_bound) +
                                ", " + std::to_string(sup_bound) + "] with value " + std::to_string(value));
      }
}

CoefficientField CoefficientField::constant(double value) {
  return {"one", [value](double, double, double) { return value; }, value, value};
}

CoefficientField CoefficientField::sin_squared(double amp) {
  return {"sin2",
          [amp](double, double x, double) {
            const double s = std::sin(x);
            return 1.0 + amp * s * s;
          },
          1.0, 1.0 + std::abs(amp)};
}

CoefficientField CoefficientField::cos_gauss(double amp) {
  return {"cosgauss", [amp](double t, double, double v) { return 1.0 + amp * std::cos(t) * std::exp(-v * v); },
          1.0 - std::abs(amp), 1.0 + std::abs(amp)};
}

CoefficientField CoefficientField::by_name(const std::string& name) {
  if (name == "one") return constant();
  if (name == "sin2") return sin_squared();
  if (name == "cosgauss") return cos_gauss();
  throw InvalidArgument("unknown coefficient family '" + name + "' (expected one, sin2, cosgauss)");
}

SampledField apply_P(const SampledField& u, const CoefficientField& a, double sigma) {
  const std::size_t it = u.axis_index(AxisLabel::t);
  const std::size_t ix = u.axis_index(AxisLabel::x);
  const std::size_t iv = u.axis_index(AxisLabel::v);
  a.check_on(u.axes());
  auto spec = MultiplierSpec::F(sigma);
  spec.allow_sigma_one = true;

  SampledField out = derivative(u, it);
  const SampledField dx = derivative(u, ix);
  const std::size_t vaxes[] = {iv};
  const SampledField fv = apply_multiplier(u, spec, vaxes);
  auto o = out.values();
  for_each_node(u.axes(), [&](std::size_t i, std::span<const double> z) {
    o[i] += z[iv] * dx[i] + a(z[it], z[ix], z[iv]) * fv[i];
  });
  return out;
}

SampledField apply_P0(const SampledField& u, double sigma) {
  const std::size_t it = u.axis_index(AxisLabel::t);
  const std::size_t ix = u.axis_index(AxisLabel::x);
  const std::size_t iv = u.axis_index(AxisLabel::v);
  const std::size_t taxes[] = {it};
  const std::size_t xaxes[] = {ix};
  const std::size_t vaxes[] = {iv};
  // iD_t has symbol i tau; D_x has symbol xi.
  SampledField out = apply_fourier_multiplier(u, taxes, [](std::span<const double> z) { return cplx(0.0, z[0]); });
  const SampledField dx = apply_fourier_multiplier(u, xaxes, [](std::span<const double> z) { return cplx(z[0]); });
  const SampledField fv = apply_multiplier(u, MultiplierSpec::abs_power(2.0 * sigma), vaxes);
  auto o = out.values();
  for_each_node(u.axes(), [&](std::size_t i, std::span<const double> z) {
    o[i] += cplx(0.0, z[iv]) * dx[i] + fv[i];
  });
  return out;
}

}  // namespace hypokit
