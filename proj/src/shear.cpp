#include <cmath>
#include <cstdio>

#include "hypokit/errors.hpp"
#include "hypokit/kinetic.hpp"
#include "hypokit/multipliers.hpp"
#include "hypokit/parallel.hpp"
#include "hypokit/quantization.hpp"
#include "tensor.hpp"

namespace hypokit {

namespace {

std::string format_mass(double m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", m);
  return buf;
}

void require_square(const Axis& a, const Axis& b) {
  if (a.points != b.points || a.length != b.length)
    throw AxisMismatch("shear needs two space axes with equal points and length");
}

// data[a][b] <- data(a - shift_b, b): translate every column along the first
// index by a spectral phase factor. Returns the relative mass that wrapped.
double shift_columns(std::vector<cplx>& data, const Axis& axis, const std::vector<double>& shift) {
  const int n = axis.points;
  const double half = 0.5 * axis.length;
  double lost = 0.0, total = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double m = std::norm(data[a * n + b]);
      total += m;
      const double dest = axis.coordinate(a) + shift[b];
      if (dest < -half || dest >= half) lost += m;
    }
  const int shape[] = {n, n};
  const std::size_t along[] = {0};
  detail::dft_axes(data, shape, along, -1);
  for (int k = 0; k < n; ++k) {
    const double f = axis.frequency(k);
    for (int b = 0; b < n; ++b) data[k * n + b] *= std::polar(1.0 / n, -2.0 * kPi * f * shift[b]);
  }
  detail::dft_axes(data, shape, along, +1);
  return total > 0.0 ? lost / total : 0.0;
}

std::vector<cplx> transpose(const std::vector<cplx>& data, int n) {
  std::vector<cplx> out(data.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out[b * n + a] = data[a * n + b];
  return out;
}

void check_wrap(double lost, double mass_tol) {
  if (lost > mass_tol)
    throw SupportOverflow("shear wraps relative mass " + format_mass(lost) + " around the box");
}

// (M_t u)(x1, x2) = u(x2 - t x1, x1) on raw n x n data; *lost receives the
// relative wrapped mass.
std::vector<cplx> shear_forward(const std::vector<cplx>& u, const Axis& axis, double t, double* lost) {
  std::vector<cplx> g = u;
  std::vector<double> shift(axis.points);
  for (int b = 0; b < axis.points; ++b) shift[b] = t * axis.coordinate(b);
  *lost = shift_columns(g, axis, shift);
  return transpose(g, axis.points);
}

// (M_t^{-1} w)(x, y) = w(y, x + t y).
std::vector<cplx> shear_backward(const std::vector<cplx>& w, const Axis& axis, double t, double* lost) {
  std::vector<cplx> r = transpose(w, axis.points);
  std::vector<double> shift(axis.points);
  for (int b = 0; b < axis.points; ++b) shift[b] = -t * axis.coordinate(b);
  *lost = shift_columns(r, axis, shift);
  return r;
}

Axis relabel(Axis a, AxisLabel label) {
  a.label = label;
  return a;
}

SampledField joint(const SampledField& u, AxisLabel in0, AxisLabel in1, AxisLabel out0, AxisLabel out1, bool forward,
                   double mass_tol) {
  if (u.rank() != 3 || u.axis(0).label != AxisLabel::t || u.axis(1).label != in0 || u.axis(2).label != in1)
    throw AxisMismatch(std::string("joint shear expects axes (t, ") + std::string(to_string(in0)) + ", " +
                       std::string(to_string(in1)) + ")");
  require_square(u.axis(1), u.axis(2));
  const Axis& space = u.axis(1);
  SampledField out({u.axis(0), relabel(u.axis(1), out0), relabel(u.axis(2), out1)});
  const int nt = u.axis(0).points;
  std::vector<double> lost(nt, 0.0), mass(nt, 0.0);
  parallel_for(nt, [&](std::size_t i) {
    const double t = u.axis(0).coordinate(static_cast<int>(i));
    const SampledField slice = detail::leading_slice(u, static_cast<int>(i));
    std::vector<cplx> data(slice.values().begin(), slice.values().end());
    for (const auto& v : data) mass[i] += std::norm(v);
    double rel = 0.0;
    data = forward ? shear_forward(data, space, t, &rel) : shear_backward(data, space, t, &rel);
    lost[i] = rel * mass[i];
    auto o = out.values();
    for (std::size_t k = 0; k < data.size(); ++k) o[i * data.size() + k] = data[k];
  });
  double total = 0.0, wrapped = 0.0;
  for (int i = 0; i < nt; ++i) {
    total += mass[i];
    wrapped += lost[i];
  }
  check_wrap(total > 0.0 ? wrapped / total : 0.0, mass_tol);
  return out;
}

}  // namespace

SampledField apply_shear(const SampledField& u, double t, double mass_tol) {
  if (u.rank() != 2 || u.axis(0).label != AxisLabel::x || u.axis(1).label != AxisLabel::v)
    throw AxisMismatch("slice shear expects axes (x, v)");
  require_square(u.axis(0), u.axis(1));
  std::vector<cplx> data(u.values().begin(), u.values().end());
  double lost = 0.0;
  data = shear_forward(data, u.axis(0), t, &lost);
  check_wrap(lost, mass_tol);
  return SampledField({relabel(u.axis(0), AxisLabel::x1), relabel(u.axis(1), AxisLabel::x2)}, std::move(data));
}

SampledField apply_inverse_shear(const SampledField& u, double t, double mass_tol) {
  if (u.rank() != 2 || u.axis(0).label != AxisLabel::x1 || u.axis(1).label != AxisLabel::x2)
    throw AxisMismatch("inverse slice shear expects axes (x1, x2)");
  require_square(u.axis(0), u.axis(1));
  std::vector<cplx> data(u.values().begin(), u.values().end());
  double lost = 0.0;
  data = shear_backward(data, u.axis(0), t, &lost);
  check_wrap(lost, mass_tol);
  return SampledField({relabel(u.axis(0), AxisLabel::x), relabel(u.axis(1), AxisLabel::v)}, std::move(data));
}

SampledField apply_joint_shear(const SampledField& u, double mass_tol) {
  return joint(u, AxisLabel::x, AxisLabel::v, AxisLabel::x1, AxisLabel::x2, true, mass_tol);
}

SampledField apply_inverse_joint_shear(const SampledField& u, double mass_tol) {
  return joint(u, AxisLabel::x1, AxisLabel::x2, AxisLabel::x, AxisLabel::v, false, mass_tol);
}

namespace {

SampledField i_dt(const SampledField& u) {
  const std::size_t taxes[] = {0};
  return apply_fourier_multiplier(u, taxes, [](std::span<const double> z) { return cplx(0.0, z[0]); });
}

// out[t] += [symbol_t]^w u[t] for every t slice.
void add_weyl_per_slice(SampledField& out, const SampledField& u,
                        const std::function<PhaseSymbol(double)>& symbol_at) {
  const int nt = u.axis(0).points;
  std::vector<Axis> space(u.axes().begin() + 1, u.axes().end());
  parallel_for(nt, [&](std::size_t i) {
    const double t = u.axis(0).coordinate(static_cast<int>(i));
    const WeylOperator op(symbol_at(t), space);
    const SampledField w = op.apply(detail::leading_slice(u, static_cast<int>(i)));
    const std::size_t block = w.size();
    auto o = out.values();
    for (std::size_t k = 0; k < block; ++k) o[i * block + k] += w[k];
  });
}

}  // namespace

SampledField apply_normal_form(const SampledField& u, const CoefficientField& a, double sigma) {
  if (u.rank() != 3 || u.axis(0).label != AxisLabel::t || u.axis(1).label != AxisLabel::x1 ||
      u.axis(2).label != AxisLabel::x2)
    throw AxisMismatch("normal form expects axes (t, x1, x2)");
  SampledField out = i_dt(u);
  add_weyl_per_slice(out, u, [&](double t) {
    return PhaseSymbol{[&a, sigma, t](std::span<const double> X) {
                         // X = (x1, x2, xi1, xi2)
                         return a(t, X[3], X[2] + t * X[3]) * F_radial(std::abs(X[1] - t * X[0]), sigma);
                       },
                       a.sup_bound, 0};
  });
  return out;
}

SampledField apply_fourier_side(const SampledField& w, const CoefficientField& a, double sigma) {
  if (w.rank() != 3 || w.axis(0).label != AxisLabel::t || w.axis(1).label != AxisLabel::x ||
      w.axis(2).label != AxisLabel::v)
    throw AxisMismatch("fourier-side operator expects axes (t, x, v)");
  SampledField out = i_dt(w);
  const std::size_t xaxes[] = {1};
  const SampledField dx = apply_fourier_multiplier(w, xaxes, [](std::span<const double> z) { return cplx(z[0]); });
  auto o = out.values();
  for_each_node(w.axes(), [&](std::size_t i, std::span<const double> z) { o[i] -= cplx(0.0, z[2]) * dx[i]; });
  add_weyl_per_slice(out, w, [&](double t) {
    return PhaseSymbol{[&a, sigma, t](std::span<const double> X) {
                         // X = (x, y, xi, eta)
                         return F_radial(std::abs(X[0]), sigma) * a(t, X[2], X[3]);
                       },
                       a.sup_bound, 0};
  });
  return out;
}

}  // namespace hypokit
