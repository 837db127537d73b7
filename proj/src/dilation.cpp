#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hypokit/errors.hpp"
#include "hypokit/kinetic.hpp"
#include "hypokit/multipliers.hpp"
#include "tensor.hpp"

namespace hypokit {

void DilationParams::validate() const {
  if (!(lambda >= 1.0) || !std::isfinite(lambda))
    throw InvalidArgument("dilation lambda must be >= 1, got " + std::to_string(lambda));
  if (!(sigma > 0.0 && sigma < 1.0))
    throw InvalidArgument("dilation sigma must lie in (0, 1), got " + std::to_string(sigma));
}

double DilationParams::alpha() const { return std::pow(lambda, 2.0 * sigma / (2.0 * sigma + 1.0)); }
double DilationParams::beta() const { return std::pow(lambda, 1.0 / (2.0 * sigma + 1.0)); }

double DilationParams::scale(AxisLabel label) const {
  switch (label) {
    case AxisLabel::t: return alpha();
    case AxisLabel::x: return lambda;
    case AxisLabel::v: return beta();
    default: throw AxisMismatch("dilation acts on axes t, x, v only");
  }
}

namespace {

std::string format_mass(double m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", m);
  return buf;
}

// amplitude * u(s_a z_a) on the nodes of u.
SampledField rescale(const SampledField& u, const std::vector<double>& s, double amplitude, double mass_tol) {
  // Content of u beyond |z_a| >= s_a L/2 is never sampled when s_a < 1.
  double lost = 0.0, total = 0.0;
  for_each_node(u.axes(), [&](std::size_t i, std::span<const double> z) {
    const double m = std::norm(u[i]);
    total += m;
    for (std::size_t a = 0; a < z.size(); ++a)
      if (s[a] < 1.0 && std::abs(z[a]) >= 0.5 * s[a] * u.axis(a).length) {
        lost += m;
        break;
      }
  });
  if (total > 0.0 && lost > mass_tol * total)
    throw SupportOverflow("dilation pushes relative mass " + format_mass(lost / total) + " outside the box");

  std::vector<cplx> data(u.values().begin(), u.values().end());
  const auto shape = u.shape();
  for (std::size_t a = 0; a < u.rank(); ++a) {
    if (s[a] == 1.0) continue;
    std::vector<double> targets = detail::nodes(u.axis(a));
    for (auto& p : targets) p *= s[a];
    data = detail::contract_axis(data, shape, a, detail::interpolation_matrix(u.axis(a), targets));
  }
  for (auto& v : data) v *= amplitude;
  return SampledField(u.axes(), std::move(data));
}

std::vector<double> scales_for(const SampledField& u, const DilationParams& p, bool inverse) {
  std::vector<double> s;
  for (const auto& a : u.axes()) s.push_back(inverse ? 1.0 / p.scale(a.label) : p.scale(a.label));
  return s;
}

// Relative distance of two spectra in the continuous-transform norm.
double spectral_residual(const std::vector<cplx>& actual, const std::vector<cplx>& expected) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    num += std::norm(actual[i] - expected[i]);
    den += std::norm(expected[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

SampledField apply_dilation(const SampledField& u, const DilationParams& p, double mass_tol) {
  p.validate();
  return rescale(u, scales_for(u, p, false), p.lambda, mass_tol);
}

SampledField apply_inverse_dilation(const SampledField& u, const DilationParams& p, double mass_tol) {
  p.validate();
  return rescale(u, scales_for(u, p, true), 1.0 / p.lambda, mass_tol);
}

EstimateReport verify_dilation_conjugation(const SampledField& u, const DilationParams& p) {
  p.validate();
  const std::size_t it = u.axis_index(AxisLabel::t);
  const std::size_t ix = u.axis_index(AxisLabel::x);
  const std::size_t iv = u.axis_index(AxisLabel::v);
  const double sigma = p.sigma;
  const double delta = gain_exponent(sigma);
  const double alpha = p.alpha();  // equals lambda^delta
  const auto s = scales_for(u, p, false);

  const SampledField Tu = apply_dilation(u, p);

  // Transport terms on the grid.
  const std::size_t taxes[] = {it};
  const std::size_t xaxes[] = {ix};
  auto iDt = [&](const SampledField& f) {
    return apply_fourier_multiplier(f, taxes, [](std::span<const double> z) { return cplx(0.0, z[0]); });
  };
  auto ivDx = [&](const SampledField& f) {
    SampledField g = apply_fourier_multiplier(f, xaxes, [](std::span<const double> z) { return cplx(z[0]); });
    auto gv = g.values();
    for_each_node(f.axes(), [&](std::size_t i, std::span<const double> z) { gv[i] *= cplx(0.0, z[iv]); });
    return g;
  };
  const SampledField At = iDt(Tu);
  const SampledField Bt = cplx(alpha) * apply_dilation(iDt(u), p);
  const SampledField Ax = ivDx(Tu);
  const SampledField Bx = cplx(alpha) * apply_dilation(ivDx(u), p);
  const double res_t = norm_l2(At - Bt) / norm_l2(Bt);
  const double res_x = norm_l2(Ax - Bx) / norm_l2(Bx);
  const double local_diff = norm_l2((At + Ax) - (Bt + Bx));

  // Frequency side: fft(T u)(zeta) against lambda^{-1} u^(zeta / s).
  const Spectrum spec_T = fft(Tu);
  std::vector<cplx> expected(u.values().begin(), u.values().end());
  const auto shape = u.shape();
  for (std::size_t a = 0; a < u.rank(); ++a) {
    auto f = detail::frequencies(u.axis(a));
    for (auto& z : f) z /= s[a];
    expected = detail::contract_axis(expected, shape, a, detail::ndft_matrix(u.axis(a), f));
  }
  for (auto& e : expected) e /= p.lambda;

  const std::size_t n = expected.size();
  std::vector<cplx> act_v(n), exp_v(n);
  std::vector<cplx> act_w[3], exp_w[3];
  for (auto& w : act_w) w.resize(n);
  for (auto& w : exp_w) w.resize(n);
  const std::size_t term_axis[3] = {it, ix, iv};
  // Per-term coefficients as displayed: lambda^{2 s d/(2s+1)}, lambda^d, lambda^{d/(2s+1)}.
  const double coeff[3] = {std::pow(p.lambda, 2.0 * sigma * delta / (2.0 * sigma + 1.0)), std::pow(p.lambda, delta),
                           std::pow(p.lambda, delta / (2.0 * sigma + 1.0))};
  double coeff_err = 0.0;
  for (int j = 0; j < 3; ++j)
    coeff_err = std::max(coeff_err, std::abs(coeff[j] - std::pow(s[term_axis[j]], delta)) / coeff[j]);

  for_each_frequency(u.axes(), [&](std::size_t i, std::span<const double> z) {
    act_v[i] = std::pow(std::abs(z[iv]), 2.0 * sigma) * spec_T.values[i];
    exp_v[i] = alpha * std::pow(std::abs(z[iv] / s[iv]), 2.0 * sigma) * expected[i];
    for (int j = 0; j < 3; ++j) {
      const std::size_t a = term_axis[j];
      act_w[j][i] = std::pow(std::abs(z[a]), delta) * spec_T.values[i];
      exp_w[j][i] = coeff[j] * std::pow(std::abs(z[a] / s[a]), delta) * expected[i];
    }
  });
  const double res_v = spectral_residual(act_v, exp_v);
  double nonlocal_diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) nonlocal_diff += std::norm(act_v[i] - exp_v[i]);
  nonlocal_diff = std::sqrt(nonlocal_diff * spec_T.grid.cell_volume());

  double res_w[3];
  std::vector<cplx> act_sum(n), exp_sum(n);
  for (int j = 0; j < 3; ++j) res_w[j] = spectral_residual(act_w[j], exp_w[j]);
  for (std::size_t i = 0; i < n; ++i) {
    act_sum[i] = act_w[0][i] + act_w[1][i] + act_w[2][i];
    exp_sum[i] = exp_w[0][i] + exp_w[1][i] + exp_w[2][i];
  }
  const double res_wsum = spectral_residual(act_sum, exp_sum);

  const double p0_norm = norm_l2(apply_P0(u, sigma));
  const double res_p0 = (local_diff + nonlocal_diff) / p0_norm;

  EstimateReport r;
  r.context = {{"lambda", p.lambda}, {"sigma", sigma}, {"delta", delta}};
  r.metrics = {{"residual_iDt", res_t},
               {"residual_ivDx", res_x},
               {"residual_Dv", res_v},
               {"residual_P0", res_p0},
               {"residual_weight_t", res_w[0]},
               {"residual_weight_x", res_w[1]},
               {"residual_weight_v", res_w[2]},
               {"residual_weight_sum", res_wsum},
               {"coefficient_error", coeff_err},
               {"norm_defect", std::abs(norm_l2(Tu) - norm_l2(u)) / norm_l2(u)}};
  double worst = 0.0;
  for (const auto& [name, value] : r.metrics) worst = std::max(worst, value);
  r.lhs = local_diff + nonlocal_diff;
  r.rhs = p0_norm;
  r.ratio = worst;
  return r;
}

}  // namespace hypokit
