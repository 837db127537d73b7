#include "hypokit/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypokit/errors.hpp"
#include "hypokit/multipliers.hpp"
#include "hypokit/parallel.hpp"
#include "hypokit/quantization.hpp"
#include "tensor.hpp"

namespace hypokit {

namespace {

double bracket(double z) { return std::sqrt(1.0 + z * z); }

void check_sigma(double sigma, bool allow_one) {
  if (!(sigma > 0.0) || sigma > 1.0 || (sigma == 1.0 && !allow_one))
    throw InvalidArgument("sigma must lie in (0, 1), got " + std::to_string(sigma));
}

// sqrt(cell * sum |w_i v_i|^2) over a spectrum.
double weighted_norm(const Spectrum& s, const std::vector<double>& w) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * w[i] * std::norm(s.values[i]);
  return std::sqrt(sum * s.grid.cell_volume());
}

SampledField iDt(const SampledField& u) {
  const std::size_t taxes[] = {u.axis_index(AxisLabel::t)};
  return apply_fourier_multiplier(u, taxes, [](std::span<const double> z) { return cplx(0.0, z[0]); });
}

}  // namespace

SampledField apply_lemma_operator(const SampledField& u, const LemmaPoint& p, const CoefficientField& a,
                                  double sigma) {
  if (u.rank() != 1 || u.axis(0).label != AxisLabel::t) throw AxisMismatch("lemma operator acts on a 1D t field");
  SampledField out = iDt(u);
  auto o = out.values();
  for_each_node(u.axes(), [&](std::size_t i, std::span<const double> z) {
    const double t = z[0];
    o[i] += a(t, p.xi2, p.xi1 + t * p.xi2) * F_radial(std::abs(p.x2 - t * p.x1), sigma) * u[i];
  });
  return out;
}

EstimateReport check_lemma_1d(const std::vector<LemmaPoint>& points, const std::vector<SampledField>& profiles,
                              const CoefficientField& a, double sigma) {
  check_sigma(sigma, false);
  if (points.empty() || profiles.empty()) throw InvalidArgument("lemma check needs points and profiles");
  const double delta = gain_exponent(sigma);
  struct Result {
    double ratio = 0.0, lhs = 0.0, rhs = 0.0, coercivity = std::numeric_limits<double>::infinity();
    int profile = -1;
  };
  std::vector<Result> results(points.size());
  parallel_for(points.size(), [&](std::size_t k) {
    const LemmaPoint& p = points[k];
    Result& r = results[k];
    for (std::size_t j = 0; j < profiles.size(); ++j) {
      const SampledField& u = profiles[j];
      const SampledField Pu = apply_lemma_operator(u, p, a, sigma);
      const SampledField wu = multiply_by(u, [&](std::span<const double> z) {
        return 1.0 + std::pow(bracket(p.x1), delta) + std::pow(bracket(p.x2 - z[0] * p.x1), 2.0 * sigma);
      });
      const double lhs = norm_l2(wu);
      const double rhs = norm_l2(Pu) + norm_l2(u);
      const double ratio = safe_ratio(lhs, rhs);
      if (ratio > r.ratio) r = {ratio, lhs, rhs, r.coercivity, static_cast<int>(j)};
      // Re(P~u, u) against a0 ||F^{1/2} u||^2.
      double fmass = 0.0;
      for_each_node(u.axes(), [&](std::size_t i, std::span<const double> z) {
        fmass += F_radial(std::abs(p.x2 - z[0] * p.x1), sigma) * std::norm(u[i]);
      });
      fmass *= u.cell_volume();
      if (fmass > 1e-300) r.coercivity = std::min(r.coercivity, inner(Pu, u).real() / (a.lower_bound * fmass));
    }
  });

  EstimateReport rep;
  double small = 0.0, coercivity = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& r = results[k];
    if (r.ratio > results[worst].ratio) worst = k;
    if (std::abs(points[k].x1) <= 1.0) small = std::max(small, r.ratio);
    coercivity = std::min(coercivity, r.coercivity);
    rep.rows.push_back({"point",
                        {{"index", static_cast<double>(k)},
                         {"x1", points[k].x1},
                         {"x2", points[k].x2},
                         {"xi1", points[k].xi1},
                         {"xi2", points[k].xi2},
                         {"profile", static_cast<double>(r.profile)},
                         {"lhs", r.lhs},
                         {"rhs", r.rhs},
                         {"ratio", r.ratio}}});
  }
  rep.lhs = results[worst].lhs;
  rep.rhs = results[worst].rhs;
  rep.ratio = results[worst].ratio;
  rep.fitted_constant = rep.ratio;
  rep.context = {{"sigma", sigma},
                 {"delta", delta},
                 {"points", static_cast<double>(points.size())},
                 {"profiles", static_cast<double>(profiles.size())},
                 {"t_points", static_cast<double>(profiles[0].axis(0).points)},
                 {"t_length", profiles[0].axis(0).length},
                 {"worst_x1", points[worst].x1},
                 {"worst_x2", points[worst].x2}};
  rep.metrics = {{"max_ratio", rep.ratio},
                 {"small_max_ratio", small},
                 {"growth_factor", small > 0.0 ? rep.ratio / small : std::numeric_limits<double>::infinity()},
                 {"coercivity_min", coercivity}};
  return rep;
}

EstimateReport check_key_estimate(const std::vector<SampledField>& fields, const CoefficientField& a, double sigma,
                                  const std::string& label) {
  check_sigma(sigma, true);
  if (fields.empty()) throw InvalidArgument("key estimate needs at least one field");
  const double delta = gain_exponent(sigma);
  struct Result {
    double lhs, rhs, npu, nu;
  };
  std::vector<Result> results(fields.size());
  a.check_on(fields[0].axes());
  parallel_for(fields.size(), [&](std::size_t k) {
    const SampledField& u = fields[k];
    const std::size_t axes[] = {u.axis_index(AxisLabel::x), u.axis_index(AxisLabel::v)};
    const SampledField wu = apply_fourier_multiplier(u, axes, [&](std::span<const double> z) {
      return cplx(1.0 + std::pow(std::abs(z[0]), delta) + std::pow(std::abs(z[1]), 2.0 * sigma));
    });
    const double npu = norm_l2(apply_P(u, a, sigma));
    const double nu = norm_l2(u);
    results[k] = {norm_l2(wu), npu + nu, npu, nu};
  });
  EstimateReport rep;
  std::size_t worst = 0;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const auto& r = results[k];
    const double ratio = safe_ratio(r.lhs, r.rhs);
    if (ratio > safe_ratio(results[worst].lhs, results[worst].rhs)) worst = k;
    rep.rows.push_back({label,
                        {{"field", static_cast<double>(k)},
                         {"lhs", r.lhs},
                         {"rhs", r.rhs},
                         {"ratio", ratio},
                         {"norm_Pu", r.npu},
                         {"norm_u", r.nu}}});
  }
  rep.lhs = results[worst].lhs;
  rep.rhs = results[worst].rhs;
  rep.ratio = safe_ratio(rep.lhs, rep.rhs);
  rep.fitted_constant = rep.ratio;
  rep.context = {{"sigma", sigma}, {"delta", delta}, {"fields", static_cast<double>(fields.size())}};
  for (std::size_t a_ = 0; a_ < fields[0].rank(); ++a_) {
    const auto name = std::string(to_string(fields[0].axis(a_).label));
    rep.context[name + "_points"] = fields[0].axis(a_).points;
    rep.context[name + "_length"] = fields[0].axis(a_).length;
  }
  rep.metrics = {{"max_ratio", rep.ratio}};
  return rep;
}

EstimateReport check_full_theorem(const std::vector<SampledField>& fields, const CoefficientField& a, double sigma,
                                  double s, const std::string& label) {
  check_sigma(sigma, true);
  if (fields.empty()) throw InvalidArgument("full theorem check needs at least one field");
  if (s < 0.0 || s > 1.0) throw InvalidArgument("Sobolev index must lie in [0, 1]");
  const double delta = gain_exponent(sigma);
  auto Fspec = MultiplierSpec::F(sigma);
  Fspec.allow_sigma_one = true;
  struct Result {
    double lhs, rhs, lhs_shared, npu, nu, ndt, ndx, nfv, recovery;
  };
  std::vector<Result> results(fields.size());
  a.check_on(fields[0].axes());
  parallel_for(fields.size(), [&](std::size_t k) {
    const SampledField& u = fields[k];
    const std::size_t it = u.axis_index(AxisLabel::t), ix = u.axis_index(AxisLabel::x),
                      iv = u.axis_index(AxisLabel::v);
    const Spectrum spec = fft(u);
    const std::size_t n = u.size();
    std::vector<double> w_full(n), w_shared(n), w_dt(n), w_dx(n), w_fv(n);
    for_each_frequency(u.axes(), [&](std::size_t i, std::span<const double> z) {
      double r2 = 0.0;
      for (double x : z) r2 += x * x;
      const double br = std::pow(1.0 + r2, 0.5 * s);
      const double dt = std::pow(std::abs(z[it]), delta);
      const double dx = std::pow(std::abs(z[ix]), delta);
      const double dv = std::pow(std::abs(z[iv]), 2.0 * sigma);
      w_full[i] = br * (1.0 + dt + dx + dv);
      w_shared[i] = br * (1.0 + dx + dv);
      w_dt[i] = dt;
      w_dx[i] = dx;
      const double zv[] = {z[iv]};
      w_fv[i] = Fspec(zv);
    });
    const SampledField Pu = apply_P(u, a, sigma);
    const double npu_s = sobolev_norm(Pu, s);
    const double nu_s = sobolev_norm(u, s);
    const double npu = norm_l2(Pu), nu = norm_l2(u);
    const double ndt = weighted_norm(spec, w_dt), ndx = weighted_norm(spec, w_dx), nfv = weighted_norm(spec, w_fv);
    results[k] = {weighted_norm(spec, w_full),
                  npu_s + nu_s,
                  weighted_norm(spec, w_shared),
                  npu,
                  nu,
                  ndt,
                  ndx,
                  nfv,
                  safe_ratio(ndt, npu + ndx + nfv + nu)};
  });
  EstimateReport rep;
  std::size_t worst = 0;
  double recovery = 0.0;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const auto& r = results[k];
    const double ratio = safe_ratio(r.lhs, r.rhs);
    if (ratio > safe_ratio(results[worst].lhs, results[worst].rhs)) worst = k;
    recovery = std::max(recovery, r.recovery);
    rep.rows.push_back({label,
                        {{"field", static_cast<double>(k)},
                         {"lhs", r.lhs},
                         {"rhs", r.rhs},
                         {"ratio", ratio},
                         {"lhs_shared", r.lhs_shared},
                         {"norm_Pu", r.npu},
                         {"norm_u", r.nu},
                         {"norm_Dt_delta", r.ndt},
                         {"norm_Dx_delta", r.ndx},
                         {"norm_F_Dv", r.nfv},
                         {"recovery_ratio", r.recovery}}});
  }
  rep.lhs = results[worst].lhs;
  rep.rhs = results[worst].rhs;
  rep.ratio = safe_ratio(rep.lhs, rep.rhs);
  rep.fitted_constant = rep.ratio;
  rep.context = {{"sigma", sigma}, {"delta", delta}, {"s", s}, {"fields", static_cast<double>(fields.size())}};
  rep.metrics = {{"max_ratio", rep.ratio}, {"recovery_constant", recovery}};
  return rep;
}

SampledField scaling_profile(int points, double length) {
  const std::vector<Axis> axes = {make_axis(AxisLabel::t, points, length), make_axis(AxisLabel::x, points, length),
                                  make_axis(AxisLabel::v, points, length)};
  return make_field(axes, [](std::span<const double> z) {
    const double e = z[0] * z[0] / 0.09 + z[1] * z[1] / 0.09 + z[2] * z[2] / (0.35 * 0.35);
    return std::exp(-kPi * e) * std::polar(1.0, 2.0 * kPi * (2.5 * z[0] + 10.0 * z[1]));
  });
}

EstimateReport scaling_sweep(const SampledField& u0, double sigma, double delta_trial,
                             const std::vector<double>& lambdas) {
  check_sigma(sigma, false);
  if (lambdas.size() < 2) throw InvalidArgument("scaling sweep needs at least two lambdas");
  for (double l : lambdas)
    if (!(l >= 1.0)) throw InvalidArgument("scaling sweep lambdas must be >= 1");
  if (!(delta_trial > 0.0)) throw InvalidArgument("delta_trial must be positive");
  const std::size_t it = u0.axis_index(AxisLabel::t), ix = u0.axis_index(AxisLabel::x),
                    iv = u0.axis_index(AxisLabel::v);
  const double delta = gain_exponent(sigma);
  const double dp = delta_trial;
  const Spectrum spec = fft(u0);
  const double np0 = norm_l2(apply_P0(u0, sigma));
  const double nu = norm_l2(u0);
  std::vector<double> mt(u0.size()), mx(u0.size()), mv(u0.size());
  for_each_frequency(u0.axes(), [&](std::size_t i, std::span<const double> z) {
    mt[i] = std::pow(std::abs(z[it]), dp);
    mx[i] = std::pow(std::abs(z[ix]), dp);
    mv[i] = std::pow(std::abs(z[iv]), dp);
  });
  EstimateReport rep;
  std::vector<double> ratios;
  for (double lam : lambdas) {
    const double ct = std::pow(lam, 2.0 * sigma * dp / (2.0 * sigma + 1.0));
    const double cx = std::pow(lam, dp);
    const double cv = std::pow(lam, dp / (2.0 * sigma + 1.0));
    std::vector<double> w(u0.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = ct * mt[i] + cx * mx[i] + cv * mv[i];
    const double L = weighted_norm(spec, w);
    const double R = std::pow(lam, delta) * np0 + nu;
    ratios.push_back(L / R);
    rep.rows.push_back({"lambda", {{"lambda", lam}, {"L", L}, {"R", R}, {"ratio", L / R}}});
  }
  rep.fitted_exponent = fit_loglog_slope(lambdas, ratios);
  rep.lhs = rep.rows.back().values[1].second;
  rep.rhs = rep.rows.back().values[2].second;
  rep.ratio = ratios.back();
  rep.context = {{"sigma", sigma}, {"delta", delta}, {"delta_trial", dp}, {"points", u0.axis(0).points}};
  rep.metrics = {{"slope", *rep.fitted_exponent},
                 {"expected_slope", dp - delta},
                 {"baseline_ratio", ratios.front()},
                 {"norm_P0u0", np0},
                 {"norm_u0", nu}};
  return rep;
}

EstimateReport wick_estimate_path(const std::vector<SampledField>& fields, const CoefficientField& a, double sigma,
                                  const std::vector<double>& lambdas) {
  check_sigma(sigma, false);
  if (fields.empty()) throw InvalidArgument("Wick path needs at least one field");
  if (lambdas.empty()) throw InvalidArgument("Wick path needs at least one lambda");
  const auto& axes = fields[0].axes();
  if (axes.size() != 3 || axes[0].label != AxisLabel::t || axes[1].label != AxisLabel::x1 ||
      axes[2].label != AxisLabel::x2)
    throw AxisMismatch("Wick path expects fields on (t, x1, x2)");
  for (const auto& u : fields) require_same_axes(u, fields[0], "Wick path");
  const double delta = gain_exponent(sigma);
  const std::vector<Axis> space(axes.begin() + 1, axes.end());
  std::vector<WavePacketFrame> frames;
  for (double l : lambdas) frames.emplace_back(space, l);
  const int nt = axes[0].points;
  const std::size_t nf = fields.size(), nl = lambdas.size();

  // Outputs per (lambda, field): Wick <x1>^d, Wick <x2 - t x1>^{2s}, Wick p_t; Weyl p_t per field.
  std::vector<SampledField> w1(nl * nf, SampledField(axes)), w2 = w1, wp = w1, ep(nf, SampledField(axes));
  parallel_for(nt, [&](std::size_t i) {
    const int ii = static_cast<int>(i);
    const double t = axes[0].coordinate(ii);
    const PhaseSymbol s1{[delta](std::span<const double> X) { return std::pow(bracket(X[0]), delta); }};
    const PhaseSymbol s2{
        [sigma, t](std::span<const double> X) { return std::pow(bracket(X[1] - t * X[0]), 2.0 * sigma); }};
    const PhaseSymbol sp{[&a, sigma, t](std::span<const double> X) {
      return a(t, X[3], X[2] + t * X[3]) * F_radial(std::abs(X[1] - t * X[0]), sigma);
    }};
    const WeylOperator weyl(sp, space);
    std::vector<SampledField> slices;
    for (std::size_t k = 0; k < nf; ++k) {
      slices.push_back(detail::leading_slice(fields[k], ii));
      detail::set_leading_slice(ep[k], ii, weyl.apply(slices.back()));
    }
    for (std::size_t l = 0; l < nl; ++l) {
      const WavePacketFrame& frame = frames[l];
      const SampledField g1 = sample_symbol(s1, frame), g2 = sample_symbol(s2, frame), gp = sample_symbol(sp, frame);
      auto wick = [&](const SampledField& wu, const SampledField& g) {
        SampledField v = wu;
        auto vv = v.values();
        for (std::size_t j = 0; j < v.size(); ++j) vv[j] *= g[j];
        return frame.adjoint(v);
      };
      for (std::size_t k = 0; k < nf; ++k) {
        const SampledField wu = frame.transform(slices[k]);
        detail::set_leading_slice(w1[l * nf + k], ii, wick(wu, g1));
        detail::set_leading_slice(w2[l * nf + k], ii, wick(wu, g2));
        detail::set_leading_slice(wp[l * nf + k], ii, wick(wu, gp));
      }
    }
  });

  EstimateReport rep;
  double worst_ratio = 0.0, remainder = 0.0, rhs_gap = 0.0;
  const double p2 = std::max(2.0 * sigma - 1.0, 0.0);
  for (std::size_t k = 0; k < nf; ++k) {
    const SampledField& u = fields[k];
    const SampledField dtu = iDt(u);
    const double nu = norm_l2(u);
    const double rhs_weyl = norm_l2(dtu + ep[k]) + nu;
    const double g1 = norm_l2(multiply_by(
        u, [&](std::span<const double> z) { return std::pow(bracket(z[2] - z[0] * z[1]), 2.0 * sigma); }));
    const double g2 =
        norm_l2(multiply_by(u, [&](std::span<const double> z) { return std::pow(bracket(z[2] - z[0] * z[1]), p2); }));
    for (std::size_t l = 0; l < nl; ++l) {
      const double lambda = lambdas[l];
      const std::size_t s = l * nf + k;
      const double lhs = norm_l2(w1[s]) + norm_l2(w2[s]);
      const double rhs = norm_l2(dtu + wp[s]) + nu;
      const double diff = norm_l2(wp[s] - ep[k]);
      const double bound = std::pow(lambda, 1.0 - sigma) * g1 + std::pow(lambda, -sigma) * g2 + nu / lambda;
      const double ratio = safe_ratio(lhs, rhs);
      const double rem = diff / bound;
      if (ratio >= worst_ratio) {
        worst_ratio = ratio;
        rep.lhs = lhs;
        rep.rhs = rhs;
      }
      remainder = std::max(remainder, rem);
      rhs_gap = std::max(rhs_gap, std::abs(rhs - rhs_weyl));
      rep.rows.push_back({"field",
                          {{"field", static_cast<double>(k)},
                           {"lambda", lambda},
                           {"lhs", lhs},
                           {"rhs", rhs},
                           {"ratio", ratio},
                           {"rhs_weyl", rhs_weyl},
                           {"wick_weyl_difference", diff},
                           {"remainder_bound", bound},
                           {"remainder_constant", rem}}});
    }
  }
  rep.ratio = worst_ratio;
  rep.fitted_constant = worst_ratio;
  rep.context = {{"sigma", sigma},
                 {"delta", delta},
                 {"fields", static_cast<double>(nf)},
                 {"points", static_cast<double>(axes[1].points)}};
  rep.metrics = {{"max_ratio", worst_ratio}, {"remainder_constant", remainder}, {"rhs_gap", rhs_gap}};
  return rep;
}

EstimateReport wick_estimate_path(const std::vector<SampledField>& fields, const CoefficientField& a, double sigma,
                                  double lambda) {
  return wick_estimate_path(fields, a, sigma, std::vector<double>{lambda});
}

}  // namespace hypokit
