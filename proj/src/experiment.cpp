#include "hypokit/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <set>
#include <sstream>

#include "hypokit/errors.hpp"
#include "hypokit/kinetic.hpp"
#include "hypokit/multipliers.hpp"
#include "hypokit/parallel.hpp"
#include "hypokit/quantization.hpp"
#include "hypokit/random.hpp"

namespace hypokit {

using json = nlohmann::ordered_json;

namespace {

constexpr double kHuge = 1e300;

json axis_json(const char* label, int points, double length) {
  return {{"axis", label}, {"points", points}, {"length", length}};
}

json base_defaults(const std::string& name) {
  return {{"experiment", name},
          {"sigma", 0.5},
          {"seed", 1},
          {"output_dir", "runs/" + name},
          {"grid", json::array()},
          {"family", {{"kinds", json::array({"gaussian_pack"})}, {"count", 20}, {"support_T", 1.0}}},
          {"lambdas", json::array()},
          {"frame", {{"y_stride", 1}, {"eta_stride", 1}}},
          {"coefficient", "cosgauss"},
          {"options", json::object()},
          {"tolerances", json::object()}};
}

json all_families() { return json::array({"gaussian_pack", "modulated_gaussian", "rough_besov", "random_bandlimited"}); }

struct CatalogEntry {
  const char* name;
  const char* anchor;
  json defaults;
};

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> c;
  {
    json d = base_defaults("verify-wick");
    d["grid"] = json::array({axis_json("x", 32, 8.0)});
    d["lambdas"] = {0.25, 0.5, 1.0};
    d["options"] = {{"positivity_symbols", 50}, {"positivity_fields", 20}, {"random_fields", 8}};
    d["tolerances"] = {{"isometry_defect", 1e-6},    {"identity_defect", 1e-6},    {"positivity_min", -1e-6},
                       {"idempotence_defect", 1e-5}, {"selfadjoint_defect", 1e-5}, {"kernel_error", 1e-6}};
    c.push_back({"verify-wick", "wave-packet transform, Wick quantization and the projection kernel", d});
  }
  {
    json d = base_defaults("verify-weyl");
    d["grid"] = json::array({axis_json("x", 64, 8.0)});
    d["lambdas"] = {1.0, 0.5};
    d["options"] = {{"gauss_hermite_order", 24}};
    d["tolerances"] = {{"derivative_error", 1e-8}, {"moment_error", 1e-8}, {"affine_error", 1e-6}};
    c.push_back({"verify-weyl", "Weyl quantization and Wick symbols as Gaussian averages", d});
  }
  {
    json d = base_defaults("verify-shear");
    d["grid"] = json::array({axis_json("t", 24, 1.0), axis_json("x", 24, 3.5), axis_json("v", 24, 3.5)});
    d["options"] = {{"width_t", 0.2}, {"width_x", 0.7}};
    d["tolerances"] = {{"unitarity_defect", 1e-8}, {"conjugation_error", 1e-6}, {"normal_form_error", 1e-5}};
    c.push_back({"verify-shear", "normal form of the transport part by shear conjugation", d});
  }
  {
    json d = base_defaults("verify-dilation");
    d["grid"] = json::array({axis_json("t", 64, 2.0), axis_json("x", 128, 2.0), axis_json("v", 64, 2.0)});
    d["lambdas"] = {2.0, 4.0};
    d["options"] = {{"width_fraction", 0.2}};
    d["tolerances"] = {{"residual", 1e-6}, {"norm_defect", 1e-8}};
    c.push_back({"verify-dilation", "anisotropic dilation conjugating the model operator", d});
  }
  {
    json d = base_defaults("lemma-1d");
    d["grid"] = json::array({axis_json("t", 256, 4.0)});
    d["options"] = {{"points", 200}, {"profiles", 20}, {"x1_max", 1000.0}};
    d["tolerances"] = {{"growth_factor", 3.0}};
    c.push_back({"lemma-1d", "one-dimensional estimate uniform in the frozen parameters", d});
  }
  {
    json d = base_defaults("key-estimate");
    d["grid"] = json::array({axis_json("t", 32, 4.0), axis_json("x", 32, 4.0), axis_json("v", 32, 4.0)});
    d["family"]["kinds"] = all_families();
    c.push_back({"key-estimate", "key estimate for the localized operator", d});
  }
  {
    json d = base_defaults("full-theorem");
    d["grid"] = json::array({axis_json("t", 32, 4.0), axis_json("x", 32, 4.0), axis_json("v", 32, 4.0)});
    d["family"]["kinds"] = all_families();
    d["options"] = {{"s", 0.5}};
    c.push_back({"full-theorem", "main hypoelliptic estimate in H^s with time regularity", d});
  }
  {
    json d = base_defaults("scaling-sweep");
    d["grid"] = json::array({axis_json("t", 64, 2.0), axis_json("x", 64, 2.0), axis_json("v", 64, 2.0)});
    d["lambdas"] = {1.0, 2.0, 4.0, 8.0};
    d["options"] = {{"delta_offset", 0.0}};
    d["tolerances"] = {{"slope_error", 0.05}};
    c.push_back({"scaling-sweep", "optimality of the gain exponent by dilation", d});
  }
  {
    json d = base_defaults("wick-path");
    d["grid"] = json::array({axis_json("t", 24, 4.0), axis_json("x1", 24, 6.0), axis_json("x2", 24, 6.0)});
    d["family"]["count"] = 5;
    d["lambdas"] = {0.25, 0.5, 1.0};
    c.push_back({"wick-path", "Wick-quantized localized estimate and its Weyl remainder", d});
  }
  return c;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c = build_catalog();
  return c;
}

const CatalogEntry& entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw ConfigError("unknown experiment '" + name + "'; run `hypokit list` for the catalog");
}

std::vector<std::string> required_axes(const std::string& name) {
  if (name == "verify-wick" || name == "verify-weyl") return {"x"};
  if (name == "lemma-1d") return {"t"};
  if (name == "wick-path") return {"t", "x1", "x2"};
  return {"t", "x", "v"};
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " is missing or has the wrong type");
  }
}

// Merges `user` into `base`; keys absent from `base` are rejected.
void merge_checked(json& base, const json& user, const std::string& where, bool open) {
  if (!user.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) {
      if (!open) throw ConfigError("unknown config key '" + path + "'");
      base[it.key()] = it.value();
      continue;
    }
    json& slot = base[it.key()];
    if (slot.is_object() && it.key() != "options" && it.key() != "tolerances")
      merge_checked(slot, it.value(), path, false);
    else if (it.key() == "options" || it.key() == "tolerances")
      merge_checked(slot, it.value(), path, false);
    else
      slot = it.value();
  }
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double opt(const ExperimentConfig& c, const std::string& key) { return c.options.at(key); }
double tol(const ExperimentConfig& c, const std::string& key) { return c.tolerances.at(key); }

void add_check(RunResult& r, const std::string& name, double value, double limit, bool upper = true) {
  const bool ok = std::isfinite(value) && (upper ? value <= limit : value >= limit);
  r.checks.push_back({name, value, limit, upper, ok});
}

cplx complex_normal(Rng& rng) {
  const double re = rng.normal();
  return {re, rng.normal()};
}

SampledField random_field(const std::vector<Axis>& axes, Rng& rng) {
  SampledField u(axes);
  for (auto& v : u.values()) v = complex_normal(rng);
  return u;
}

// --- suites -------------------------------------------------------------------

RunResult run_verify_wick(const ExperimentConfig& c) {
  RunResult r;
  const std::vector<Axis> base = {c.grid[0]};
  const int nsym = static_cast<int>(opt(c, "positivity_symbols"));
  const int nfields = static_cast<int>(opt(c, "random_fields"));
  const int npos = static_cast<int>(opt(c, "positivity_fields"));
  double iso = 0.0, ident = 0.0, pos = kHuge, idem = 0.0, selfadj = 0.0, kern = 0.0;
  const Rng root(c.seed);
  for (std::size_t li = 0; li < c.lambdas.size(); ++li) {
    const double lam = c.lambdas[li];
    const WavePacketFrame frame(base, lam, c.y_stride, c.eta_stride);
    if (frame.oversampling() < 4.0) throw ConfigError("frame oversampling must be at least 4");
    Rng rng = root.split(li);
    double l_iso = 0.0, l_ident = 0.0, l_pos = kHuge;
    const PhaseSymbol one{[](std::span<const double>) { return 1.0; }, 1.0, 100};
    for (int k = 0; k < nfields; ++k) {
      const SampledField u = random_field(base, rng);
      const double nu = norm_l2(u);
      const SampledField wu = frame.transform(u);
      l_iso = std::max(l_iso, std::abs(norm_l2(wu) / nu - 1.0));
      l_iso = std::max(l_iso, norm_l2(frame.adjoint(wu) - u) / nu);
      l_ident = std::max(l_ident, norm_l2(wick_apply(one, u, frame) - u) / nu);
    }
    const double L = base[0].length;
    const double nyq = base[0].points / (2.0 * L);
    for (int k = 0; k < nsym; ++k) {
      std::vector<std::array<double, 5>> bumps(3);
      for (auto& b : bumps)
        b = {rng.uniform(-L / 3, L / 3), rng.uniform(-nyq / 2, nyq / 2), rng.uniform(0.2, 1.5),
             rng.uniform(0.2, 1.5), rng.uniform()};
      const double floor = 0.1 * rng.uniform();
      double sup = floor;
      for (const auto& b : bumps) sup += b[4];
      const PhaseSymbol a{[bumps, floor](std::span<const double> X) {
                            double s = floor;
                            for (const auto& b : bumps) {
                              const double dy = (X[0] - b[0]) / b[2], de = (X[1] - b[1]) / b[3];
                              s += b[4] * std::exp(-kPi * (dy * dy + de * de));
                            }
                            return s;
                          },
                          sup, 100};
      for (int j = 0; j < npos; ++j) {
        const SampledField u = random_field(base, rng);
        const double q = inner(wick_apply(a, u, frame), u).real() / (sup * std::pow(norm_l2(u), 2));
        l_pos = std::min(l_pos, q);
      }
    }
    const EstimateReport proj = verify_projection(frame);
    const double l_idem = proj.metrics.at("idempotence_defect");
    const double l_self = proj.metrics.at("selfadjoint_defect");
    const double l_kern = proj.metrics.at("kernel_error");
    const double c_ref = std::pow(2.0 * lam, 0.25);
    r.report.rows.push_back({"lambda",
                             {{"lambda", lam},
                              {"oversampling", frame.oversampling()},
                              {"isometry_defect", l_iso},
                              {"identity_defect", l_ident},
                              {"positivity_min", l_pos},
                              {"idempotence_defect", l_idem},
                              {"selfadjoint_defect", l_self},
                              {"kernel_error", l_kern},
                              {"trace", proj.metrics.at("trace")},
                              {"normalization_error", std::abs(frame.normalization() - c_ref) / c_ref}}});
    iso = std::max(iso, l_iso);
    ident = std::max(ident, l_ident);
    pos = std::min(pos, l_pos);
    idem = std::max(idem, l_idem);
    selfadj = std::max(selfadj, l_self);
    kern = std::max(kern, l_kern);
  }
  r.report.metrics = {{"isometry_defect", iso},         {"identity_defect", ident},
                      {"positivity_min", pos},          {"idempotence_defect", idem},
                      {"selfadjoint_defect", selfadj},  {"kernel_error", kern}};
  add_check(r, "isometry_defect", iso, tol(c, "isometry_defect"));
  add_check(r, "identity_defect", ident, tol(c, "identity_defect"));
  add_check(r, "positivity_min", pos, tol(c, "positivity_min"), false);
  add_check(r, "idempotence_defect", idem, tol(c, "idempotence_defect"));
  add_check(r, "selfadjoint_defect", selfadj, tol(c, "selfadjoint_defect"));
  add_check(r, "kernel_error", kern, tol(c, "kernel_error"));
  return r;
}

RunResult run_verify_weyl(const ExperimentConfig& c) {
  RunResult r;
  const std::vector<Axis> base = {c.grid[0]};
  const int order = static_cast<int>(opt(c, "gauss_hermite_order"));
  const SampledField u = make_field(base, [](std::span<const double> z) { return cplx(std::exp(-kPi * z[0] * z[0])); });
  const double nu = norm_l2(u);

  const PhaseSymbol xi{[](std::span<const double> X) { return X[1]; }};
  const SampledField du = cplx(0.0, -1.0 / (2.0 * kPi)) * derivative(u, 0);
  const double deriv = norm_l2(weyl_apply(xi, u) - du) / norm_l2(du);

  double moment = 0.0, affine = 0.0;
  for (double lam : c.lambdas) {
    const WavePacketFrame frame(base, lam, c.y_stride, c.eta_stride);
    const PhaseSymbol y2{[](std::span<const double> X) { return X[0] * X[0]; }};
    const PhaseSymbol e2{[](std::span<const double> X) { return X[1] * X[1]; }};
    const PhaseSymbol sy = wick_via_weyl(y2, frame, order), se = wick_via_weyl(e2, frame, order);
    double l_mom = 0.0;
    for (double x : {-1.5, 0.0, 0.7})
      for (double e : {-2.0, 0.3, 1.1}) {
        const double X[] = {x, e};
        const double ey = x * x + 1.0 / (4.0 * kPi * lam), ee = e * e + lam / (4.0 * kPi);
        l_mom = std::max({l_mom, std::abs(sy(X) - ey) / (1.0 + ey), std::abs(se(X) - ee) / (1.0 + ee)});
      }
    const PhaseSymbol aff{[](std::span<const double> X) { return 0.3 + 0.7 * X[0] - 0.4 * X[1]; }};
    const double l_aff = norm_l2(wick_apply(aff, u, frame) - weyl_apply(aff, u)) / nu;
    r.report.rows.push_back({"lambda", {{"lambda", lam}, {"moment_error", l_mom}, {"affine_error", l_aff}}});
    moment = std::max(moment, l_mom);
    affine = std::max(affine, l_aff);
  }
  r.report.metrics = {{"derivative_error", deriv}, {"moment_error", moment}, {"affine_error", affine}};
  add_check(r, "derivative_error", deriv, tol(c, "derivative_error"));
  add_check(r, "moment_error", moment, tol(c, "moment_error"));
  add_check(r, "affine_error", affine, tol(c, "affine_error"));
  return r;
}

RunResult run_verify_shear(const ExperimentConfig& c) {
  RunResult r;
  const double wt = opt(c, "width_t"), wx = opt(c, "width_x");
  const std::vector<Axis> txv = c.grid;
  std::vector<Axis> tx12 = c.grid;
  tx12[1].label = AxisLabel::x1;
  tx12[2].label = AxisLabel::x2;
  auto gauss = [&](std::span<const double> z) {
    return cplx(std::exp(-kPi * (z[0] * z[0] / (wt * wt) + (z[1] * z[1] + z[2] * z[2]) / (wx * wx))));
  };
  const SampledField u = make_field(tx12, gauss);
  const SampledField w = make_field(txv, gauss);
  const double nu = norm_l2(u);

  double unit = 0.0;
  const std::vector<Axis> xv(txv.begin() + 1, txv.end());
  const SampledField w2 = make_field(xv, [&](std::span<const double> z) {
    return cplx(std::exp(-kPi * (z[0] * z[0] + z[1] * z[1]) / (wx * wx)));
  });
  for (double t : {-0.5, -0.2, 0.3, 0.5}) {
    const SampledField m = apply_shear(w2, t);
    unit = std::max(unit, std::abs(norm_l2(m) / norm_l2(w2) - 1.0));
    unit = std::max(unit, norm_l2(apply_inverse_shear(m, t) - w2) / norm_l2(w2));
  }
  const SampledField mw = apply_joint_shear(w);
  unit = std::max(unit, std::abs(norm_l2(mw) / norm_l2(w) - 1.0));
  unit = std::max(unit, norm_l2(apply_inverse_joint_shear(mw) - w) / norm_l2(w));

  const std::size_t taxis[] = {0};
  auto iDt = [&](const SampledField& f) {
    return apply_fourier_multiplier(f, taxis, [](std::span<const double> z) { return cplx(0.0, z[0]); });
  };
  const SampledField lhs = apply_joint_shear(iDt(apply_inverse_joint_shear(u)));
  SampledField rhs = iDt(u);
  const SampledField dx2 = derivative(u, 2);
  {
    auto o = rhs.values();
    for_each_node(tx12, [&](std::size_t i, std::span<const double> z) { o[i] += z[1] / (2.0 * kPi) * dx2[i]; });
  }
  const double conj = norm_l2(lhs - rhs) / norm_l2(rhs);

  double nf = 0.0;
  for (const char* name : {"one", "sin2", "cosgauss"}) {
    const auto a = CoefficientField::by_name(name);
    const SampledField p2 = apply_normal_form(u, a, c.sigma);
    const SampledField p1 = apply_joint_shear(apply_fourier_side(apply_inverse_joint_shear(u), a, c.sigma));
    const double e = norm_l2(p1 - p2) / norm_l2(p2);
    r.report.rows.push_back({name, {{"normal_form_error", e}, {"norm_ratio", norm_l2(p2) / nu}}});
    nf = std::max(nf, e);
  }
  r.report.metrics = {{"unitarity_defect", unit}, {"conjugation_error", conj}, {"normal_form_error", nf}};
  add_check(r, "unitarity_defect", unit, tol(c, "unitarity_defect"));
  add_check(r, "conjugation_error", conj, tol(c, "conjugation_error"));
  add_check(r, "normal_form_error", nf, tol(c, "normal_form_error"));
  return r;
}

RunResult run_verify_dilation(const ExperimentConfig& c) {
  RunResult r;
  const double f = opt(c, "width_fraction");
  const auto& g = c.grid;
  const SampledField u = make_field(g, [&](std::span<const double> z) {
    double e = 0.0;
    for (std::size_t a = 0; a < 3; ++a) e += z[a] * z[a] / std::pow(f * g[a].length, 2);
    return cplx(std::exp(-kPi * e));
  });
  double resid = 0.0, normd = 0.0;
  for (double lam : c.lambdas) {
    const DilationParams p{lam, c.sigma};
    const EstimateReport rep = verify_dilation_conjugation(u, p);
    ReportRow row{"lambda", {{"lambda", lam}}};
    double worst = 0.0;
    for (const auto& [k, v] : rep.metrics) {
      row.values.emplace_back(k, v);
      if (k.rfind("residual", 0) == 0 || k == "coefficient_error") worst = std::max(worst, v);
    }
    const SampledField tu = apply_dilation(u, p);
    const double nd = std::max(rep.metrics.at("norm_defect"), norm_l2(apply_inverse_dilation(tu, p) - u) / norm_l2(u));
    row.values.emplace_back("roundtrip_norm_defect", nd);
    r.report.rows.push_back(row);
    resid = std::max(resid, worst);
    normd = std::max(normd, nd);
  }
  r.report.metrics = {{"residual", resid}, {"norm_defect", normd}};
  add_check(r, "residual", resid, tol(c, "residual"));
  add_check(r, "norm_defect", normd, tol(c, "norm_defect"));
  return r;
}

RunResult run_lemma(const ExperimentConfig& c) {
  RunResult r;
  const auto points = sample_lemma_points(c.seed, static_cast<int>(opt(c, "points")), opt(c, "x1_max"));
  const auto profiles = lemma_profiles(c.grid[0], c.seed + 1, static_cast<int>(opt(c, "profiles")), c.support_T);
  r.report = check_lemma_1d(points, profiles, CoefficientField::by_name(c.coefficient), c.sigma);
  add_check(r, "max_ratio_finite", r.report.metrics.at("max_ratio"), kHuge);
  add_check(r, "growth_factor", r.report.metrics.at("growth_factor"), tol(c, "growth_factor"));
  return r;
}

// Runs one harness per family and concatenates the rows.
RunResult run_families(const ExperimentConfig& c, bool full) {
  RunResult r;
  const auto a = CoefficientField::by_name(c.coefficient);
  double worst = 0.0, recovery = 0.0;
  for (auto kind : c.families) {
    const TestFamily fam{kind, c.seed, c.family_count, c.support_T};
    const auto fields = generate_family(fam, c.grid);
    const std::string label = to_string(kind);
    const EstimateReport rep = full ? check_full_theorem(fields, a, c.sigma, opt(c, "s"), label)
                                    : check_key_estimate(fields, a, c.sigma, label);
    r.report.rows.insert(r.report.rows.end(), rep.rows.begin(), rep.rows.end());
    r.report.metrics["max_ratio_" + label] = rep.ratio;
    if (full) recovery = std::max(recovery, rep.metrics.at("recovery_constant"));
    if (rep.ratio >= worst) {
      worst = rep.ratio;
      r.report.lhs = rep.lhs;
      r.report.rhs = rep.rhs;
      r.report.context = rep.context;
    }
  }
  r.report.ratio = worst;
  r.report.fitted_constant = worst;
  r.report.metrics["max_ratio"] = worst;
  r.report.metrics["delta"] = gain_exponent(c.sigma);
  if (full) r.report.metrics["recovery_constant"] = recovery;
  add_check(r, "max_ratio_finite", worst, kHuge);
  return r;
}

RunResult run_sweep(const ExperimentConfig& c) {
  RunResult r;
  const double offset = opt(c, "delta_offset");
  const SampledField u0 = scaling_profile(c.grid[0].points, c.grid[0].length);
  if (u0.axes() != c.grid) throw ConfigError("scaling-sweep needs three equal (points, length) axes t, x, v");
  r.report = scaling_sweep(u0, c.sigma, gain_exponent(c.sigma) + offset, c.lambdas);
  r.report.metrics["slope_error"] = std::abs(*r.report.fitted_exponent - offset);
  add_check(r, "slope_error", r.report.metrics["slope_error"], tol(c, "slope_error"));
  return r;
}

RunResult run_wick_path(const ExperimentConfig& c) {
  RunResult r;
  const auto a = CoefficientField::by_name(c.coefficient);
  std::vector<SampledField> fields;
  for (auto kind : c.families) {
    auto f = generate_family({kind, c.seed, c.family_count, c.support_T}, c.grid);
    fields.insert(fields.end(), f.begin(), f.end());
  }
  r.report = wick_estimate_path(fields, a, c.sigma, c.lambdas);
  const double worst = r.report.ratio;
  add_check(r, "max_ratio_finite", worst, kHuge);
  return r;
}

json flatten(const json& j, const std::string& prefix = "") {
  json out = json::object();
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const json sub = flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
      for (auto s = sub.begin(); s != sub.end(); ++s) out[s.key()] = s.value();
    }
  } else {
    out[prefix] = j;
  }
  return out;
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

bool lower_is_better(const std::string& name) {
  for (const char* k : {"defect", "residual", "error"})
    if (name.find(k) != std::string::npos) return true;
  return false;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : catalog()) v.push_back({e.name, e.anchor, e.defaults.dump(2)});
    return v;
  }();
  return infos;
}

std::string catalog_json() {
  json arr = json::array();
  for (const auto& e : catalog()) arr.push_back({{"name", e.name}, {"anchor", e.anchor}, {"defaults", e.defaults}});
  return arr.dump(2);
}

ExperimentConfig parse_config(const std::string& text) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  if (!user.contains("experiment") || !user["experiment"].is_string())
    throw ConfigError("config needs a string 'experiment'");
  const std::string name = user["experiment"].get<std::string>();
  json merged = entry(name).defaults;
  merge_checked(merged, user, "", false);

  ExperimentConfig c;
  c.experiment = name;
  c.sigma = get<double>(merged, "sigma", "config");
  const bool comparison = name == "key-estimate" || name == "full-theorem";
  if (!(c.sigma > 0.0) || c.sigma > 1.0 || (c.sigma == 1.0 && !comparison))
    throw ConfigError("sigma = " + number(c.sigma) + " violates 0 < sigma < 1 required by F_sigma" +
                      (comparison ? " (sigma = 1 is allowed as the local comparison)" : ""));
  const json& seed = merged["seed"];
  if (!seed.is_number_integer() || seed.get<long long>() < 0) throw ConfigError("seed must be a nonnegative integer");
  c.seed = seed.get<std::uint64_t>();
  c.output_dir = get<std::string>(merged, "output_dir", "config");
  c.coefficient = get<std::string>(merged, "coefficient", "config");

  if (!merged["grid"].is_array()) throw ConfigError("grid must be an array of {axis, points, length}");
  for (const auto& g : merged["grid"]) {
    try {
      const auto label = parse_axis_label(get<std::string>(g, "axis", "grid[]"));
      c.grid.push_back(make_axis(label, get<int>(g, "points", "grid[]"), get<double>(g, "length", "grid[]")));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("grid: ") + e.what());
    }
  }
  const auto want = required_axes(name);
  bool ok = c.grid.size() == want.size();
  for (std::size_t a = 0; ok && a < want.size(); ++a) ok = to_string(c.grid[a].label) == want[a];
  if (!ok) {
    std::string s;
    for (const auto& w : want) s += (s.empty() ? "" : ", ") + w;
    throw ConfigError(name + " needs grid axes (" + s + ") in that order");
  }

  const json& fam = merged["family"];
  if (!fam["kinds"].is_array() || fam["kinds"].empty()) throw ConfigError("family.kinds must be a nonempty array");
  try {
    for (const auto& k : fam["kinds"]) c.families.push_back(parse_family_kind(k.get<std::string>()));
    c.family_count = get<int>(fam, "count", "family");
    c.support_T = get<double>(fam, "support_T", "family");
    TestFamily{c.families[0], c.seed, c.family_count, c.support_T}.validate();
    CoefficientField::by_name(c.coefficient);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const json::exception&) {
    throw ConfigError("family.kinds entries must be strings");
  }
  const bool uses_T = name == "lemma-1d" || name == "key-estimate" || name == "full-theorem" || name == "wick-path";
  if (uses_T && c.support_T >= 0.5 * c.grid[0].length)
    throw ConfigError("family.support_T must be smaller than half the t box");

  c.lambdas = merged["lambdas"].get<std::vector<double>>();
  for (double l : c.lambdas) {
    const bool frame_lambda = name == "verify-wick" || name == "verify-weyl" || name == "wick-path";
    if (frame_lambda && !(l > 0.0 && l <= 1.0)) throw ConfigError("frame lambda must lie in (0, 1], got " + number(l));
    if (!frame_lambda && !(l >= 1.0)) throw ConfigError("dilation lambda must be >= 1, got " + number(l));
  }
  if (name == "scaling-sweep" && c.lambdas.size() < 2) throw ConfigError("scaling-sweep needs at least two lambdas");
  c.y_stride = get<int>(merged["frame"], "y_stride", "frame");
  c.eta_stride = get<int>(merged["frame"], "eta_stride", "frame");
  if (c.y_stride < 1 || c.eta_stride < 1) throw ConfigError("frame strides must be positive");

  for (auto it = merged["options"].begin(); it != merged["options"].end(); ++it) {
    if (!it.value().is_number()) throw ConfigError("options." + it.key() + " must be a number");
    c.options[it.key()] = it.value().get<double>();
  }
  for (auto it = merged["tolerances"].begin(); it != merged["tolerances"].end(); ++it) {
    if (!it.value().is_number()) throw ConfigError("tolerances." + it.key() + " must be a number");
    c.tolerances[it.key()] = it.value().get<double>();
  }
  for (const char* k : {"points", "profiles", "positivity_symbols", "positivity_fields", "random_fields", "gauss_hermite_order"})
    if (c.options.count(k) && c.options[k] < 1) throw ConfigError(std::string("options.") + k + " must be positive");
  if (c.options.count("x1_max") && !(c.options["x1_max"] > 1.0)) throw ConfigError("options.x1_max must exceed 1");
  if (c.options.count("s") && (c.options["s"] < 0.0 || c.options["s"] > 1.0))
    throw ConfigError("options.s must lie in [0, 1]");
  for (const char* k : {"width_t", "width_x", "width_fraction"})
    if (c.options.count(k) && !(c.options[k] > 0.0)) throw ConfigError(std::string("options.") + k + " must be positive");
  if (c.options.count("delta_offset") && !(gain_exponent(c.sigma) + c.options["delta_offset"] > 0.0))
    throw ConfigError("options.delta_offset makes the trial exponent nonpositive");
  c.resolved = merged.dump(2);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

bool RunResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

RunResult run_experiment(const ExperimentConfig& c) {
  RunResult r;
  const std::string& n = c.experiment;
  if (n == "verify-wick") r = run_verify_wick(c);
  else if (n == "verify-weyl") r = run_verify_weyl(c);
  else if (n == "verify-shear") r = run_verify_shear(c);
  else if (n == "verify-dilation") r = run_verify_dilation(c);
  else if (n == "lemma-1d") r = run_lemma(c);
  else if (n == "key-estimate") r = run_families(c, false);
  else if (n == "full-theorem") r = run_families(c, true);
  else if (n == "scaling-sweep") r = run_sweep(c);
  else if (n == "wick-path") r = run_wick_path(c);
  else throw ConfigError("unknown experiment '" + n + "'");
  r.experiment = n;
  r.report.context["sigma"] = c.sigma;
  r.report.context["seed"] = static_cast<double>(c.seed);
  return r;
}

std::string results_csv(const RunResult& result) {
  std::vector<std::string> cols;
  std::set<std::string> seen;
  for (const auto& row : result.report.rows)
    for (const auto& [k, v] : row.values)
      if (seen.insert(k).second) cols.push_back(k);
  std::ostringstream out;
  out << "label";
  for (const auto& [k, v] : result.report.context) out << ',' << csv_field(k);
  for (const auto& k : cols) out << ',' << csv_field(k);
  out << "\r\n";
  for (const auto& row : result.report.rows) {
    out << csv_field(row.label);
    for (const auto& [k, v] : result.report.context) out << ',' << number(v);
    for (const auto& k : cols) {
      out << ',';
      for (const auto& [name, v] : row.values)
        if (name == k) {
          out << number(v);
          break;
        }
    }
    out << "\r\n";
  }
  return out.str();
}

std::string summary_json(const RunResult& result) {
  const auto& rep = result.report;
  json s;
  s["experiment"] = result.experiment;
  s["passed"] = result.passed();
  std::vector<double> ratios;
  for (const auto& row : rep.rows)
    for (const auto& [k, v] : row.values)
      if (k == "ratio") ratios.push_back(v);
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    const std::size_t n = ratios.size();
    s["max"] = ratios.back();
    s["median"] = n % 2 ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
  }
  if (rep.fitted_exponent) s["fitted_slope"] = *rep.fitted_exponent;
  if (rep.fitted_constant) s["fitted_constant"] = *rep.fitted_constant;
  for (const auto& [k, v] : rep.metrics) s[k] = v;
  s["context"] = rep.context;
  json checks = json::array();
  for (const auto& c : result.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"bound", c.upper ? "max" : "min"},
                      {"passed", c.passed}});
  s["checks"] = checks;
  return s.dump(2);
}

void write_outputs(const ExperimentConfig& config, const RunResult& result, double wall_seconds,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    out << text;
  };
  write("results.csv", results_csv(result));
  write("summary.json", summary_json(result) + "\n");
  json m;
  m["experiment"] = config.experiment;
  m["version"] = HYPOKIT_VERSION;
  m["seed"] = config.seed;
  m["rng"] = "mt19937_64";
  m["threads"] = thread_count();
  m["wall_clock_seconds"] = wall_seconds;
  m["config"] = json::parse(config.resolved);
  m["library"] = {{"cutoff_inner_radius", 1.0},
                  {"cutoff_outer_radius", 2.0},
                  {"kernel_budget_bytes", kDefaultKernelBudget},
                  {"power_iterations", 200},
                  {"fft", "fftw3"}};
  write("manifest.json", m.dump(2) + "\n");
}

int run_config_file(const std::filesystem::path& path, std::ostream& out, std::ostream& err,
                    const std::filesystem::path& output_override) {
  try {
    const ExperimentConfig c = load_config(path);
    const auto start = std::chrono::steady_clock::now();
    const RunResult r = run_experiment(c);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto dir = output_override.empty() ? c.output_dir : output_override;
    write_outputs(c, r, secs, dir);
    for (const auto& ch : r.checks)
      out << (ch.passed ? "ok   " : "FAIL ") << ch.name << " = " << std::setprecision(6) << ch.value
          << (ch.upper ? " <= " : " >= ") << ch.limit << "\n";
    out << c.experiment << ": " << (r.passed() ? "passed" : "FAILED") << " (" << std::fixed << std::setprecision(2)
        << secs << " s) -> " << dir.string() << "\n";
    return r.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const AxisMismatch& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceGuard& e) {
    err << "resource guard: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

CompareReport compare_runs(const std::filesystem::path& run_a, const std::filesystem::path& run_b) {
  for (const auto& d : {run_a, run_b})
    if (!std::filesystem::exists(d / "manifest.json")) throw ConfigError("no manifest.json in " + d.string());
  const json ma = flatten(read_json(run_a / "manifest.json")["config"]);
  const json mb = flatten(read_json(run_b / "manifest.json")["config"]);
  CompareReport rep;
  std::set<std::string> keys;
  for (auto it = ma.begin(); it != ma.end(); ++it) keys.insert(it.key());
  for (auto it = mb.begin(); it != mb.end(); ++it) keys.insert(it.key());
  for (const auto& k : keys) {
    if (k == "output_dir") continue;
    const std::string a = ma.contains(k) ? ma[k].dump() : "-";
    const std::string b = mb.contains(k) ? mb[k].dump() : "-";
    if (a != b) rep.parameters.push_back({k, a, b, 0.0, ""});
  }
  json sa, sb;
  if (std::filesystem::exists(run_a / "summary.json")) sa = read_json(run_a / "summary.json");
  if (std::filesystem::exists(run_b / "summary.json")) sb = read_json(run_b / "summary.json");
  std::set<std::string> mkeys;
  for (const json* s : {&sa, &sb})
    if (s->is_object())
      for (auto it = s->begin(); it != s->end(); ++it)
        if (it.value().is_number()) mkeys.insert(it.key());
  for (const auto& k : mkeys) {
    const bool ha = sa.contains(k) && sa[k].is_number(), hb = sb.contains(k) && sb[k].is_number();
    if (!ha || !hb) {
      rep.metrics.push_back({k, ha ? number(sa[k].get<double>()) : "-", hb ? number(sb[k].get<double>()) : "-",
                             0.0, "changed"});
      continue;
    }
    const double a = sa[k].get<double>(), b = sb[k].get<double>();
    if (a == b) continue;
    const double rel = a != 0.0 ? (b - a) / std::abs(a) : std::numeric_limits<double>::infinity();
    std::string flag;
    if (std::abs(rel) > 0.1) flag = lower_is_better(k) ? (b < a ? "improved" : "regressed") : "changed";
    rep.metrics.push_back({k, number(a), number(b), rel, flag});
  }
  return rep;
}

void print_compare(const CompareReport& report, std::ostream& out) {
  if (report.empty()) {
    out << "no differences\n";
    return;
  }
  auto table = [&](const char* title, const std::vector<DeltaRow>& rows, bool rel) {
    if (rows.empty()) return;
    out << title << "\n";
    for (const auto& r : rows) {
      out << "  " << std::left << std::setw(28) << r.name << std::setw(24) << r.a << std::setw(24) << r.b;
      if (rel && std::isfinite(r.relative_change))
        out << std::showpos << std::fixed << std::setprecision(1) << 100.0 * r.relative_change << "%"
            << std::noshowpos << std::defaultfloat;
      if (!r.flag.empty()) out << "  [" << r.flag << "]";
      out << "\n";
    }
  };
  table("parameters", report.parameters, false);
  table("metrics", report.metrics, true);
}

}  // namespace hypokit
