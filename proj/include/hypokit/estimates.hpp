#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypokit/grid.hpp"
#include "hypokit/kinetic.hpp"
#include "hypokit/report.hpp"

namespace hypokit {

enum class FamilyKind { gaussian_pack, modulated_gaussian, rough_besov, random_bandlimited };

std::string to_string(FamilyKind kind);
FamilyKind parse_family_kind(const std::string& name);

/// Seeded battery of test fields whose time profile is a smooth bump
/// supported in [-T, T].
struct TestFamily {
  FamilyKind kind = FamilyKind::gaussian_pack;
  std::uint64_t seed = 1;
  int count = 20;
  double support_T = 1.0;

  void validate() const;
};

/// exp(1 - 1 / (1 - (t/T)^2)) on |t| < T, else 0.
double time_bump(double t, double T);

/// Unit-norm fields on `axes`; axis 0 must be t. Field i depends only on
/// (seed, i).
std::vector<SampledField> generate_family(const TestFamily& family, const std::vector<Axis>& axes);

/// Relative L2 mass at |t| > T.
double exterior_time_mass(const SampledField& u, double T);

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// --- one-dimensional parametric lemma ---------------------------------------

struct LemmaPoint {
  double x1 = 0.0, x2 = 0.0, xi1 = 0.0, xi2 = 0.0;
};

/// |x1| log-uniform in [1e-2, x1_max] with random sign, x2 in [-20, 20],
/// xi1, xi2 in [-5, 5].
std::vector<LemmaPoint> sample_lemma_points(std::uint64_t seed, int count, double x1_max = 1e3);

/// Unit-norm t profiles: bump on [-T, T] times a shifted Gaussian and a
/// modulation.
std::vector<SampledField> lemma_profiles(const Axis& t_axis, std::uint64_t seed, int count, double T);

/// iD_t u + a(t, xi2, xi1 + t xi2) F(x2 - t x1) u on a 1D t grid.
SampledField apply_lemma_operator(const SampledField& u, const LemmaPoint& p, const CoefficientField& a,
                                  double sigma);

/// Ratio ||(1 + <x1>^d + <x2 - t x1>^{2s}) u|| / (||P~ u|| + ||u||), maximized
/// over profiles for each point. Metrics: max_ratio, small_max_ratio (points
/// with |x1| <= 1), growth_factor, coercivity_min.
EstimateReport check_lemma_1d(const std::vector<LemmaPoint>& points, const std::vector<SampledField>& profiles,
                              const CoefficientField& a, double sigma);

// --- three-variable estimates -------------------------------------------------

/// max over fields of ||(1 + |D_x|^d + |D_v|^{2s}) u|| / (||P u|| + ||u||).
EstimateReport check_key_estimate(const std::vector<SampledField>& fields, const CoefficientField& a, double sigma,
                                  const std::string& label = "");

/// Adds |D_t|^d on the left and measures both sides in H^s. Also records the
/// recovery constant ||D_t|^d u|| / (||Pu|| + ||D_x|^d u|| + ||F(D_v) u|| + ||u||).
EstimateReport check_full_theorem(const std::vector<SampledField>& fields, const CoefficientField& a, double sigma,
                                  double s, const std::string& label = "");

/// Default sweep datum on a 64-point, side-2 box in (t, x, v).
SampledField scaling_profile(int points = 64, double length = 2.0);

/// L(lambda) = ||(lambda^{2s d'/(2s+1)} |D_t|^{d'} + lambda^{d'} |D_x|^{d'} +
/// lambda^{d'/(2s+1)} |D_v|^{d'}) u0|| against R = lambda^d ||P0 u0|| + ||u0||;
/// fitted_exponent is the log-log slope of L / R.
EstimateReport scaling_sweep(const SampledField& u0, double sigma, double delta_trial,
                             const std::vector<double>& lambdas);

/// Wick-quantized form of the localized estimate on (t, x1, x2) fields, with
/// the Weyl path alongside for the remainder comparison.
EstimateReport wick_estimate_path(const std::vector<SampledField>& fields, const CoefficientField& a, double sigma,
                                  double lambda);
/// Same for several frame parameters; the Weyl operators are built once per t slice.
EstimateReport wick_estimate_path(const std::vector<SampledField>& fields, const CoefficientField& a, double sigma,
                                  const std::vector<double>& lambdas);

}  // namespace hypokit
