#pragma once

#include <functional>
#include <string>

#include "hypokit/grid.hpp"
#include "hypokit/report.hpp"

namespace hypokit {

/// Variable coefficient a(t, x, v) with its declared bounds.
struct CoefficientField {
  std::string name;
  std::function<double(double, double, double)> rule;
  double lower_bound = 1.0;
  double sup_bound = 1.0;

  double operator()(double t, double x, double v) const { return rule(t, x, v); }

  /// Throws InvalidArgument if a < lower_bound or |a| > sup_bound at some node
  /// of the (t, x, v) field layout given by `axes`.
  void check_on(const std::vector<Axis>& axes) const;

  /// a = 1.
  static CoefficientField constant(double value = 1.0);
  /// a = 1 + amp sin^2(x).
  static CoefficientField sin_squared(double amp = 0.5);
  /// a = 1 + amp cos(t) exp(-v^2).
  static CoefficientField cos_gauss(double amp = 0.4);
  /// One of "one", "sin2", "cosgauss".
  static CoefficientField by_name(const std::string& name);
};

/// P u = d_t u + v d_x u + a F(D_v) u on a field with axes t, x, v.
SampledField apply_P(const SampledField& u, const CoefficientField& a, double sigma);

/// Constant-coefficient scaling model iD_t u + i v D_x u + |D_v|^{2 sigma} u,
/// D = (2 i pi)^{-1} d.
SampledField apply_P0(const SampledField& u, double sigma);

/// T_lambda u(t,x,v) = lambda u(alpha t, lambda x, beta v) with
/// alpha = lambda^{2s/(2s+1)}, beta = lambda^{1/(2s+1)}.
struct DilationParams {
  double lambda = 1.0;
  double sigma = 0.5;

  void validate() const;
  double alpha() const;
  double beta() const;
  /// Scale factor applied to the coordinate carrying `label`.
  double scale(AxisLabel label) const;
};

/// Off-grid values use trigonometric interpolation; points falling outside
/// the box read as 0. Throws SupportOverflow if more than `mass_tol` of the
/// relative L2 mass would leave the box.
SampledField apply_dilation(const SampledField& u, const DilationParams& p, double mass_tol = 1e-10);
SampledField apply_inverse_dilation(const SampledField& u, const DilationParams& p, double mass_tol = 1e-10);

/// Measures P0 T u - lambda^delta T P0 u term by term. The transport terms are
/// compared on the grid, the nonlocal |D_v|^{2s} term and the three-term
/// weight identity on the frequency side, where T acts by rescaling the
/// continuous transform (the periodic |D|^p tails would otherwise wrap).
EstimateReport verify_dilation_conjugation(const SampledField& u, const DilationParams& p);

/// M_t on a 2D field with axes (x, v): (M_t u)(x1, x2) = u(x2 - t x1, x1).
/// Returns axes (x1, x2). Shifts are spectral phase factors, so the map is
/// unitary on the grid; SupportOverflow if wrapped mass exceeds `mass_tol`.
SampledField apply_shear(const SampledField& u, double t, double mass_tol = 1e-10);
/// Inverse of apply_shear: (x1, x2) -> (x, v), u(y, x + t y).
SampledField apply_inverse_shear(const SampledField& u, double t, double mass_tol = 1e-10);

/// Joint map on (t, x, v) -> (t, x1, x2): (M u)(t, x1, x2) = u(t, x2 - t x1, x1).
SampledField apply_joint_shear(const SampledField& u, double mass_tol = 1e-10);
SampledField apply_inverse_joint_shear(const SampledField& u, double mass_tol = 1e-10);

/// iD_t u + [a(t, xi2, xi1 + t xi2) F(x2 - t x1)]^w u on (t, x1, x2); the Weyl
/// term acts on each t slice.
SampledField apply_normal_form(const SampledField& u, const CoefficientField& a, double sigma);

/// Operator before the shear, on (t, x, v) with v read as the second space
/// variable y: iD_t w - i y D_x w + [F(x) a(t, xi, eta)]^w w.
SampledField apply_fourier_side(const SampledField& w, const CoefficientField& a, double sigma);

}  // namespace hypokit
