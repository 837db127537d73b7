#pragma once

#include <functional>
#include <span>
#include <string>

#include "hypokit/grid.hpp"

namespace hypokit {

/// Smooth step on [0,1]: m(s)/(m(s)+m(1-s)) with m(s) = exp(-1/s) for s > 0.
double smooth_step(double s);

/// Radial cutoff w: 0 inside inner_radius, 1 beyond outer_radius.
struct CutoffSpec {
  double inner_radius = 1.0;
  double outer_radius = 2.0;
  std::function<double(double)> profile = smooth_step;

  double operator()(double r) const;
  void validate() const;
};

enum class MultiplierKind { F_sigma, abs_power, bracket_power, custom };

std::string to_string(MultiplierKind kind);
MultiplierKind parse_multiplier_kind(const std::string& name);

/// Radial Fourier multiplier.
///   F_sigma:       F(eta) = |eta|^{2 sigma} w + |eta|^2 (1 - w)
///   abs_power:     |zeta|^exponent
///   bracket_power: (1 + |zeta|^2)^{exponent/2}
///   custom:        rule(zeta)
struct MultiplierSpec {
  MultiplierKind kind = MultiplierKind::F_sigma;
  double sigma = 0.5;
  double exponent = 0.0;
  CutoffSpec cutoff;
  std::function<double(std::span<const double>)> rule;
  /// Admits sigma = 1 for F_sigma (the local Fokker-Planck comparison).
  bool allow_sigma_one = false;

  static MultiplierSpec F(double sigma);
  static MultiplierSpec abs_power(double exponent);
  static MultiplierSpec bracket_power(double exponent);
  static MultiplierSpec custom(std::function<double(std::span<const double>)> rule);

  /// Throws InvalidArgument naming the violated range.
  void validate() const;
  double operator()(std::span<const double> zeta) const;
};

/// F at radius r = |eta|.
double F_radial(double r, double sigma, const CutoffSpec& cutoff = {});

/// Requires spec.kind == F_sigma.
double eval_F(const MultiplierSpec& spec, std::span<const double> eta);

SampledField apply_multiplier(const SampledField& field, const MultiplierSpec& spec,
                              std::span<const std::size_t> axes);

/// delta = 2 sigma / (2 sigma + 1).
double gain_exponent(double sigma);

/// (1 + |tau|^delta + |xi|^delta + |eta|^{2 sigma}) u on a (t, x, v) field.
SampledField lhs_weight(const SampledField& field, double sigma);

/// sup over |eta| <= outer_radius of |eta|^{2 sigma} - F(eta). Beyond the
/// outer radius the difference is 0, so |eta|^{2 sigma} <= F + C everywhere.
double comparison_constant(double sigma, const CutoffSpec& cutoff = {}, int samples = 20001);

}  // namespace hypokit
