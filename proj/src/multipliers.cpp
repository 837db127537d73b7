#include "hypokit/multipliers.hpp"

#include <algorithm>
#include <cmath>

#include "hypokit/errors.hpp"
#include "hypokit/report.hpp"

namespace hypokit {

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

double CutoffSpec::operator()(double r) const {
  if (r <= inner_radius) return 0.0;
  if (r >= outer_radius) return 1.0;
  return profile((r - inner_radius) / (outer_radius - inner_radius));
}

void CutoffSpec::validate() const {
  if (!(inner_radius > 0.0) || !(outer_radius > inner_radius))
    throw InvalidArgument("cutoff radii must satisfy 0 < inner_radius < outer_radius");
  if (!profile) throw InvalidArgument("cutoff profile is empty");
}

std::string to_string(MultiplierKind kind) {
  switch (kind) {
    case MultiplierKind::F_sigma: return "F_sigma";
    case MultiplierKind::abs_power: return "abs_power";
    case MultiplierKind::bracket_power: return "bracket_power";
    case MultiplierKind::custom: return "custom";
  }
  return "?";
}

MultiplierKind parse_multiplier_kind(const std::string& name) {
  for (auto k : {MultiplierKind::F_sigma, MultiplierKind::abs_power, MultiplierKind::bracket_power,
                 MultiplierKind::custom})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown multiplier kind '" + name + "'");
}

MultiplierSpec MultiplierSpec::F(double sigma) {
  MultiplierSpec s;
  s.kind = MultiplierKind::F_sigma;
  s.sigma = sigma;
  s.exponent = 2.0 * sigma;
  return s;
}

MultiplierSpec MultiplierSpec::abs_power(double exponent) {
  MultiplierSpec s;
  s.kind = MultiplierKind::abs_power;
  s.exponent = exponent;
  return s;
}

MultiplierSpec MultiplierSpec::bracket_power(double exponent) {
  MultiplierSpec s;
  s.kind = MultiplierKind::bracket_power;
  s.exponent = exponent;
  return s;
}

MultiplierSpec MultiplierSpec::custom(std::function<double(std::span<const double>)> rule) {
  MultiplierSpec s;
  s.kind = MultiplierKind::custom;
  s.rule = std::move(rule);
  return s;
}

void MultiplierSpec::validate() const {
  switch (kind) {
    case MultiplierKind::F_sigma:
      if (!(sigma > 0.0) || sigma > 1.0 || (sigma == 1.0 && !allow_sigma_one))
        throw InvalidArgument("F_sigma requires 0 < sigma < 1 (sigma = 1 only in comparison mode), got sigma = " +
                              std::to_string(sigma));
      cutoff.validate();
      break;
    case MultiplierKind::abs_power:
    case MultiplierKind::bracket_power:
      if (!std::isfinite(exponent)) throw InvalidArgument("multiplier exponent must be finite");
      break;
    case MultiplierKind::custom:
      if (!rule) throw InvalidArgument("custom multiplier has no rule");
      break;
  }
}

double F_radial(double r, double sigma, const CutoffSpec& cutoff) {
  if (r == 0.0) return 0.0;
  const double w = cutoff(r);
  return std::pow(r, 2.0 * sigma) * w + r * r * (1.0 - w);
}

double MultiplierSpec::operator()(std::span<const double> zeta) const {
  double r2 = 0.0;
  for (double z : zeta) r2 += z * z;
  const double r = std::sqrt(r2);
  switch (kind) {
    case MultiplierKind::F_sigma: return F_radial(r, sigma, cutoff);
    case MultiplierKind::abs_power: return r == 0.0 ? (exponent == 0.0 ? 1.0 : 0.0) : std::pow(r, exponent);
    case MultiplierKind::bracket_power: return std::pow(1.0 + r2, 0.5 * exponent);
    case MultiplierKind::custom: return rule(zeta);
  }
  return 0.0;
}

double eval_F(const MultiplierSpec& spec, std::span<const double> eta) {
  if (spec.kind != MultiplierKind::F_sigma) throw InvalidArgument("eval_F needs an F_sigma spec");
  return spec(eta);
}

SampledField apply_multiplier(const SampledField& field, const MultiplierSpec& spec,
                              std::span<const std::size_t> axes) {
  spec.validate();
  return apply_fourier_multiplier(field, axes, [&](std::span<const double> z) { return cplx(spec(z), 0.0); });
}

double gain_exponent(double sigma) { return 2.0 * sigma / (2.0 * sigma + 1.0); }

SampledField lhs_weight(const SampledField& field, double sigma) {
  if (!(sigma > 0.0) || sigma > 1.0) throw InvalidArgument("lhs_weight requires 0 < sigma <= 1");
  const std::size_t axes[] = {field.axis_index(AxisLabel::t), field.axis_index(AxisLabel::x),
                              field.axis_index(AxisLabel::v)};
  const double delta = gain_exponent(sigma);
  return apply_fourier_multiplier(field, axes, [&](std::span<const double> z) {
    return cplx(1.0 + std::pow(std::abs(z[0]), delta) + std::pow(std::abs(z[1]), delta) +
                    std::pow(std::abs(z[2]), 2.0 * sigma),
                0.0);
  });
}

double comparison_constant(double sigma, const CutoffSpec& cutoff, int samples) {
  auto gap = [&](double r) { return std::pow(r, 2.0 * sigma) - F_radial(r, sigma, cutoff); };
  const double dr = cutoff.outer_radius / (samples - 1);
  double best = 0.0, arg = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double r = dr * i;
    if (gap(r) > best) best = gap(r), arg = r;
  }
  // Golden-section polish around the best sample.
  double lo = std::max(0.0, arg - dr), hi = std::min(cutoff.outer_radius, arg + dr);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (gap(a) > gap(b)) hi = b;
    else lo = a;
  }
  return std::max(best, gap(0.5 * (lo + hi)));
}

}  // namespace hypokit
