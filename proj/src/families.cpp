#include <gsl/gsl_fit.h>

#include <algorithm>
#include <cmath>

#include "hypokit/errors.hpp"
#include "hypokit/estimates.hpp"
#include "hypokit/multipliers.hpp"
#include "hypokit/random.hpp"

namespace hypokit {

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::gaussian_pack: return "gaussian_pack";
    case FamilyKind::modulated_gaussian: return "modulated_gaussian";
    case FamilyKind::rough_besov: return "rough_besov";
    case FamilyKind::random_bandlimited: return "random_bandlimited";
  }
  return "?";
}

FamilyKind parse_family_kind(const std::string& name) {
  for (auto k : {FamilyKind::gaussian_pack, FamilyKind::modulated_gaussian, FamilyKind::rough_besov,
                 FamilyKind::random_bandlimited})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown test family '" + name + "'");
}

void TestFamily::validate() const {
  if (count < 1) throw InvalidArgument("test family count must be positive");
  if (!(support_T > 0.0)) throw InvalidArgument("test family support_T must be positive");
}

double time_bump(double t, double T) {
  const double s = t / T;
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

namespace {

// 1 for |z| <= 0.2 L, 0 beyond 0.4 L.
double space_window(double z, double L) {
  const double r = std::abs(z) / L;
  return 1.0 - smooth_step((r - 0.2) / 0.2);
}

cplx complex_normal(Rng& rng) {
  const double re = rng.normal();
  const double im = rng.normal();
  return {re, im};
}

struct Bump {
  std::vector<double> center, width;
  cplx amplitude;
};

Bump random_bump(Rng& rng, const std::vector<Axis>& axes) {
  Bump b;
  for (std::size_t a = 1; a < axes.size(); ++a) {
    const double L = axes[a].length;
    const double wmin = std::max(L / 12.0, 4.0 * axes[a].spacing());
    const double wmax = std::max(L / 7.0, 1.25 * wmin);
    b.center.push_back(rng.uniform(-L / 6.0, L / 6.0));
    b.width.push_back(rng.uniform(wmin, wmax));
  }
  b.amplitude = complex_normal(rng);
  return b;
}

double gauss(const Bump& b, std::span<const double> z) {
  double e = 0.0;
  for (std::size_t a = 0; a < b.center.size(); ++a) {
    const double d = (z[a + 1] - b.center[a]) / b.width[a];
    e += d * d;
  }
  return std::exp(-kPi * e);
}

// Random spectrum on the space axes, shaped by `profile(|zeta|)`, windowed.
SampledField random_spectral(Rng& rng, const std::vector<Axis>& axes, double T,
                             const std::function<double(std::span<const double>)>& profile) {
  std::vector<Axis> space(axes.begin() + 1, axes.end());
  Spectrum spec{FrequencyGrid{space}, {}};
  std::size_t n = 1;
  for (const auto& a : space) n *= a.points;
  spec.values.resize(n);
  for_each_frequency(space, [&](std::size_t i, std::span<const double> z) {
    spec.values[i] = complex_normal(rng) * profile(z);
  });
  const SampledField s = ifft(spec);
  return make_field(axes, [&](std::span<const double> z) {
    std::size_t flat = 0;
    double w = time_bump(z[0], T);
    for (std::size_t a = 1; a < axes.size(); ++a) {
      const int i = static_cast<int>(std::lround(z[a] / axes[a].spacing())) + axes[a].points / 2;
      flat = flat * axes[a].points + i;
      w *= space_window(z[a], axes[a].length);
    }
    return w * s[flat];
  });
}

}  // namespace

std::vector<SampledField> generate_family(const TestFamily& family, const std::vector<Axis>& axes) {
  family.validate();
  if (axes.empty() || axes[0].label != AxisLabel::t) throw AxisMismatch("test families need t as the first axis");
  if (axes.size() < 2) throw AxisMismatch("test families need at least one space axis");
  const double T = family.support_T;
  if (T >= 0.5 * axes[0].length) throw InvalidArgument("support_T must fit inside the t box");
  const Rng root(family.seed);
  std::vector<SampledField> out;
  for (int i = 0; i < family.count; ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    SampledField u;
    switch (family.kind) {
      case FamilyKind::gaussian_pack: {
        const int k = 1 + static_cast<int>(rng.next() % 3);
        std::vector<Bump> bumps;
        for (int j = 0; j < k; ++j) bumps.push_back(random_bump(rng, axes));
        u = make_field(axes, [&](std::span<const double> z) {
          cplx v{};
          for (const auto& b : bumps) v += b.amplitude * gauss(b, z);
          return time_bump(z[0], T) * v;
        });
        break;
      }
      case FamilyKind::modulated_gaussian: {
        const Bump b = random_bump(rng, axes);
        std::vector<double> freq;
        for (const auto& a : axes) {
          const double nyq = a.points / (2.0 * a.length);
          freq.push_back(rng.uniform(-0.5 * nyq, 0.5 * nyq));
        }
        u = make_field(axes, [&](std::span<const double> z) {
          double phase = 0.0;
          for (std::size_t a = 0; a < z.size(); ++a) phase += freq[a] * z[a];
          return time_bump(z[0], T) * b.amplitude * gauss(b, z) * std::polar(1.0, 2.0 * kPi * phase);
        });
        break;
      }
      case FamilyKind::rough_besov:
        u = random_spectral(rng, axes, T, [](std::span<const double> z) {
          double r2 = 0.0;
          for (double x : z) r2 += x * x;
          return std::pow(1.0 + std::sqrt(r2), -1.1);
        });
        break;
      case FamilyKind::random_bandlimited:
        u = random_spectral(rng, axes, T, [&](std::span<const double> z) {
          for (std::size_t a = 0; a < z.size(); ++a)
            if (std::abs(z[a]) > axes[a + 1].points / (8.0 * axes[a + 1].length)) return 0.0;
          return 1.0;
        });
        break;
    }
    const double n = norm_l2(u);
    if (!(n > 0.0)) throw Error("generated a zero test field");
    u *= cplx(1.0 / n);
    out.push_back(std::move(u));
  }
  return out;
}

double exterior_time_mass(const SampledField& u, double T) {
  const std::size_t it = u.axis_index(AxisLabel::t);
  double outside = 0.0, total = 0.0;
  for_each_node(u.axes(), [&](std::size_t i, std::span<const double> z) {
    const double m = std::norm(u[i]);
    total += m;
    if (std::abs(z[it]) > T) outside += m;
  });
  return total > 0.0 ? outside / total : 0.0;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope fit needs at least two matching points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("slope fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  double c0, c1, cov00, cov01, cov11, sumsq;
  gsl_fit_linear(lx.data(), 1, ly.data(), 1, lx.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
  return c1;
}

std::vector<LemmaPoint> sample_lemma_points(std::uint64_t seed, int count, double x1_max) {
  if (count < 1 || !(x1_max > 1e-2)) throw InvalidArgument("lemma sampling needs count >= 1 and x1_max > 0.01");
  Rng rng(seed);
  std::vector<LemmaPoint> pts;
  const double lo = std::log(1e-2), hi = std::log(x1_max);
  for (int i = 0; i < count; ++i) {
    LemmaPoint p;
    const double mag = std::exp(rng.uniform(lo, hi));
    p.x1 = rng.uniform() < 0.5 ? -mag : mag;
    p.x2 = rng.uniform(-20.0, 20.0);
    p.xi1 = rng.uniform(-5.0, 5.0);
    p.xi2 = rng.uniform(-5.0, 5.0);
    pts.push_back(p);
  }
  return pts;
}

std::vector<SampledField> lemma_profiles(const Axis& t_axis, std::uint64_t seed, int count, double T) {
  if (t_axis.label != AxisLabel::t) throw AxisMismatch("lemma profiles live on a t axis");
  if (T >= 0.5 * t_axis.length) throw InvalidArgument("support_T must fit inside the t box");
  const Rng root(seed);
  std::vector<SampledField> out;
  for (int i = 0; i < count; ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    const double c = rng.uniform(-0.5 * T, 0.5 * T);
    const double w = rng.uniform(0.2 * T, T);
    const double tau = rng.uniform(-3.0, 3.0);
    SampledField u = make_field({t_axis}, [&](std::span<const double> z) {
      const double d = (z[0] - c) / w;
      return time_bump(z[0], T) * std::exp(-kPi * d * d) * std::polar(1.0, 2.0 * kPi * tau * z[0]);
    });
    u *= cplx(1.0 / norm_l2(u));
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace hypokit
