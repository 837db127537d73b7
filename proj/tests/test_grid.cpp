#include <doctest.h>

#include <cmath>

#include "hypokit/errors.hpp"
#include "hypokit/grid.hpp"
#include "hypokit/random.hpp"
#include "oracles.hpp"

using namespace hypokit;

namespace {

SampledField noise(const std::vector<Axis>& axes, std::uint64_t seed) {
  Rng rng(seed);
  SampledField u(axes);
  for (auto& v : u.values()) v = {rng.normal(), rng.normal()};
  return u;
}

std::vector<Axis> axes3() {
  return {make_axis(AxisLabel::t, 16, 2.0), make_axis(AxisLabel::x, 24, 3.0), make_axis(AxisLabel::v, 10, 1.5)};
}

}  // namespace

TEST_CASE("axis validation") {
  CHECK_THROWS_AS(make_axis(AxisLabel::x, 7, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_axis(AxisLabel::x, 6, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_axis(AxisLabel::x, 14, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_axis(AxisLabel::x, 16, 0.0), InvalidArgument);
  CHECK_NOTHROW(make_axis(AxisLabel::x, 24, 1.0));
  CHECK_NOTHROW(make_axis(AxisLabel::x, 250, 1.0));
  const Axis a = make_axis(AxisLabel::x, 8, 4.0);
  CHECK(a.coordinate(0) == doctest::Approx(-2.0));
  CHECK(a.coordinate(4) == 0.0);
  CHECK(a.frequency(4) == doctest::Approx(-1.0));
  CHECK(a.frequency(3) == doctest::Approx(0.75));
  CHECK(parse_axis_label("xi2") == AxisLabel::xi2);
  CHECK_THROWS_AS(parse_axis_label("w"), InvalidArgument);
}

TEST_CASE("make_field") {
  const auto x = make_axis(AxisLabel::x, 16, 1.0);
  const SampledField one = make_field({x}, [](std::span<const double>) { return cplx(1.0); });
  for (auto v : one.values()) CHECK(v == cplx(1.0));
  CHECK_THROWS_AS(SampledField({x, x, x, x, x}), InvalidArgument);
  CHECK_THROWS_AS(SampledField({x}, std::vector<cplx>(3)), InvalidArgument);

  // Gaussian on L = 16, 64 points: the discrete norm is 2^{-1/4} per axis.
  const auto g = make_axis(AxisLabel::x, 64, 16.0);
  const auto gauss = [](std::span<const double> z) {
    double r2 = 0;
    for (double c : z) r2 += c * c;
    return cplx(std::exp(-oracle::pi * r2));
  };
  CHECK(norm_l2(make_field({g}, gauss)) == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-10));
  const double quad = std::sqrt(oracle::trapezoid([](double z) { return std::exp(-2 * oracle::pi * z * z); }, -8, 8, 20000));
  CHECK(norm_l2(make_field({g, g}, gauss)) == doctest::Approx(quad * quad).epsilon(1e-10));
}

TEST_CASE("fft conventions") {
  const auto x = make_axis(AxisLabel::x, 16, 2.0);
  SUBCASE("plane wave has one bin") {
    const int k = 3;
    const SampledField u =
        make_field({x}, [&](std::span<const double> z) { return std::polar(1.0, 2 * oracle::pi * k * z[0] / 2.0); });
    const Spectrum s = fft(u);
    for (int i = 0; i < 16; ++i) CHECK(std::abs(s.values[i]) == doctest::Approx(i == k ? 2.0 : 0.0).epsilon(1e-12));
  }
  SUBCASE("delta at node 0") {
    SampledField u({x});
    u[8] = 1.0 / x.spacing();  // unit mass at z = 0
    for (auto v : fft(u).values) CHECK(std::abs(v - cplx(1.0)) < 1e-13);
    SampledField d({x});
    d[8] = 1.0;
    const double n = std::sqrt(x.spacing() * x.spacing());
    for (auto v : fft(d).values) CHECK(std::abs(v) == doctest::Approx(n));
  }
  SUBCASE("matches the direct sum") {
    const SampledField u = noise({x}, 5);
    const auto ref = oracle::direct_spectrum({u.values().begin(), u.values().end()}, 2.0);
    const Spectrum s = fft(u);
    for (int k = 0; k < 16; ++k) CHECK(std::abs(s.values[k] - ref[k]) < 1e-12);
  }
  SUBCASE("real even field gives a real even spectrum") {
    const auto y = make_axis(AxisLabel::v, 12, 3.0);
    const SampledField u =
        make_field({x, y}, [](std::span<const double> z) { return cplx(std::cos(z[0]) * std::exp(-z[1] * z[1])); });
    const Spectrum s = fft(u);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 12; ++j) {
        const cplx v = s.values[i * 12 + j];
        CHECK(std::abs(v.imag()) < 1e-10);
        // The Nyquist bin sits at the box edge, where an even field loses its mirror node.
        if (i != 8 && j != 6) CHECK(std::abs(v - s.values[((16 - i) % 16) * 12 + (12 - j) % 12]) < 1e-10);
      }
  }
}

TEST_CASE("Parseval and round trip (property)") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SampledField u = noise(axes3(), seed);
    const double n = norm_l2(u);
    CHECK(std::abs(norm_l2(fft(u)) - n) <= 1e-12 * n);
    CHECK(norm_l2(ifft(fft(u)) - u) <= 1e-12 * n);
  }
}

TEST_CASE("linearity of fft and inner (property)") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SampledField u = noise(axes3(), seed), v = noise(axes3(), seed + 100), w = noise(axes3(), seed + 200);
    const cplx a(0.3, -1.2), b(-2.0, 0.5);
    const Spectrum lhs = fft(a * u + b * v);
    const Spectrum fu = fft(u), fv = fft(v);
    double err = 0, ref = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      err += std::norm(lhs.values[i] - (a * fu.values[i] + b * fv.values[i]));
      ref += std::norm(lhs.values[i]);
    }
    CHECK(std::sqrt(err) <= 1e-13 * std::sqrt(ref));
    const cplx ip = inner(a * u + b * v, w);
    CHECK(std::abs(ip - (a * inner(u, w) + b * inner(v, w))) <= 1e-12 * norm_l2(w) * (norm_l2(u) + norm_l2(v)) * 3);
  }
}

TEST_CASE("inner product") {
  const auto x = make_axis(AxisLabel::x, 32, 4.0);
  const auto wave = [&](int k) {
    return make_field({x}, [=](std::span<const double> z) { return std::polar(1.0, 2 * oracle::pi * k * z[0] / 4.0); });
  };
  CHECK(std::abs(inner(wave(2), wave(5))) < 1e-12);
  const SampledField u = noise({x}, 3);
  const cplx uu = inner(u, u);
  CHECK(std::abs(uu.imag()) < 1e-14);
  CHECK(uu.real() == doctest::Approx(norm_l2(u) * norm_l2(u)).epsilon(1e-13));

  // Offset Gaussians against quadrature of the continuum integral.
  const auto g = make_axis(AxisLabel::x, 128, 12.0);
  const SampledField a = make_field({g}, [](std::span<const double> z) { return cplx(std::exp(-oracle::pi * z[0] * z[0])); });
  const SampledField b =
      make_field({g}, [](std::span<const double> z) { return cplx(std::exp(-oracle::pi * std::pow(z[0] - 0.7, 2) / 2)); });
  const double ref = oracle::trapezoid(
      [](double z) { return std::exp(-oracle::pi * z * z) * std::exp(-oracle::pi * std::pow(z - 0.7, 2) / 2); }, -6, 6,
      40000);
  CHECK(std::abs(inner(a, b) - cplx(ref)) < 1e-8);
  CHECK_THROWS_AS(inner(a, u), AxisMismatch);
}

TEST_CASE("sobolev_norm") {
  const auto x = make_axis(AxisLabel::x, 32, 4.0);
  const SampledField u = noise({x}, 9);
  CHECK(sobolev_norm(u, 0.0) == doctest::Approx(norm_l2(u)).epsilon(1e-14));
  const int k = 5;
  const SampledField w = make_field({x}, [&](std::span<const double> z) { return std::polar(1.0, 2 * oracle::pi * k * z[0] / 4.0); });
  const double zeta = k / 4.0;
  CHECK(sobolev_norm(w, 0.8) == doctest::Approx(std::pow(1 + zeta * zeta, 0.4) * norm_l2(w)).epsilon(1e-12));

  // s = 1 on a Gaussian: ||u||^2 + ||u'||^2 / (4 pi^2) from the closed-form derivative.
  const auto g = make_axis(AxisLabel::x, 128, 12.0);
  const SampledField G = make_field({g}, [](std::span<const double> z) { return cplx(std::exp(-oracle::pi * z[0] * z[0])); });
  const double u2 = oracle::trapezoid([](double z) { return std::exp(-2 * oracle::pi * z * z); }, -6, 6, 40000);
  const double d2 = oracle::trapezoid(
      [](double z) { return std::pow(2 * oracle::pi * z, 2) * std::exp(-2 * oracle::pi * z * z); }, -6, 6, 40000);
  CHECK(sobolev_norm(G, 1.0) == doctest::Approx(std::sqrt(u2 + d2 / (4 * oracle::pi * oracle::pi))).epsilon(1e-8));

  const std::size_t only_x[] = {1};
  const SampledField f = noise(axes3(), 4);
  CHECK(sobolev_norm(f, 0.5, only_x) < sobolev_norm(f, 0.5));
  const std::size_t bad[] = {3};
  CHECK_THROWS_AS(sobolev_norm(f, 0.5, bad), AxisMismatch);
}

TEST_CASE("sobolev_norm is monotone in s (property)") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SampledField u = noise(axes3(), seed);
    double prev = 0;
    for (double s = -1.0; s <= 2.0; s += 0.25) {
      const double v = sobolev_norm(u, s);
      CHECK(prev <= v * (1 + 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("fourier multipliers on axis subsets") {
  const auto ax = axes3();
  const SampledField u = noise(ax, 17);
  const std::size_t xv[] = {1, 2};
  const SampledField id = apply_fourier_multiplier(u, xv, [](std::span<const double>) { return cplx(1.0); });
  CHECK(norm_l2(id - u) < 1e-13 * norm_l2(u));

  // Along x only, compare with the O(N^2) oracle line by line.
  const std::size_t only_x[] = {1};
  const auto m = [](double z) { return cplx(1.0 + z * z, 0.3 * z); };
  const SampledField mu = apply_fourier_multiplier(u, only_x, [&](std::span<const double> z) { return m(z[0]); });
  double err = 0;
  for (int i = 0; i < 16; ++i)
    for (int k = 0; k < 10; ++k) {
      std::vector<cplx> line(24);
      for (int j = 0; j < 24; ++j) line[j] = u[(i * 24 + j) * 10 + k];
      const auto ref = oracle::direct_multiplier(line, 3.0, m);
      for (int j = 0; j < 24; ++j) err = std::max(err, std::abs(ref[j] - mu[(i * 24 + j) * 10 + k]));
    }
  CHECK(err < 1e-11);

  // Spectral derivative of a Gaussian.
  const auto g = make_axis(AxisLabel::x, 64, 8.0);
  const SampledField G = make_field({g}, [](std::span<const double> z) { return cplx(std::exp(-oracle::pi * z[0] * z[0])); });
  const SampledField dG = derivative(G, 0);
  double derr = 0;
  for_each_node({g}, [&](std::size_t i, std::span<const double> z) {
    derr = std::max(derr, std::abs(dG[i] - cplx(-2 * oracle::pi * z[0] * std::exp(-oracle::pi * z[0] * z[0]))));
  });
  CHECK(derr < 1e-10);
}
