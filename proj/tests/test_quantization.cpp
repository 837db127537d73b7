#include <doctest.h>

#include <cmath>

#include "hypokit/errors.hpp"
#include "hypokit/quantization.hpp"
#include "hypokit/random.hpp"
#include "oracles.hpp"

using namespace hypokit;
using oracle::pi;

namespace {

const Axis kX = make_axis(AxisLabel::x, 32, 8.0);

SampledField noise(const std::vector<Axis>& axes, std::uint64_t seed) {
  Rng rng(seed);
  SampledField u(axes);
  for (auto& v : u.values()) v = {rng.normal(), rng.normal()};
  return u;
}

SampledField centred_gaussian(const Axis& ax, double width = 1.0, double shift = 0.0) {
  return make_field({ax}, [=](std::span<const double> z) { return cplx(std::exp(-pi * std::pow((z[0] - shift) / width, 2))); });
}

std::size_t phase_index(const WavePacketFrame& f, double y, double eta) {
  for (std::size_t i = 0; i < f.phase_size(); ++i) {
    const auto X = f.phase_point(i);
    if (std::abs(X[0] - y) < 1e-12 && std::abs(X[1] - eta) < 1e-12) return i;
  }
  FAIL("phase point not on the lattice");
  return 0;
}

// Lattice inner product with the cell weight dy * deta.
cplx phase_inner(const WavePacketFrame& f, const SampledField& a, const SampledField& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s * f.cell_weight();
}

}  // namespace

TEST_CASE("frame construction") {
  const WavePacketFrame f({kX}, 1.0);
  CHECK(f.dim() == 1);
  CHECK(f.phase_size() == 32 * 32);
  CHECK(f.oversampling() == doctest::Approx(32.0));
  CHECK(f.cell_weight() == doctest::Approx(0.25 * 0.125));
  CHECK(f.phase_axes()[1].label == AxisLabel::xi1);
  for (double lam : {0.25, 0.5, 1.0})
    CHECK(WavePacketFrame({kX}, lam).normalization() == doctest::Approx(std::pow(2 * lam, 0.25)).epsilon(1e-10));
  CHECK_THROWS_AS(WavePacketFrame({kX}, 1.5), InvalidArgument);
  CHECK_THROWS_AS(WavePacketFrame({kX}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(WavePacketFrame({kX}, 1.0, 3), InvalidArgument);
  CHECK_THROWS_AS(WavePacketFrame({kX}, 1.0, 4, 8), InvalidArgument);  // dy deta = 1 > 1/4
  CHECK_NOTHROW(WavePacketFrame({kX}, 1.0, 2, 2));
}

TEST_CASE("transform against direct packet sums") {
  const double lam = 0.5;
  const WavePacketFrame f({kX}, lam);
  const SampledField u = noise({kX}, 3);
  const SampledField Wu = f.transform(u);
  // Independent packet: c sum_m exp(-pi lam (x - y + mL)^2) e^{2 i pi (x - y) eta}, unit discrete norm.
  const auto z = oracle::nodes(32, 8.0);
  const double h = 0.25;
  auto packet = [&](double y, double eta) {
    std::vector<cplx> p(32);
    double nn = 0;
    for (int j = 0; j < 32; ++j) {
      double g = 0;
      for (int m = -3; m <= 3; ++m) g += std::exp(-pi * lam * std::pow(z[j] - y + m * 8.0, 2));
      p[j] = g * std::polar(1.0, 2 * pi * (z[j] - y) * eta);
      nn += g * g * h;
    }
    for (auto& v : p) v /= std::sqrt(nn);
    return p;
  };
  double err = 0;
  for (std::size_t i = 0; i < f.phase_size(); i += 37) {
    const auto X = f.phase_point(i);
    const auto p = packet(X[0], X[1]);
    cplx ref{};
    for (int j = 0; j < 32; ++j) ref += u[j] * std::conj(p[j]) * h;
    err = std::max(err, std::abs(Wu[i] - ref));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("reproducing property and covariance") {
  const WavePacketFrame f({kX}, 1.0);
  const std::size_t o = phase_index(f, 0.0, 0.0);
  const SampledField phi = f.packet(o);
  CHECK(norm_l2(phi) == doctest::Approx(1.0).epsilon(1e-12));
  const SampledField Wphi = f.transform(phi);
  std::size_t best = 0;
  for (std::size_t i = 0; i < Wphi.size(); ++i)
    if (std::abs(Wphi[i]) > std::abs(Wphi[best])) best = i;
  CHECK(best == o);
  CHECK(std::abs(Wphi[o]) == doctest::Approx(1.0).epsilon(1e-8));

  // Shifting u by whole cells shifts |Wu| along y.
  const int cells = 3;
  const SampledField u = centred_gaussian(kX, 1.0, 0.3);
  const SampledField us = centred_gaussian(kX, 1.0, 0.3 + cells * kX.spacing());
  const SampledField a = f.transform(u), b = f.transform(us);
  double err = 0;
  for (int iy = 0; iy + cells < 32; ++iy)
    for (int ie = 0; ie < 32; ++ie)
      err = std::max(err, std::abs(std::abs(b[(iy + cells) * 32 + ie]) - std::abs(a[iy * 32 + ie])));
  CHECK(err < 1e-8);
}

TEST_CASE("isometry and adjoint (property)") {
  for (double lam : {0.25, 0.5, 1.0}) {
    const WavePacketFrame f({kX}, lam);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const SampledField u = noise({kX}, seed);
      const SampledField Wu = f.transform(u);
      CHECK(std::abs(std::sqrt(phase_inner(f, Wu, Wu).real()) - norm_l2(u)) <= 1e-6 * norm_l2(u));
      CHECK(norm_l2(f.adjoint(Wu) - u) <= 1e-6 * norm_l2(u));
      const SampledField v = noise(f.phase_axes(), seed + 10);
      CHECK(std::abs(phase_inner(f, Wu, v) - inner(u, f.adjoint(v))) <= 1e-12 * norm_l2(u) * norm_l2(v) * 1e2);
    }
  }
  const WavePacketFrame f({kX}, 1.0);
  SampledField delta(f.phase_axes());
  const std::size_t k = phase_index(f, 1.0, -0.5);
  delta[k] = 1.0;
  CHECK(norm_l2(f.adjoint(delta) - cplx(f.cell_weight()) * f.packet(k)) < 1e-14);
  CHECK_THROWS_AS(f.transform(SampledField({make_axis(AxisLabel::x, 16, 8.0)})), AxisMismatch);
}

TEST_CASE("two-dimensional frame is tight") {
  const std::vector<Axis> ax = {make_axis(AxisLabel::x1, 16, 6.0), make_axis(AxisLabel::x2, 16, 6.0)};
  const WavePacketFrame f(ax, 0.5);
  CHECK(f.phase_axes().size() == 4);
  const SampledField u = noise(ax, 8);
  CHECK(norm_l2(f.adjoint(f.transform(u)) - u) < 1e-10 * norm_l2(u));
}

TEST_CASE("Wick quantization") {
  const WavePacketFrame f({kX}, 0.5);
  const SampledField u = noise({kX}, 21);
  const PhaseSymbol one{[](std::span<const double>) { return 1.0; }};
  CHECK(norm_l2(wick_apply(one, u, f) - u) <= 1e-6 * norm_l2(u));

  SUBCASE("positive and bounded (property)") {
    Rng rng(99);
    for (int k = 0; k < 50; ++k) {
      const double y0 = rng.uniform(-2, 2), e0 = rng.uniform(-1, 1), s = rng.uniform(0.3, 2.0);
      const PhaseSymbol a{[=](std::span<const double> X) {
        return std::exp(-pi * (std::pow(X[0] - y0, 2) + std::pow(X[1] - e0, 2)) / s);
      }};
      for (int j = 0; j < 20; ++j) {
        const SampledField w = noise({kX}, 1000 + 20 * k + j);
        const SampledField aw = wick_apply(a, w, f);
        CHECK(inner(aw, w).real() >= -1e-6 * std::pow(norm_l2(w), 2));
        CHECK(norm_l2(aw) <= (1.0 + 1e-6) * norm_l2(w));
      }
    }
  }
  SUBCASE("real symbols give self-adjoint operators") {
    const PhaseSymbol a{[](std::span<const double> X) { return std::sin(X[0]) * X[1]; }};
    const SampledField w = noise({kX}, 22);
    CHECK(std::abs(inner(wick_apply(a, u, f), w) - inner(u, wick_apply(a, w, f))) < 1e-12 * norm_l2(u) * norm_l2(w) * 1e2);
  }
}

TEST_CASE("Weyl quantization") {
  const Axis ax = make_axis(AxisLabel::x, 16, 4.0);
  const SampledField u = noise({ax}, 5);
  SUBCASE("dense kernel against the direct triple sum") {
    const PhaseSymbol a{[](std::span<const double> X) { return std::cos(X[0]) * (1 + X[1] * X[1]) + X[0] * X[1]; }};
    const int N = 16;
    const double h = 0.25;
    std::vector<cplx> ref(N);
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) {
        const double mid = (0.5 * (j + l) - N / 2) * h;
        cplx g{};
        for (int k = 0; k < N; ++k) {
          const double X[] = {mid, oracle::freq(k, N, 4.0)};
          g += std::polar(1.0, 2 * pi * (j - l) * k / double(N)) * a(X);
        }
        ref[j] += g / double(N) * u[l];
      }
    const SampledField w = weyl_apply(a, u);
    for (int j = 0; j < N; ++j) CHECK(std::abs(w[j] - ref[j]) < 1e-12);
  }
  SUBCASE("x-only symbols multiply") {
    const PhaseSymbol a{[](std::span<const double> X) { return std::exp(-X[0] * X[0]) + X[0]; }};
    const SampledField ref = multiply_by(u, [](std::span<const double> z) { return std::exp(-z[0] * z[0]) + z[0]; });
    CHECK(norm_l2(weyl_apply(a, u) - ref) < 1e-10 * norm_l2(u));
  }
  SUBCASE("xi is the spectral derivative") {
    const Axis big = make_axis(AxisLabel::x, 64, 8.0);
    const SampledField g = centred_gaussian(big);
    const PhaseSymbol xi{[](std::span<const double> X) { return X[1]; }};
    const SampledField d = cplx(0, -1 / (2 * pi)) * derivative(g, 0);
    CHECK(norm_l2(weyl_apply(xi, g) - d) < 1e-8 * norm_l2(d));
  }
  SUBCASE("real symbols give Hermitian kernels") {
    const PhaseSymbol a{[](std::span<const double> X) { return std::sin(X[0] * X[1]) + X[0]; }};
    const WeylOperator op(a, {ax});
    CHECK((op.matrix() - op.matrix().adjoint()).norm() <= 1e-8 * op.matrix().norm());
  }
  SUBCASE("two dimensions") {
    const std::vector<Axis> ax2 = {make_axis(AxisLabel::x1, 16, 4.0), make_axis(AxisLabel::x2, 16, 4.0)};
    const SampledField g = make_field(ax2, [](std::span<const double> z) { return cplx(std::exp(-pi * (z[0] * z[0] + 2 * z[1] * z[1]))); });
    const PhaseSymbol a{[](std::span<const double> X) { return X[0] + X[3]; }};
    SampledField ref = cplx(0, -1 / (2 * pi)) * derivative(g, 1);
    ref += multiply_by(g, [](std::span<const double> z) { return z[0]; });
    CHECK(norm_l2(weyl_apply(a, g) - ref) < 1e-8 * norm_l2(ref));
  }
  SUBCASE("memory guard") {
    const PhaseSymbol a{[](std::span<const double>) { return 1.0; }};
    CHECK_THROWS_AS(WeylOperator(a, {ax}, 1024), ResourceGuard);
    const WavePacketFrame f({kX}, 1.0);
    CHECK_THROWS_AS(projection_matrix(f, 1024), ResourceGuard);
  }
}

TEST_CASE("Gaussian smoothing of symbols") {
  for (double lam : {0.25, 0.5, 1.0}) {
    const WavePacketFrame f({kX}, lam);
    const PhaseSymbol one{[](std::span<const double>) { return 1.0; }};
    const PhaseSymbol lin{[](std::span<const double> X) { return 0.3 - 2 * X[0] + 0.7 * X[1]; }};
    const PhaseSymbol y2{[](std::span<const double> X) { return X[0] * X[0]; }};
    const PhaseSymbol e2{[](std::span<const double> X) { return X[1] * X[1]; }};
    const auto s1 = wick_via_weyl(one, f), sl = wick_via_weyl(lin, f), sy = wick_via_weyl(y2, f), se = wick_via_weyl(e2, f);
    for (double x : {-1.0, 0.0, 0.4})
      for (double e : {-0.6, 0.0, 2.0}) {
        const double X[] = {x, e};
        CHECK(s1(X) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sl(X) == doctest::Approx(lin(X)).epsilon(1e-12));
        CHECK(sy(X) == doctest::Approx(x * x + 1 / (4 * pi * lam)).epsilon(1e-10));
        CHECK(se(X) == doctest::Approx(e * e + lam / (4 * pi)).epsilon(1e-10));
      }
  }
  // In two dimensions the constants add per axis.
  const std::vector<Axis> ax2 = {make_axis(AxisLabel::x1, 16, 6.0), make_axis(AxisLabel::x2, 16, 6.0)};
  const WavePacketFrame f2(ax2, 0.5);
  const PhaseSymbol r2{[](std::span<const double> X) { return X[0] * X[0] + X[1] * X[1]; }};
  const double X[] = {0.5, -1.0, 0.2, 0.1};
  CHECK(wick_via_weyl(r2, f2)(X) == doctest::Approx(1.25 + 2 / (4 * pi * 0.5)).epsilon(1e-10));
}

TEST_CASE("Wick equals Weyl of the smoothed symbol") {
  const Axis ax = make_axis(AxisLabel::x, 64, 8.0);
  const SampledField u = centred_gaussian(ax);
  for (double lam : {0.5, 1.0}) {
    const WavePacketFrame f({ax}, lam);
    const PhaseSymbol gauss{[](std::span<const double> X) { return std::exp(-pi * (X[0] * X[0] + X[1] * X[1])); }};
    const PhaseSymbol poly{[](std::span<const double> X) { return X[0] * X[0] - 0.5 * X[1] + X[1] * X[1]; }};
    const PhaseSymbol affine{[](std::span<const double> X) { return 1 - X[0] + 2 * X[1]; }};
    for (const auto* a : {&gauss, &poly}) {
      const SampledField lhs = wick_apply(*a, u, f);
      const SampledField rhs = weyl_apply(wick_via_weyl(*a, f), u);
      CHECK(norm_l2(lhs - rhs) <= 2e-6 * norm_l2(u));
    }
    CHECK(norm_l2(wick_apply(affine, u, f) - weyl_apply(affine, u)) <= 1e-6 * norm_l2(u));
  }
}

TEST_CASE("projection kernel") {
  const WavePacketFrame f({kX}, 0.5);
  const double X[] = {0.5, -1.0}, Y[] = {-0.25, 0.75};
  CHECK(std::abs(projection_kernel(f, X, X) - 1.0) < 1e-15);
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const double A[] = {rng.uniform(-3, 3), rng.uniform(-2, 2)}, B[] = {rng.uniform(-3, 3), rng.uniform(-2, 2)};
    const double gamma = 0.5 * std::pow(A[0] - B[0], 2) + std::pow(A[1] - B[1], 2) / 0.5;
    CHECK(std::abs(projection_kernel(f, A, B)) == doctest::Approx(std::exp(-pi / 2 * gamma)).epsilon(1e-13));
  }
  CHECK(std::abs(periodized_projection_kernel(f, X, Y) - projection_kernel(f, X, Y)) < 1e-6);

  const Eigen::MatrixXcd K = projection_matrix(f);
  for (std::size_t i = 0; i < f.phase_size(); i += 101)
    for (std::size_t j = 0; j < f.phase_size(); j += 89) {
      const cplx direct = inner(f.packet(j), f.packet(i));
      CHECK(std::abs(K(i, j) - direct) < 1e-12);
      CHECK(std::abs(K(i, j) - periodized_projection_kernel(f, f.phase_point(i), f.phase_point(j))) < 1e-6);
    }

  const EstimateReport rep = verify_projection(f);
  CHECK(rep.metrics.at("idempotence_defect") <= 1e-5);
  CHECK(rep.metrics.at("selfadjoint_defect") <= 1e-5);
  CHECK(rep.metrics.at("kernel_error") <= 1e-6);
  // The trace of an orthogonal projector onto the 32-dimensional base space.
  CHECK(rep.metrics.at("trace") == doctest::Approx(32.0).epsilon(1e-8));

  // pi W = W.
  const SampledField u = noise({kX}, 2);
  const SampledField Wu = f.transform(u);
  Eigen::VectorXcd w(Wu.size());
  for (std::size_t i = 0; i < Wu.size(); ++i) w(i) = Wu[i];
  // (pi v)(X) = cw sum_Y K(X, Y) v(Y) with K(X, Y) = (phi_Y, phi_X).
  const Eigen::VectorXcd pw = f.cell_weight() * (K * w);
  CHECK((pw - w).norm() <= 1e-6 * w.norm());
}

TEST_CASE("operator norm by power iteration") {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(4, 4);
  A(0, 0) = 3.0;
  A(1, 2) = cplx(0, -5.0);
  A(3, 3) = 1.0;
  CHECK(operator_norm(A) == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(operator_norm(Eigen::MatrixXcd::Zero(3, 3)) == 0.0);
}
