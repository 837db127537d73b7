#pragma once

// Brute-force reference computations used as test oracles. Nothing here
// calls into FFTW; sums are written out directly.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

/// Composite trapezoid rule on [a, b] with n intervals.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

/// Nodes z_j = (j - N/2) h and signed frequencies k/L, N even.
inline std::vector<double> nodes(int N, double L) {
  std::vector<double> z(N);
  for (int j = 0; j < N; ++j) z[j] = (j - N / 2) * L / N;
  return z;
}
inline double freq(int k, int N, double L) { return (k < (N + 1) / 2 ? k : k - N) / L; }

/// Continuous transform h sum_j u_j exp(-2 i pi z_j zeta) evaluated directly.
inline std::vector<cplx> direct_spectrum(const std::vector<cplx>& u, double L) {
  const int N = static_cast<int>(u.size());
  const auto z = nodes(N, L);
  std::vector<cplx> out(N);
  for (int k = 0; k < N; ++k) {
    cplx s{};
    for (int j = 0; j < N; ++j) s += u[j] * std::polar(1.0, -2.0 * pi * z[j] * freq(k, N, L));
    out[k] = s * (L / N);
  }
  return out;
}

/// (m(D) u)_j = (1/L) sum_k m(zeta_k) u^(zeta_k) exp(2 i pi z_j zeta_k), O(N^2).
inline std::vector<cplx> direct_multiplier(const std::vector<cplx>& u, double L, const std::function<cplx(double)>& m) {
  const int N = static_cast<int>(u.size());
  const auto z = nodes(N, L);
  const auto U = direct_spectrum(u, L);
  std::vector<cplx> out(N);
  for (int j = 0; j < N; ++j) {
    cplx s{};
    for (int k = 0; k < N; ++k) s += m(freq(k, N, L)) * U[k] * std::polar(1.0, 2.0 * pi * z[j] * freq(k, N, L));
    out[j] = s / L;
  }
  return out;
}

/// Smooth step m(s) / (m(s) + m(1 - s)), m(s) = exp(-1/s).
inline double step(double s) {
  if (s <= 0) return 0;
  if (s >= 1) return 1;
  const double a = std::exp(-1 / s), b = std::exp(-1 / (1 - s));
  return a / (a + b);
}
inline double F(double r, double sigma) {
  const double w = step(r - 1.0);
  return std::pow(r, 2 * sigma) * w + r * r * (1 - w);
}

inline double l2(const std::vector<cplx>& v, double cell) {
  double s = 0;
  for (auto x : v) s += std::norm(x);
  return std::sqrt(s * cell);
}

}  // namespace oracle
