#include <algorithm>
#include <cmath>

#include "hypokit/errors.hpp"
#include "hypokit/parallel.hpp"
#include "hypokit/quantization.hpp"
#include "hypokit/random.hpp"

namespace hypokit {

namespace {

AxisLabel dual_label(std::size_t a) { return a == 0 ? AxisLabel::xi1 : AxisLabel::xi2; }

std::size_t product(const std::vector<int>& v) {
  std::size_t n = 1;
  for (int x : v) n *= static_cast<std::size_t>(x);
  return n;
}

// Row-major decomposition of a flat index.
void unflatten(std::size_t flat, const std::vector<int>& shape, std::vector<int>& idx) {
  idx.resize(shape.size());
  for (std::size_t a = shape.size(); a-- > 0;) {
    idx[a] = static_cast<int>(flat % shape[a]);
    flat /= shape[a];
  }
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Index and twiddle tables shared by transform and adjoint. tw[a] holds
// (-1)^k exp(sign 2 i pi y k / L) for every (y, eta) pair of axis a.
struct LatticeTables {
  std::size_t n = 0, n_base = 1, n_y = 1, n_eta = 1;
  std::vector<int> base_shape;
  std::vector<std::vector<int>> node_sub, y_sub, eta_sub;
  std::vector<std::size_t> eta_fft;
  std::vector<std::vector<cplx>> tw;
  std::vector<int> eta_points;

  LatticeTables(const std::vector<Axis>& base, const std::vector<Axis>& phase, int y_stride, int eta_stride,
                double sign) {
    n = base.size();
    std::vector<int> y_shape, eta_shape;
    for (const auto& a : base) base_shape.push_back(a.points);
    for (std::size_t a = 0; a < n; ++a) {
      y_shape.push_back(phase[a].points);
      eta_shape.push_back(phase[n + a].points);
    }
    n_base = product(base_shape);
    n_y = product(y_shape);
    n_eta = product(eta_shape);
    eta_points = eta_shape;
    std::vector<int> idx;
    node_sub.assign(n, std::vector<int>(n_base));
    for (std::size_t i = 0; i < n_base; ++i) {
      unflatten(i, base_shape, idx);
      for (std::size_t a = 0; a < n; ++a) node_sub[a][i] = idx[a];
    }
    y_sub.assign(n, std::vector<int>(n_y));
    for (std::size_t i = 0; i < n_y; ++i) {
      unflatten(i, y_shape, idx);
      for (std::size_t a = 0; a < n; ++a) y_sub[a][i] = idx[a];
    }
    eta_sub.assign(n, std::vector<int>(n_eta));
    eta_fft.assign(n_eta, 0);
    for (std::size_t i = 0; i < n_eta; ++i) {
      unflatten(i, eta_shape, idx);
      std::size_t flat = 0;
      for (std::size_t a = 0; a < n; ++a) {
        eta_sub[a][i] = idx[a];
        const int k = (idx[a] - eta_shape[a] / 2) * eta_stride;
        flat = flat * base_shape[a] + wrap(k, base_shape[a]);
      }
      eta_fft[i] = flat;
    }
    tw.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      tw[a].resize(static_cast<std::size_t>(y_shape[a]) * eta_shape[a]);
      for (int iy = 0; iy < y_shape[a]; ++iy)
        for (int ie = 0; ie < eta_shape[a]; ++ie) {
          const int k = (ie - eta_shape[a] / 2) * eta_stride;
          const double y = base[a].coordinate(iy * y_stride);
          const double par = (k & 1) ? -1.0 : 1.0;
          tw[a][static_cast<std::size_t>(iy) * eta_shape[a] + ie] =
              par * std::polar(1.0, sign * 2.0 * kPi * y * k / base[a].length);
        }
    }
  }

  cplx twiddle(std::size_t iy, std::size_t ie) const {
    cplx f = tw[0][static_cast<std::size_t>(y_sub[0][iy]) * eta_points[0] + eta_sub[0][ie]];
    for (std::size_t a = 1; a < n; ++a) f *= tw[a][static_cast<std::size_t>(y_sub[a][iy]) * eta_points[a] + eta_sub[a][ie]];
    return f;
  }
};

}  // namespace

WavePacketFrame::WavePacketFrame(std::vector<Axis> base_axes, double lambda, int y_stride, int eta_stride)
    : lambda_(lambda), y_stride_(y_stride), eta_stride_(eta_stride), base_(std::move(base_axes)) {
  if (base_.empty() || base_.size() > 2) throw InvalidArgument("wave-packet frames support 1 or 2 space axes");
  if (!(lambda_ > 0.0 && lambda_ <= 1.0))
    throw InvalidArgument("wave-packet lambda must lie in (0, 1], got " + std::to_string(lambda_));
  if (y_stride_ < 1 || eta_stride_ < 1) throw InvalidArgument("lattice strides must be positive");
  for (const auto& ax : base_) {
    if (ax.points % y_stride_ != 0 || ax.points % eta_stride_ != 0)
      throw InvalidArgument("lattice strides must divide the axis point count");
    const double cell = y_stride_ * ax.spacing() * eta_stride_ / ax.length;
    if (cell > 0.25 + 1e-15)
      throw InvalidArgument("phase lattice too coarse: dy * deta = " + std::to_string(cell) + " exceeds 1/4");
  }
  for (const auto& ax : base_) phase_.push_back(make_axis(ax.label, ax.points / y_stride_, ax.length));
  for (std::size_t a = 0; a < base_.size(); ++a) {
    const Axis& ax = base_[a];
    phase_.push_back(make_axis(dual_label(a), ax.points / eta_stride_, ax.points / ax.length));
  }

  for (const auto& ax : base_) {
    const int n = ax.points;
    const double h = ax.spacing();
    const double L = ax.length;
    const int images = static_cast<int>(std::ceil(std::sqrt(40.0 / (kPi * lambda_)) / L)) + 1;
    std::vector<double> g(n);
    double sum = 0.0;
    for (int d = 0; d < n; ++d) {
      double v = 0.0;
      for (int m = -images - 1; m <= images; ++m) {
        const double z = d * h + m * L;
        v += std::exp(-kPi * lambda_ * z * z);
      }
      g[d] = v;
      sum += v * v;
    }
    const double c = 1.0 / std::sqrt(h * sum);
    for (auto& v : g) v *= c;
    windows_.push_back(std::move(g));
    norms_.push_back(c);
  }
}

std::size_t WavePacketFrame::phase_size() const {
  std::size_t n = 1;
  for (const auto& a : phase_) n *= static_cast<std::size_t>(a.points);
  return n;
}

double WavePacketFrame::normalization() const {
  double c = 1.0;
  for (double v : norms_) c *= v;
  return c;
}

double WavePacketFrame::cell_weight() const {
  double w = 1.0;
  for (const auto& ax : base_) w *= y_stride_ * ax.spacing() * eta_stride_ / ax.length;
  return w;
}

double WavePacketFrame::oversampling() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ax : base_) best = std::min(best, ax.length / (y_stride_ * ax.spacing() * eta_stride_));
  return best;
}

std::vector<double> WavePacketFrame::phase_point(std::size_t index) const {
  std::vector<int> shape, idx;
  for (const auto& a : phase_) shape.push_back(a.points);
  unflatten(index, shape, idx);
  std::vector<double> X(phase_.size());
  for (std::size_t a = 0; a < phase_.size(); ++a) X[a] = phase_[a].coordinate(idx[a]);
  return X;
}

SampledField WavePacketFrame::packet(std::size_t index) const {
  const auto X = phase_point(index);
  const std::size_t n = dim();
  std::vector<int> shape, idx;
  for (const auto& a : phase_) shape.push_back(a.points);
  unflatten(index, shape, idx);
  SampledField out(base_);
  auto values = out.values();
  std::vector<int> node;
  std::vector<int> base_shape;
  for (const auto& a : base_) base_shape.push_back(a.points);
  for (std::size_t i = 0; i < out.size(); ++i) {
    unflatten(i, base_shape, node);
    cplx v = 1.0;
    for (std::size_t a = 0; a < n; ++a) {
      const int diff = node[a] - idx[a] * y_stride_;
      v *= windows_[a][wrap(diff, base_[a].points)] *
           std::polar(1.0, 2.0 * kPi * diff * base_[a].spacing() * X[n + a]);
    }
    values[i] = v;
  }
  return out;
}

SampledField WavePacketFrame::transform(const SampledField& u) const {
  if (u.axes() != base_) throw AxisMismatch("wave-packet transform: field axes differ from the frame base");
  const LatticeTables tab(base_, phase_, y_stride_, eta_stride_, +1.0);
  const std::size_t n = tab.n;
  std::vector<std::size_t> all(n);
  for (std::size_t a = 0; a < n; ++a) all[a] = a;
  double hn = 1.0;
  for (const auto& a : base_) hn *= a.spacing();

  SampledField out(phase_);
  parallel_for(tab.n_y, [&](std::size_t iy) {
    std::vector<cplx> f(tab.n_base);
    for (std::size_t i = 0; i < tab.n_base; ++i) {
      double w = hn;
      for (std::size_t a = 0; a < n; ++a)
        w *= windows_[a][wrap(tab.node_sub[a][i] - tab.y_sub[a][iy] * y_stride_, tab.base_shape[a])];
      f[i] = u[i] * w;
    }
    detail::dft_axes(f, tab.base_shape, all, -1);
    auto o = out.values();
    for (std::size_t ie = 0; ie < tab.n_eta; ++ie) o[iy * tab.n_eta + ie] = tab.twiddle(iy, ie) * f[tab.eta_fft[ie]];
  });
  return out;
}

SampledField WavePacketFrame::adjoint(const SampledField& v) const {
  if (v.axes() != phase_) throw AxisMismatch("wave-packet adjoint: field axes differ from the phase lattice");
  const LatticeTables tab(base_, phase_, y_stride_, eta_stride_, -1.0);
  const std::size_t n = tab.n;
  std::vector<std::size_t> all(n);
  for (std::size_t a = 0; a < n; ++a) all[a] = a;
  const double cw = cell_weight();

  // Fixed blocking over y keeps the summation order independent of threads.
  const std::size_t blocks = std::min<std::size_t>(16, tab.n_y);
  std::vector<std::vector<cplx>> partial(blocks, std::vector<cplx>(tab.n_base));
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<cplx> G(tab.n_base);
    auto& acc = partial[b];
    for (std::size_t iy = b * tab.n_y / blocks; iy < (b + 1) * tab.n_y / blocks; ++iy) {
      std::fill(G.begin(), G.end(), cplx{});
      for (std::size_t ie = 0; ie < tab.n_eta; ++ie) G[tab.eta_fft[ie]] = tab.twiddle(iy, ie) * v[iy * tab.n_eta + ie];
      detail::dft_axes(G, tab.base_shape, all, +1);
      for (std::size_t i = 0; i < tab.n_base; ++i) {
        double w = cw;
        for (std::size_t a = 0; a < n; ++a)
          w *= windows_[a][wrap(tab.node_sub[a][i] - tab.y_sub[a][iy] * y_stride_, tab.base_shape[a])];
        acc[i] += w * G[i];
      }
    }
  });
  SampledField out(base_);
  auto o = out.values();
  for (const auto& acc : partial)
    for (std::size_t i = 0; i < tab.n_base; ++i) o[i] += acc[i];
  return out;
}

SampledField wavepacket_transform(const SampledField& u, const WavePacketFrame& frame) { return frame.transform(u); }
SampledField wavepacket_adjoint(const SampledField& v, const WavePacketFrame& frame) { return frame.adjoint(v); }

SampledField sample_symbol(const PhaseSymbol& a, const WavePacketFrame& frame) {
  return make_field(frame.phase_axes(), [&](std::span<const double> X) { return cplx(a(X), 0.0); });
}

SampledField wick_apply(const PhaseSymbol& a, const SampledField& u, const WavePacketFrame& frame) {
  SampledField w = frame.transform(u);
  const SampledField s = sample_symbol(a, frame);
  auto wv = w.values();
  for (std::size_t i = 0; i < w.size(); ++i) wv[i] *= s[i];
  return frame.adjoint(w);
}

cplx projection_kernel(const WavePacketFrame& frame, std::span<const double> X, std::span<const double> Y) {
  const std::size_t n = frame.dim();
  const double lambda = frame.lambda();
  double gamma = 0.0, phase = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const double dy = X[a] - Y[a];
    const double de = X[n + a] - Y[n + a];
    gamma += lambda * dy * dy + de * de / lambda;
    phase += dy * (X[n + a] + Y[n + a]);
  }
  return std::exp(-0.5 * kPi * gamma) * std::polar(1.0, kPi * phase);
}

cplx periodized_projection_kernel(const WavePacketFrame& frame, std::span<const double> X,
                                  std::span<const double> Y, int images) {
  const std::size_t n = frame.dim();
  const int span = 2 * images + 1;
  std::size_t combos = 1;
  for (std::size_t d = 0; d < 2 * n; ++d) combos *= span;
  std::vector<double> Z(X.begin(), X.end());
  cplx sum{};
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t r = c;
    for (std::size_t d = 0; d < 2 * n; ++d) {
      const int m = static_cast<int>(r % span) - images;
      r /= span;
      const Axis& ax = frame.base_axes()[d % n];
      Z[d] = X[d] + m * (d < n ? ax.length : ax.points / ax.length);
    }
    sum += projection_kernel(frame, Z, Y);
  }
  return sum;
}

Eigen::MatrixXcd projection_matrix(const WavePacketFrame& frame, std::size_t budget_bytes) {
  const std::size_t P = frame.phase_size();
  const double bytes = static_cast<double>(P) * P * sizeof(cplx);
  if (bytes > static_cast<double>(budget_bytes))
    throw ResourceGuard("dense projection kernel needs " + std::to_string(static_cast<long long>(bytes / (1 << 20))) +
                        " MiB, budget is " + std::to_string(budget_bytes >> 20) + " MiB");
  std::size_t n_base = 1;
  double hn = 1.0;
  for (const auto& a : frame.base_axes()) {
    n_base *= static_cast<std::size_t>(a.points);
    hn *= a.spacing();
  }
  Eigen::MatrixXcd Phi(static_cast<Eigen::Index>(n_base), static_cast<Eigen::Index>(P));
  parallel_for(P, [&](std::size_t j) {
    const SampledField p = frame.packet(j);
    for (std::size_t i = 0; i < n_base; ++i) Phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p[i];
  });
  // K(X, Y) = (phi_Y, phi_X) = h^n sum_x phi_Y(x) conj(phi_X(x)).
  return hn * (Phi.adjoint() * Phi);
}

double operator_norm(const Eigen::MatrixXcd& A, int iterations) {
  if (A.size() == 0) return 0.0;
  Rng rng(0x5eed);
  Eigen::VectorXcd v(A.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(rng.normal(), rng.normal());
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXcd w = A.adjoint() * (A * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    estimate = std::sqrt(nw);
    v = w / nw;
  }
  return estimate;
}

EstimateReport verify_projection(const WavePacketFrame& frame, std::size_t budget_bytes) {
  const Eigen::MatrixXcd K = projection_matrix(frame, budget_bytes);
  const double cw = frame.cell_weight();
  const Eigen::MatrixXcd Pi = cw * K;
  const Eigen::MatrixXcd idem = Pi * Pi - Pi;
  const Eigen::MatrixXcd skew = Pi - Pi.adjoint();

  const std::size_t P = frame.phase_size();
  std::vector<double> kernel_err(P, 0.0), closed_err(P, 0.0);
  parallel_for(P, [&](std::size_t i) {
    const auto X = frame.phase_point(i);
    for (std::size_t j = 0; j < P; ++j) {
      const auto Y = frame.phase_point(j);
      const cplx k = K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      kernel_err[i] = std::max(kernel_err[i], std::abs(k - periodized_projection_kernel(frame, X, Y)));
      closed_err[i] = std::max(closed_err[i], std::abs(k - projection_kernel(frame, X, Y)));
    }
  });

  EstimateReport r;
  r.context = {{"lambda", frame.lambda()}, {"phase_points", static_cast<double>(P)}, {"cell_weight", cw}};
  r.metrics = {{"idempotence_defect", operator_norm(idem)},
               {"idempotence_defect_frobenius", idem.norm()},
               {"selfadjoint_defect", operator_norm(skew)},
               {"selfadjoint_defect_frobenius", skew.norm()},
               {"kernel_error", *std::max_element(kernel_err.begin(), kernel_err.end())},
               {"kernel_error_unperiodized", *std::max_element(closed_err.begin(), closed_err.end())},
               {"trace", Pi.trace().real()}};
  r.lhs = r.metrics["idempotence_defect_frobenius"];
  r.rhs = 1.0;
  r.ratio = r.lhs;
  return r;
}

}  // namespace hypokit
