#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "hypokit/grid.hpp"
#include "hypokit/report.hpp"

namespace hypokit {

inline constexpr std::size_t kDefaultKernelBudget = std::size_t{64} << 20;

/// Real symbol a(X) on phase space. X lists positions first, then the dual
/// variables: (x, xi) in 1D, (x1, x2, xi1, xi2) in 2D.
struct PhaseSymbol {
  std::function<double(std::span<const double>)> rule;
  double sup_norm = std::numeric_limits<double>::infinity();
  int smoothness = 0;

  double operator()(std::span<const double> X) const { return rule(X); }
};

/// Periodized Gaussian wave packets
///   phi_{y,eta}(x) = c sum_m exp(-pi lambda |x - y + m L|^2) e^{2 i pi (x - y) eta}
/// on a 1D or 2D base grid, indexed by a lattice of y (grid nodes, optional
/// stride) and eta (lattice frequencies k/L, optional stride). c gives each
/// packet unit discrete norm. With unit strides the frame is exactly tight.
class WavePacketFrame {
 public:
  WavePacketFrame(std::vector<Axis> base_axes, double lambda, int y_stride = 1, int eta_stride = 1);

  double lambda() const { return lambda_; }
  std::size_t dim() const { return base_.size(); }
  const std::vector<Axis>& base_axes() const { return base_; }
  /// (y1, [y2], xi1, [xi2]): y axes keep the base labels, eta axes are
  /// centred and ascending.
  const std::vector<Axis>& phase_axes() const { return phase_; }
  std::size_t phase_size() const;
  /// Product of the per-axis normalization constants c.
  double normalization() const;
  /// Lattice weight prod(dy * deta).
  double cell_weight() const;
  /// Smallest 1 / (dy * deta) over the axis pairs.
  double oversampling() const;

  /// X = (y..., eta...) for a flat phase-lattice index.
  std::vector<double> phase_point(std::size_t index) const;
  SampledField packet(std::size_t index) const;

  SampledField transform(const SampledField& u) const;
  SampledField adjoint(const SampledField& v) const;

 private:
  double lambda_;
  int y_stride_;
  int eta_stride_;
  std::vector<Axis> base_;
  std::vector<Axis> phase_;
  // windows_[a][d]: normalized periodized Gaussian at offset d * h (mod L).
  std::vector<std::vector<double>> windows_;
  std::vector<double> norms_;
};

SampledField wavepacket_transform(const SampledField& u, const WavePacketFrame& frame);
SampledField wavepacket_adjoint(const SampledField& v, const WavePacketFrame& frame);

/// Samples a on the frame's phase lattice.
SampledField sample_symbol(const PhaseSymbol& a, const WavePacketFrame& frame);

/// W* (a W u).
SampledField wick_apply(const PhaseSymbol& a, const SampledField& u, const WavePacketFrame& frame);

/// Dense Weyl quantization on a 1D or 2D grid:
///   (a^w u)(x_j) = sum_l G_{j+l}(j - l) u_l,
///   G_s(d) = N^{-1} sum_k e^{2 i pi d k / N} a(midpoint_s, xi_k).
class WeylOperator {
 public:
  WeylOperator(const PhaseSymbol& a, std::vector<Axis> base_axes, std::size_t budget_bytes = kDefaultKernelBudget);

  SampledField apply(const SampledField& u) const;
  const Eigen::MatrixXcd& matrix() const { return kernel_; }
  const std::vector<Axis>& base_axes() const { return base_; }

 private:
  std::vector<Axis> base_;
  Eigen::MatrixXcd kernel_;
};

SampledField weyl_apply(const PhaseSymbol& a, const SampledField& u, std::size_t budget_bytes = kDefaultKernelBudget);

/// Gaussian smoothing a~(X) = 2^n int a(X + Y) exp(-2 pi Gamma(Y)) dY with
/// Gamma(y, eta) = lambda |y|^2 + |eta|^2 / lambda, by tensor Gauss-Hermite
/// quadrature of the given order.
PhaseSymbol wick_via_weyl(const PhaseSymbol& a, const WavePacketFrame& frame, int order = 24);

/// exp(-pi/2 Gamma(X - Y)) exp(i pi (x - y).(xi + eta)).
cplx projection_kernel(const WavePacketFrame& frame, std::span<const double> X, std::span<const double> Y);

/// Closed form summed over the periodic images of X in position (period L)
/// and frequency (period N / L); this is what the packet inner products on
/// the torus reproduce.
cplx periodized_projection_kernel(const WavePacketFrame& frame, std::span<const double> X,
                                  std::span<const double> Y, int images = 2);

/// Dense kernel K(X, Y) = (phi_Y, phi_X) over the whole phase lattice.
Eigen::MatrixXcd projection_matrix(const WavePacketFrame& frame, std::size_t budget_bytes = kDefaultKernelBudget);

/// Idempotence and self-adjointness defects of pi = W W* (as an operator on
/// the weighted lattice), the entrywise distance to the closed-form kernel,
/// and the trace.
EstimateReport verify_projection(const WavePacketFrame& frame, std::size_t budget_bytes = kDefaultKernelBudget);

/// Largest singular value by power iteration on A^H A with a fixed start.
double operator_norm(const Eigen::MatrixXcd& A, int iterations = 200);

}  // namespace hypokit
