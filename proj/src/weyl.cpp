#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>

#include "hypokit/errors.hpp"
#include "hypokit/parallel.hpp"
#include "hypokit/quantization.hpp"

namespace hypokit {

namespace {

std::size_t total_points(const std::vector<Axis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.points);
  return n;
}

void guard_kernel(std::size_t rows, std::size_t cols, std::size_t budget, const char* what) {
  const double bytes = static_cast<double>(rows) * static_cast<double>(cols) * sizeof(cplx);
  if (bytes > static_cast<double>(budget))
    throw ResourceGuard(std::string(what) + " needs " + std::to_string(static_cast<long long>(bytes / (1 << 20))) +
                        " MiB, budget is " + std::to_string(budget >> 20) + " MiB");
}

}  // namespace

WeylOperator::WeylOperator(const PhaseSymbol& a, std::vector<Axis> base_axes, std::size_t budget_bytes)
    : base_(std::move(base_axes)) {
  const std::size_t n = base_.size();
  if (n < 1 || n > 2) throw InvalidArgument("Weyl quantization supports 1 or 2 space axes");
  if (!a.rule) throw InvalidArgument("Weyl quantization: symbol has no rule");
  const std::size_t total = total_points(base_);
  guard_kernel(total, total, budget_bytes, "dense Weyl kernel");
  kernel_ = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));

  std::vector<int> shape;
  std::vector<int> mids;  // midpoint index ranges 2N - 1 per axis
  for (const auto& ax : base_) {
    shape.push_back(ax.points);
    mids.push_back(2 * ax.points - 1);
  }
  std::size_t mid_count = 1;
  for (int m : mids) mid_count *= static_cast<std::size_t>(m);
  std::vector<std::size_t> all(n);
  for (std::size_t d = 0; d < n; ++d) all[d] = d;
  const int n1 = n == 2 ? shape[1] : 1;

  parallel_for(mid_count, [&](std::size_t flat) {
    int s[2] = {0, 0};
    if (n == 1) {
      s[0] = static_cast<int>(flat);
    } else {
      s[0] = static_cast<int>(flat / mids[1]);
      s[1] = static_cast<int>(flat % mids[1]);
    }
    std::vector<double> X(2 * n);
    for (std::size_t d = 0; d < n; ++d) X[d] = (0.5 * s[d] - base_[d].points / 2) * base_[d].spacing();
    std::vector<cplx> G(total);
    for (std::size_t k = 0; k < total; ++k) {
      if (n == 1) {
        X[1] = base_[0].frequency(static_cast<int>(k));
      } else {
        X[2] = base_[0].frequency(static_cast<int>(k / shape[1]));
        X[3] = base_[1].frequency(static_cast<int>(k % shape[1]));
      }
      G[k] = a(X);
    }
    detail::dft_axes(G, shape, all, +1);
    const double inv = 1.0 / static_cast<double>(total);
    // Every (j, l) with j + l = s.
    const int j0lo = std::max(0, s[0] - shape[0] + 1), j0hi = std::min(s[0], shape[0] - 1);
    const int j1lo = n == 2 ? std::max(0, s[1] - shape[1] + 1) : 0;
    const int j1hi = n == 2 ? std::min(s[1], shape[1] - 1) : 0;
    for (int j0 = j0lo; j0 <= j0hi; ++j0) {
      const int l0 = s[0] - j0;
      const int d0 = ((j0 - l0) % shape[0] + shape[0]) % shape[0];
      for (int j1 = j1lo; j1 <= j1hi; ++j1) {
        const int l1 = s[1] - j1;
        const int d1 = n == 2 ? ((j1 - l1) % shape[1] + shape[1]) % shape[1] : 0;
        const Eigen::Index row = static_cast<Eigen::Index>(j0) * n1 + j1;
        const Eigen::Index col = static_cast<Eigen::Index>(l0) * n1 + l1;
        kernel_(row, col) = G[static_cast<std::size_t>(d0) * n1 + d1] * inv;
      }
    }
  });
}

SampledField WeylOperator::apply(const SampledField& u) const {
  if (u.rank() != base_.size()) throw AxisMismatch("Weyl operator: field rank differs from the symbol grid");
  for (std::size_t a = 0; a < base_.size(); ++a)
    if (u.axis(a).points != base_[a].points || u.axis(a).length != base_[a].length)
      throw AxisMismatch("Weyl operator: field grid differs from the symbol grid");
  Eigen::Map<const Eigen::VectorXcd> in(u.values().data(), static_cast<Eigen::Index>(u.size()));
  const Eigen::VectorXcd out = kernel_ * in;
  return SampledField(u.axes(), std::vector<cplx>(out.data(), out.data() + out.size()));
}

SampledField weyl_apply(const PhaseSymbol& a, const SampledField& u, std::size_t budget_bytes) {
  return WeylOperator(a, u.axes(), budget_bytes).apply(u);
}

PhaseSymbol wick_via_weyl(const PhaseSymbol& a, const WavePacketFrame& frame, int order) {
  if (order < 2) throw InvalidArgument("Gauss-Hermite order must be at least 2");
  const std::size_t n = frame.dim();
  const double lambda = frame.lambda();

  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, order, 0.0, 1.0, 0.0, 0.0),
      &gsl_integration_fixed_free);
  if (!ws) throw Error("gsl: cannot allocate Gauss-Hermite rule");
  auto nodes = std::make_shared<std::vector<double>>(gsl_integration_fixed_nodes(ws.get()),
                                                     gsl_integration_fixed_nodes(ws.get()) + order);
  auto weights = std::make_shared<std::vector<double>>(gsl_integration_fixed_weights(ws.get()),
                                                       gsl_integration_fixed_weights(ws.get()) + order);
  // exp(-2 pi lambda y^2) -> y = s / sqrt(2 pi lambda); exp(-2 pi eta^2 / lambda) -> eta = s sqrt(lambda / 2 pi).
  const double ys = 1.0 / std::sqrt(2.0 * kPi * lambda);
  const double es = std::sqrt(lambda / (2.0 * kPi));
  const double mass = std::pow(kPi, -static_cast<double>(n));

  PhaseSymbol out;
  out.sup_norm = a.sup_norm;
  out.smoothness = a.smoothness;
  out.rule = [a, nodes, weights, n, ys, es, mass, order](std::span<const double> X) {
    const std::size_t dims = 2 * n;
    std::vector<int> idx(dims, 0);
    std::vector<double> Z(dims);
    double sum = 0.0;
    while (true) {
      double w = 1.0;
      for (std::size_t d = 0; d < dims; ++d) {
        const double scale = d < n ? ys : es;
        Z[d] = X[d] + scale * (*nodes)[idx[d]];
        w *= (*weights)[idx[d]];
      }
      sum += w * a(Z);
      std::size_t d = dims;
      while (d-- > 0) {
        if (++idx[d] < order) break;
        idx[d] = 0;
      }
      if (d == static_cast<std::size_t>(-1)) break;
    }
    return mass * sum;
  };
  return out;
}

}  // namespace hypokit
