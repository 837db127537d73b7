#include "tensor.hpp"

#include <cmath>

namespace hypokit::detail {

std::vector<cplx> contract_axis(const std::vector<cplx>& data, const std::vector<int>& shape, std::size_t axis,
                                const Eigen::MatrixXcd& M) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= shape[a];
  for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
  const std::size_t n_in = shape[axis];
  const std::size_t n_out = M.rows();
  std::vector<cplx> out(outer * n_out * inner, cplx{});
  for (std::size_t o = 0; o < outer; ++o) {
    const cplx* src = data.data() + o * n_in * inner;
    cplx* dst = out.data() + o * n_out * inner;
    for (std::size_t i = 0; i < n_out; ++i) {
      cplx* row = dst + i * inner;
      for (std::size_t a = 0; a < n_in; ++a) {
        const cplx m = M(i, a);
        if (m == cplx{}) continue;
        const cplx* col = src + a * inner;
        for (std::size_t k = 0; k < inner; ++k) row[k] += m * col[k];
      }
    }
  }
  return out;
}

Eigen::MatrixXcd interpolation_matrix(const Axis& axis, const std::vector<double>& targets) {
  const int n = axis.points;
  const double L = axis.length;
  const double h = axis.spacing();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(targets.size()), n);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double p = targets[i];
    if (p < -0.5 * L || p >= 0.5 * L) continue;
    for (int a = 0; a < n; ++a) {
      const double d = (p - axis.coordinate(a)) / h;  // offset in cells
      const double r = std::remainder(d, static_cast<double>(n));
      double w;
      if (std::abs(r) < 1e-13) {
        w = 1.0;
      } else {
        w = std::sin(kPi * r) / (n * std::tan(kPi * r / n));
      }
      M(static_cast<Eigen::Index>(i), a) = w;
    }
  }
  return M;
}

Eigen::MatrixXcd ndft_matrix(const Axis& axis, const std::vector<double>& freqs) {
  const int n = axis.points;
  const double h = axis.spacing();
  Eigen::MatrixXcd M(static_cast<Eigen::Index>(freqs.size()), n);
  for (std::size_t k = 0; k < freqs.size(); ++k)
    for (int a = 0; a < n; ++a)
      M(static_cast<Eigen::Index>(k), a) = h * std::polar(1.0, -2.0 * kPi * freqs[k] * axis.coordinate(a));
  return M;
}

std::vector<double> nodes(const Axis& axis) {
  std::vector<double> z(axis.points);
  for (int i = 0; i < axis.points; ++i) z[i] = axis.coordinate(i);
  return z;
}

std::vector<double> frequencies(const Axis& axis) {
  std::vector<double> f(axis.points);
  for (int k = 0; k < axis.points; ++k) f[k] = axis.frequency(k);
  return f;
}

SampledField leading_slice(const SampledField& field, int i) {
  std::vector<Axis> rest(field.axes().begin() + 1, field.axes().end());
  const std::size_t block = field.stride(0);
  std::vector<cplx> values(field.values().begin() + i * block, field.values().begin() + (i + 1) * block);
  return SampledField(std::move(rest), std::move(values));
}

void set_leading_slice(SampledField& field, int i, const SampledField& slice) {
  const std::size_t block = field.stride(0);
  auto dst = field.values();
  const auto src = slice.values();
  for (std::size_t k = 0; k < block; ++k) dst[i * block + k] = src[k];
}

}  // namespace hypokit::detail
