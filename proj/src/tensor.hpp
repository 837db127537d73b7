#pragma once

// Internal helpers for per-axis linear maps on row-major arrays.

#include <Eigen/Dense>
#include <vector>

#include "hypokit/grid.hpp"

namespace hypokit::detail {

/// out[..., i, ...] = sum_a M(i, a) data[..., a, ...] along `axis`.
std::vector<cplx> contract_axis(const std::vector<cplx>& data, const std::vector<int>& shape, std::size_t axis,
                                const Eigen::MatrixXcd& M);

/// Rows evaluate the trigonometric interpolant (symmetric Nyquist) of samples
/// on `axis` at the points `targets`; targets outside [-L/2, L/2) give 0.
Eigen::MatrixXcd interpolation_matrix(const Axis& axis, const std::vector<double>& targets);

/// Rows evaluate h sum_a u_a exp(-2 i pi f z_a) at the frequencies `freqs`.
Eigen::MatrixXcd ndft_matrix(const Axis& axis, const std::vector<double>& freqs);

/// Node coordinates of an axis.
std::vector<double> nodes(const Axis& axis);
/// Lattice frequencies of an axis in FFT order.
std::vector<double> frequencies(const Axis& axis);

/// Extracts / inserts a slice with the leading axis fixed at index i.
SampledField leading_slice(const SampledField& field, int i);
void set_leading_slice(SampledField& field, int i, const SampledField& slice);

}  // namespace hypokit::detail
