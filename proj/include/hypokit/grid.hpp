#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hypokit {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

enum class AxisLabel { t, x, v, x1, x2, xi1, xi2 };

std::string_view to_string(AxisLabel label);
AxisLabel parse_axis_label(std::string_view name);

/// One uniform periodic axis. Node i sits at (i - points/2) * spacing, so the
/// origin is always a node and coordinates cover [-length/2, length/2).
struct Axis {
  int points = 0;
  double length = 0.0;
  AxisLabel label = AxisLabel::x;

  double spacing() const { return length / points; }
  double coordinate(int i) const { return (i - points / 2) * spacing(); }
  /// Signed lattice frequency k/length for FFT-ordered index k.
  double frequency(int k) const { return (k < (points + 1) / 2 ? k : k - points) / length; }

  bool operator==(const Axis&) const = default;
};

/// Builds a validated axis. Point counts must be even, at least 8, and have no
/// prime factor other than 2, 3 or 5.
Axis make_axis(AxisLabel label, int points, double length);

bool is_fft_friendly(int points);

/// Complex samples on a tensor grid of 1 to 4 axes, row-major (last axis fastest).
class SampledField {
 public:
  SampledField() = default;
  explicit SampledField(std::vector<Axis> axes);
  SampledField(std::vector<Axis> axes, std::vector<cplx> values);

  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(std::size_t a) const { return axes_[a]; }
  std::size_t rank() const { return axes_.size(); }
  std::size_t size() const { return values_.size(); }
  std::vector<int> shape() const;
  std::size_t stride(std::size_t a) const;
  /// Product of the axis spacings.
  double cell_volume() const;
  /// Index of the axis carrying `label`; throws AxisMismatch when absent.
  std::size_t axis_index(AxisLabel label) const;
  bool has_axis(AxisLabel label) const;

  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  SampledField& operator+=(const SampledField& other);
  SampledField& operator-=(const SampledField& other);
  SampledField& operator*=(cplx s);

 private:
  std::vector<Axis> axes_;
  std::vector<cplx> values_;
};

SampledField operator+(SampledField a, const SampledField& b);
SampledField operator-(SampledField a, const SampledField& b);
SampledField operator*(cplx s, SampledField a);

/// Dual lattice of a SampledField in FFT ordering (frequency 0 at index 0).
struct FrequencyGrid {
  std::vector<Axis> axes;

  double frequency(std::size_t a, int k) const { return axes[a].frequency(k); }
  double cell_volume() const;
  /// Largest representable |frequency| on axis a, i.e. points / (2 length).
  double nyquist(std::size_t a) const;
};

/// Spectrum of a field: samples of the continuous Fourier transform
/// u^(z) = \int u(x) e^{-2 i pi x z} dx at lattice frequencies.
struct Spectrum {
  FrequencyGrid grid;
  std::vector<cplx> values;
};

using PointRule = std::function<cplx(std::span<const double>)>;

/// Samples `rule` at every node. Rejects more than four axes.
SampledField make_field(std::vector<Axis> axes, const PointRule& rule);

/// Calls fn(flat_index, coordinates) for every node in row-major order.
void for_each_node(const std::vector<Axis>& axes,
                   const std::function<void(std::size_t, std::span<const double>)>& fn);

/// Calls fn(flat_index, frequencies) for every lattice frequency in FFT order.
void for_each_frequency(const std::vector<Axis>& axes,
                        const std::function<void(std::size_t, std::span<const double>)>& fn);

Spectrum fft(const SampledField& field);
SampledField ifft(const Spectrum& spectrum);

double norm_l2(const SampledField& field);
double norm_l2(const Spectrum& spectrum);
/// Integral of a * conj(b); conjugate-linear in the second slot.
cplx inner(const SampledField& a, const SampledField& b);

/// ||<zeta>^s u^|| with zeta restricted to the listed axes.
double sobolev_norm(const SampledField& field, double s, std::span<const std::size_t> axes);
double sobolev_norm(const SampledField& field, double s);

using FrequencyRule = std::function<cplx(std::span<const double>)>;

/// ifft(symbol * fft(field)) along the listed axes only. The symbol receives
/// the frequencies of those axes, in the listed order.
SampledField apply_fourier_multiplier(const SampledField& field, std::span<const std::size_t> axes,
                                      const FrequencyRule& symbol);

/// Spectral derivative (2 i pi zeta) along one axis.
SampledField derivative(const SampledField& field, std::size_t axis);

/// Pointwise product with a real function of the node coordinates.
SampledField multiply_by(const SampledField& field,
                         const std::function<double(std::span<const double>)>& fn);

void require_same_axes(const SampledField& a, const SampledField& b, std::string_view what);

namespace detail {

/// Unnormalized in-place DFT along `axes` of a row-major array of `shape`.
/// sign = -1 is the forward transform.
void dft_axes(std::span<cplx> data, std::span<const int> shape, std::span<const std::size_t> axes,
              int sign);

}  // namespace detail

}  // namespace hypokit
