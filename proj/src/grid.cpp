#include "hypokit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypokit/errors.hpp"

namespace hypokit {

namespace {

constexpr std::string_view kLabelNames[] = {"t", "x", "v", "x1", "x2", "xi1", "xi2"};

std::vector<int> shape_of(const std::vector<Axis>& axes) {
  std::vector<int> shape;
  shape.reserve(axes.size());
  for (const auto& a : axes) shape.push_back(a.points);
  return shape;
}

std::size_t count_of(const std::vector<Axis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.points);
  return n;
}

void validate_axes(const std::vector<Axis>& axes) {
  if (axes.empty() || axes.size() > 4)
    throw InvalidArgument("a field carries between 1 and 4 axes, got " +
                          std::to_string(axes.size()));
  for (const auto& a : axes) {
    if (!is_fft_friendly(a.points))
      throw InvalidArgument("axis " + std::string(to_string(a.label)) +
                            ": point count must be even, >= 8 and 2,3,5-smooth, got " +
                            std::to_string(a.points));
    if (!(a.length > 0.0) || !std::isfinite(a.length))
      throw InvalidArgument("axis " + std::string(to_string(a.label)) + ": length must be positive");
  }
}

// (-1)^k per axis: moves the DFT phase reference from index 0 to the centre node.
void apply_centering_phase(std::span<cplx> data, const std::vector<int>& shape,
                           std::span<const std::size_t> axes) {
  const std::size_t rank = shape.size();
  std::vector<std::size_t> strides(rank, 1);
  for (std::size_t a = rank - 1; a-- > 0;) strides[a] = strides[a + 1] * shape[a + 1];
  for (std::size_t i = 0; i < data.size(); ++i) {
    int parity = 0;
    for (auto a : axes) parity += static_cast<int>((i / strides[a]) % shape[a]);
    if (parity & 1) data[i] = -data[i];
  }
}

}  // namespace

std::string_view to_string(AxisLabel label) { return kLabelNames[static_cast<int>(label)]; }

AxisLabel parse_axis_label(std::string_view name) {
  for (int i = 0; i < 7; ++i)
    if (kLabelNames[i] == name) return static_cast<AxisLabel>(i);
  throw InvalidArgument("unknown axis label '" + std::string(name) + "'");
}

bool is_fft_friendly(int points) {
  if (points < 8 || points % 2 != 0) return false;
  for (int p : {2, 3, 5})
    while (points % p == 0) points /= p;
  return points == 1;
}

Axis make_axis(AxisLabel label, int points, double length) {
  Axis axis{points, length, label};
  validate_axes({axis});
  return axis;
}

SampledField::SampledField(std::vector<Axis> axes) : axes_(std::move(axes)) {
  validate_axes(axes_);
  values_.assign(count_of(axes_), cplx{});
}

SampledField::SampledField(std::vector<Axis> axes, std::vector<cplx> values)
    : axes_(std::move(axes)), values_(std::move(values)) {
  validate_axes(axes_);
  if (values_.size() != count_of(axes_))
    throw InvalidArgument("value count " + std::to_string(values_.size()) +
                          " does not match the product of axis points " +
                          std::to_string(count_of(axes_)));
}

std::vector<int> SampledField::shape() const { return shape_of(axes_); }

std::size_t SampledField::stride(std::size_t a) const {
  std::size_t s = 1;
  for (std::size_t b = a + 1; b < axes_.size(); ++b) s *= static_cast<std::size_t>(axes_[b].points);
  return s;
}

double SampledField::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.spacing();
  return v;
}

bool SampledField::has_axis(AxisLabel label) const {
  return std::any_of(axes_.begin(), axes_.end(), [&](const Axis& a) { return a.label == label; });
}

std::size_t SampledField::axis_index(AxisLabel label) const {
  for (std::size_t a = 0; a < axes_.size(); ++a)
    if (axes_[a].label == label) return a;
  throw AxisMismatch("field has no axis '" + std::string(to_string(label)) + "'");
}

SampledField& SampledField::operator+=(const SampledField& other) {
  require_same_axes(*this, other, "operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

SampledField& SampledField::operator-=(const SampledField& other) {
  require_same_axes(*this, other, "operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

SampledField& SampledField::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

SampledField operator+(SampledField a, const SampledField& b) { return a += b; }
SampledField operator-(SampledField a, const SampledField& b) { return a -= b; }
SampledField operator*(cplx s, SampledField a) { return a *= s; }

double FrequencyGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes) v /= a.length;
  return v;
}

double FrequencyGrid::nyquist(std::size_t a) const { return axes[a].points / (2.0 * axes[a].length); }

void require_same_axes(const SampledField& a, const SampledField& b, std::string_view what) {
  if (a.axes() != b.axes()) throw AxisMismatch(std::string(what) + ": axes differ");
}

void for_each_node(const std::vector<Axis>& axes,
                   const std::function<void(std::size_t, std::span<const double>)>& fn) {
  const std::size_t rank = axes.size();
  std::vector<int> idx(rank, 0);
  std::vector<double> coords(rank);
  for (std::size_t a = 0; a < rank; ++a) coords[a] = axes[a].coordinate(0);
  const std::size_t n = count_of(axes);
  for (std::size_t flat = 0; flat < n; ++flat) {
    fn(flat, coords);
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < axes[a].points) {
        coords[a] = axes[a].coordinate(idx[a]);
        break;
      }
      idx[a] = 0;
      coords[a] = axes[a].coordinate(0);
    }
  }
}

void for_each_frequency(const std::vector<Axis>& axes,
                        const std::function<void(std::size_t, std::span<const double>)>& fn) {
  const std::size_t rank = axes.size();
  std::vector<int> idx(rank, 0);
  std::vector<double> freqs(rank, 0.0);
  const std::size_t n = count_of(axes);
  for (std::size_t flat = 0; flat < n; ++flat) {
    fn(flat, freqs);
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < axes[a].points) {
        freqs[a] = axes[a].frequency(idx[a]);
        break;
      }
      idx[a] = 0;
      freqs[a] = 0.0;
    }
  }
}

SampledField make_field(std::vector<Axis> axes, const PointRule& rule) {
  SampledField field(std::move(axes));
  auto values = field.values();
  for_each_node(field.axes(), [&](std::size_t i, std::span<const double> z) { values[i] = rule(z); });
  return field;
}

Spectrum fft(const SampledField& field) {
  Spectrum out{FrequencyGrid{field.axes()}, std::vector<cplx>(field.values().begin(), field.values().end())};
  const auto shape = field.shape();
  std::vector<std::size_t> all(field.rank());
  std::iota(all.begin(), all.end(), 0);
  detail::dft_axes(out.values, shape, all, -1);
  apply_centering_phase(out.values, shape, all);
  const double h = field.cell_volume();
  for (auto& v : out.values) v *= h;
  return out;
}

SampledField ifft(const Spectrum& spectrum) {
  std::vector<cplx> values = spectrum.values;
  const auto shape = shape_of(spectrum.grid.axes);
  std::vector<std::size_t> all(shape.size());
  std::iota(all.begin(), all.end(), 0);
  apply_centering_phase(values, shape, all);
  detail::dft_axes(values, shape, all, +1);
  const double dz = spectrum.grid.cell_volume();
  for (auto& v : values) v *= dz;
  return SampledField(spectrum.grid.axes, std::move(values));
}

double norm_l2(const SampledField& field) {
  double sum = 0.0;
  for (const auto& v : field.values()) sum += std::norm(v);
  return std::sqrt(sum * field.cell_volume());
}

double norm_l2(const Spectrum& spectrum) {
  double sum = 0.0;
  for (const auto& v : spectrum.values) sum += std::norm(v);
  return std::sqrt(sum * spectrum.grid.cell_volume());
}

cplx inner(const SampledField& a, const SampledField& b) {
  require_same_axes(a, b, "inner");
  cplx sum{};
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * std::conj(b[i]);
  return sum * a.cell_volume();
}

double sobolev_norm(const SampledField& field, double s, std::span<const std::size_t> axes) {
  if (axes.empty()) throw InvalidArgument("sobolev_norm: axis subset must be nonempty");
  for (auto a : axes)
    if (a >= field.rank()) throw AxisMismatch("sobolev_norm: axis index out of range");
  const Spectrum spec = fft(field);
  double sum = 0.0;
  std::vector<bool> used(field.rank(), false);
  for (auto a : axes) used[a] = true;
  for_each_frequency(field.axes(), [&](std::size_t i, std::span<const double> z) {
    double z2 = 0.0;
    for (std::size_t a = 0; a < z.size(); ++a)
      if (used[a]) z2 += z[a] * z[a];
    sum += std::pow(1.0 + z2, s) * std::norm(spec.values[i]);
  });
  return std::sqrt(sum * spec.grid.cell_volume());
}

double sobolev_norm(const SampledField& field, double s) {
  std::vector<std::size_t> all(field.rank());
  std::iota(all.begin(), all.end(), 0);
  return sobolev_norm(field, s, all);
}

SampledField apply_fourier_multiplier(const SampledField& field, std::span<const std::size_t> axes,
                                      const FrequencyRule& symbol) {
  if (axes.empty()) throw InvalidArgument("apply_fourier_multiplier: axis subset must be nonempty");
  for (auto a : axes)
    if (a >= field.rank()) throw AxisMismatch("apply_fourier_multiplier: axis index out of range");
  SampledField out = field;
  const auto shape = field.shape();
  auto values = out.values();
  detail::dft_axes(values, shape, axes, -1);

  // Tabulate the symbol on the sub-lattice of the chosen axes, then broadcast.
  std::vector<Axis> sub;
  for (auto a : axes) sub.push_back(field.axis(a));
  std::vector<cplx> table(count_of(sub));
  std::size_t norm = table.size();
  for_each_frequency(sub, [&](std::size_t i, std::span<const double> z) { table[i] = symbol(z); });

  std::vector<std::size_t> strides(field.rank());
  for (std::size_t a = 0; a < field.rank(); ++a) strides[a] = field.stride(a);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::size_t t = 0;
    for (auto a : axes) t = t * shape[a] + (i / strides[a]) % shape[a];
    values[i] *= table[t];
  }
  detail::dft_axes(values, shape, axes, +1);
  const double inv = 1.0 / static_cast<double>(norm);
  for (auto& v : values) v *= inv;
  return out;
}

SampledField derivative(const SampledField& field, std::size_t axis) {
  const std::size_t axes[] = {axis};
  return apply_fourier_multiplier(field, axes,
                                  [](std::span<const double> z) { return cplx(0.0, 2.0 * kPi * z[0]); });
}

SampledField multiply_by(const SampledField& field,
                         const std::function<double(std::span<const double>)>& fn) {
  SampledField out = field;
  auto values = out.values();
  for_each_node(field.axes(), [&](std::size_t i, std::span<const double> z) { values[i] *= fn(z); });
  return out;
}

}  // namespace hypokit
