#include "hypokit/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <json.hpp>

#include "hypokit/errors.hpp"

namespace hypokit {

static_assert(std::endian::native == std::endian::little, "binary field format assumes little-endian hosts");

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

}  // namespace

void write_field(const SampledField& field, const std::filesystem::path& stem) {
  nlohmann::json header;
  header["layout"] = "row-major";
  header["dtype"] = "complex128-le";
  for (const auto& a : field.axes())
    header["axes"].push_back({{"label", to_string(a.label)}, {"points", a.points}, {"length", a.length}});
  std::ofstream hj(with_suffix(stem, ".json"));
  if (!hj) throw Error("cannot write " + with_suffix(stem, ".json").string());
  hj << header.dump(2) << '\n';

  std::ofstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  if (!bin) throw Error("cannot write " + with_suffix(stem, ".bin").string());
  const auto values = field.values();
  bin.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(cplx)));
}

SampledField read_field(const std::filesystem::path& stem) {
  std::ifstream hj(with_suffix(stem, ".json"));
  if (!hj) throw Error("cannot read " + with_suffix(stem, ".json").string());
  const auto header = nlohmann::json::parse(hj);
  if (header.value("dtype", "") != "complex128-le") throw Error("unsupported field dtype");
  std::vector<Axis> axes;
  for (const auto& a : header.at("axes"))
    axes.push_back(make_axis(parse_axis_label(a.at("label").get<std::string>()), a.at("points").get<int>(),
                             a.at("length").get<double>()));
  SampledField field(axes);
  std::ifstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  if (!bin) throw Error("cannot read " + with_suffix(stem, ".bin").string());
  auto values = field.values();
  bin.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(cplx)));
  if (bin.gcount() != static_cast<std::streamsize>(values.size() * sizeof(cplx)))
    throw Error("truncated field payload in " + with_suffix(stem, ".bin").string());
  return field;
}

void write_csv_slice(const SampledField& field, const std::filesystem::path& path,
                     const std::vector<std::size_t>& keep, std::vector<int> pinned) {
  if (keep.empty() || keep.size() > 2) throw InvalidArgument("csv slices keep one or two axes");
  for (auto a : keep)
    if (a >= field.rank()) throw AxisMismatch("csv slice axis out of range");
  if (pinned.empty())
    for (const auto& a : field.axes()) pinned.push_back(a.points / 2);
  if (pinned.size() != field.rank()) throw InvalidArgument("csv slice needs one pinned index per axis");

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  for (auto a : keep) out << to_string(field.axis(a).label) << ',';
  out << "re,im\n";

  const int n0 = field.axis(keep[0]).points;
  const int n1 = keep.size() == 2 ? field.axis(keep[1]).points : 1;
  std::vector<int> idx = pinned;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      idx[keep[0]] = i;
      if (keep.size() == 2) idx[keep[1]] = j;
      std::size_t flat = 0;
      for (std::size_t a = 0; a < field.rank(); ++a) flat += idx[a] * field.stride(a);
      out << field.axis(keep[0]).coordinate(i) << ',';
      if (keep.size() == 2) out << field.axis(keep[1]).coordinate(j) << ',';
      out << field[flat].real() << ',' << field[flat].imag() << '\n';
    }
  }
}

}  // namespace hypokit
