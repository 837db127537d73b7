#pragma once

#include <filesystem>
#include <vector>

#include "hypokit/grid.hpp"

namespace hypokit {

/// Writes `<stem>.json` (axes, layout, dtype) and `<stem>.bin` (little-endian
/// float64, re/im interleaved, row-major).
void write_field(const SampledField& field, const std::filesystem::path& stem);
SampledField read_field(const std::filesystem::path& stem);

/// CSV export of a 1D or 2D slice. `keep` lists the axes that vary; every
/// other axis is pinned at `pinned[a]` (ignored for kept axes). An empty
/// `pinned` pins at the centre node.
void write_csv_slice(const SampledField& field, const std::filesystem::path& path,
                     const std::vector<std::size_t>& keep, std::vector<int> pinned = {});

}  // namespace hypokit
