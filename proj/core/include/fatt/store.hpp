#ifndef FATT_STORE_HPP
#define FATT_STORE_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fatt/config.hpp"
#include "fatt/tree.hpp"

namespace fatt::store {

// Self-describing binary index format, fixed little-endian layout:
//
//   magic "FATT" | version u16 | config block | node count u64 |
//   entry count u64 | node records in pre-order DFS (children by ascending
//   digit): address u64, level u16, digit u16, entry count u32, then per
//   entry: id length u32 + id bytes + depth x u16 code digits + feature
//   vector as f64 little-endian.
//
// The config block carries everything needed to interpret stored codes:
// branching, depth, block grid, decomposition levels, raster side, default
// tolerance, subband selection, normalization, and the quantizer table.
inline constexpr std::uint16_t kFormatVersion = 1;

std::vector<std::uint8_t> serialize_index(const FattTree& tree, const IndexConfig& cfg);

// Writes the serialized index; returns the byte count.
std::uint64_t save_index(const FattTree& tree, const IndexConfig& cfg,
                         const std::filesystem::path& path);

struct LoadResult {
  FattTree tree;
  IndexConfig config;
};

// Exact inverse of save_index. Validates the magic/version before touching
// the body, re-checks every structural invariant while reading, and runs a
// full tree audit before returning. Corruption errors name the byte offset.
LoadResult deserialize_index(const std::vector<std::uint8_t>& bytes);
LoadResult load_index(const std::filesystem::path& path);

}  // namespace fatt::store

#endif
