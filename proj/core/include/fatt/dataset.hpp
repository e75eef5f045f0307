#ifndef FATT_DATASET_HPP
#define FATT_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fatt/raster.hpp"

namespace fatt::harness {

struct DatasetEntry {
  std::string id;        // relative source path, or synthetic name
  Raster raster;
  std::string category;  // immediate subdirectory, or "uncategorized"
};

struct Dataset {
  std::string name;
  std::vector<DatasetEntry> entries;

  const DatasetEntry* find(std::string_view id) const;
};

// Walks `source` recursively, decoding every readable raster file into an
// 8-bit grayscale square of side target_side (luma conversion + bilinear
// resize). Entries are ordered by relative path; undecodable files are
// skipped with a warning. Throws DataError if nothing decodes.
Dataset ingest_dataset(const std::filesystem::path& source, std::uint32_t target_side);

// Deterministic synthetic texture: block noise whose block size and
// amplitude profile depend on the category, with per-image variation drawn
// from (seed, category, index). Same arguments, same pixels, on any host.
Raster synthetic_raster(std::uint64_t seed, std::uint32_t side, std::uint32_t category,
                        std::uint64_t index);

// n synthetic images cycling over `categories` categories.
Dataset synthetic_dataset(std::uint64_t seed, std::uint32_t side, std::uint32_t categories,
                          std::size_t n);

// 64-bit SplitMix: tiny, seedable, stable across platforms. Used everywhere
// determinism is part of the contract (synthetic data, test batteries).
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, bound)
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace fatt::harness

#endif
