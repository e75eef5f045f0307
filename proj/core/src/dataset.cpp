#include "fatt/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "fatt/errors.hpp"
#include "fatt/log.hpp"

namespace fatt::harness {

namespace fs = std::filesystem;

const DatasetEntry* Dataset::find(std::string_view id) const {
  for (const DatasetEntry& e : entries)
    if (e.id == id) return &e;
  return nullptr;
}

Dataset ingest_dataset(const fs::path& source, std::uint32_t target_side) {
  if (target_side == 0 || (target_side & (target_side - 1)) != 0)
    throw InvalidArgument("ingest_dataset: target side must be a power of two");
  if (!fs::is_directory(source))
    throw DataError("ingest_dataset: not a directory: " + source.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(source))
    if (entry.is_regular_file()) files.push_back(entry.path());
  if (files.empty()) throw DataError("ingest_dataset: no files under " + source.string());

  std::vector<std::string> relative;
  relative.reserve(files.size());
  for (const fs::path& p : files) relative.push_back(p.lexically_relative(source).generic_string());
  std::sort(relative.begin(), relative.end());

  Dataset ds;
  ds.name = source.filename().string();
  for (const std::string& rel : relative) {
    Raster raster;
    try {
      raster = load_raster(source / rel, target_side);
    } catch (const DataError& e) {
      log::warn(std::string("skipping undecodable file: ") + e.what());
      continue;
    }
    const auto slash = rel.find('/');
    std::string category = (slash == std::string::npos) ? "uncategorized" : rel.substr(0, slash);
    ds.entries.push_back({rel, std::move(raster), std::move(category)});
  }
  if (ds.entries.empty())
    throw DataError("ingest_dataset: no decodable raster files under " + source.string());
  return ds;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  SplitMix64 rng(a * 0x9e3779b97f4a7c15ULL + b * 0xc2b2ae3d27d4eb4fULL + c + 1);
  rng.next();
  return rng.next();
}

Raster synthetic_raster(std::uint64_t seed, std::uint32_t side, std::uint32_t category,
                        std::uint64_t index) {
  if (side == 0) throw InvalidArgument("synthetic_raster: zero side");

  SplitMix64 rng(mix_seed(seed, category, index));

  // Category fixes the texture scale; the image index varies amplitude,
  // base level, and the noise itself so determinants land all over the
  // quantizer range.
  const std::uint32_t block = std::min(side, 2u << (category % 5));          // 2..32
  const double amplitude = (24.0 + 14.0 * (category % 7)) * (0.4 + 1.2 * rng.uniform());
  const double base = 80.0 + 10.0 * (category % 9) + 60.0 * rng.uniform();

  Raster out;
  out.side = side;
  out.pixels.resize(static_cast<std::size_t>(side) * side);

  const std::uint32_t blocks_per_side = (side + block - 1) / block;
  std::vector<double> block_values(static_cast<std::size_t>(blocks_per_side) * blocks_per_side);
  for (double& v : block_values) v = base + amplitude * (2.0 * rng.uniform() - 1.0);

  for (std::uint32_t y = 0; y < side; ++y) {
    for (std::uint32_t x = 0; x < side; ++x) {
      const std::size_t bi =
          static_cast<std::size_t>(y / block) * blocks_per_side + (x / block);
      double v = block_values[bi];
      if (v < 0.0) v = 0.0;
      if (v > 255.0) v = 255.0;
      out.pixels[static_cast<std::size_t>(y) * side + x] =
          static_cast<std::uint8_t>(std::lround(v));
    }
  }
  return out;
}

Dataset synthetic_dataset(std::uint64_t seed, std::uint32_t side, std::uint32_t categories,
                          std::size_t n) {
  if (categories == 0) throw InvalidArgument("synthetic_dataset: need at least one category");
  Dataset ds;
  ds.name = "synthetic-" + std::to_string(seed);
  ds.entries.reserve(n);
  char id[32];
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t category = static_cast<std::uint32_t>(i % categories);
    std::snprintf(id, sizeof id, "syn%06zu", i);
    ds.entries.push_back({id, synthetic_raster(seed, side, category, i),
                          "cat" + std::to_string(category)});
  }
  return ds;
}

}  // namespace fatt::harness
