#ifndef FATT_CONFIG_HPP
#define FATT_CONFIG_HPP

#include <cstdint>

#include "fatt/coding.hpp"
#include "fatt/tree.hpp"

namespace fatt {

// Everything needed to build an index and to interpret it later: the coding
// pipeline, the tree shape (inherited from the coding branching/depth), and
// the canonical raster side. Persisted verbatim in the index file.
struct IndexConfig {
  coding::CodingConfig coding;
  std::uint32_t side = 256;
  int tolerance_default = 1;

  static IndexConfig defaults();

  FattConfig tree_config() const {
    return FattConfig{coding.branching, coding.depth, tolerance_default};
  }

  void validate() const;
};

}  // namespace fatt

#endif
