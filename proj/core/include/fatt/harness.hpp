#ifndef FATT_HARNESS_HPP
#define FATT_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fatt/config.hpp"
#include "fatt/dataset.hpp"
#include "fatt/tree.hpp"

namespace fatt::harness {

struct BuildReport {
  double build_ms = 0.0;
  std::uint64_t nodes_created = 0;
  TreeReport tree;
  // occupancy histogram: count of leaves holding 1, 2, ... entries
  std::vector<std::uint64_t> leaf_occupancy_histogram;
};

// Codes one raster with the index configuration.
coding::CodeResult code_raster(const Raster& raster, const IndexConfig& cfg);

// dwt2_pyramid -> image_code -> insert for every dataset entry.
FattTree build_index(const Dataset& dataset, const IndexConfig& cfg,
                     BuildReport* report = nullptr);

struct QueryRow {
  std::string query_id;
  std::vector<RankedMatch> results;   // self excluded, ascending distance
  double precision_at_k = 0.0;        // category agreement over the results
  SearchStats stats;                  // index-side costs
  std::uint64_t linear_computations = 0;  // brute-force baseline: n-1
  std::vector<RankedMatch> linear_results;  // baseline top-k, self excluded
  double wall_ms = 0.0;
};

struct EvalReport {
  std::vector<QueryRow> rows;
  std::size_t top_k = 0;
  double mean_precision = 0.0;
  double mean_nodes_visited = 0.0;
  double mean_distance_computations = 0.0;
  double mean_linear_computations = 0.0;
};

// Query-by-example battery: every query image is re-coded, retrieved with
// the given tolerance radius (its own entry excluded), and compared against
// a full linear scan. Throws DataError for unknown query ids.
EvalReport run_qbe(const FattTree& tree, const Dataset& dataset,
                   const std::vector<std::string>& query_ids, std::size_t top_k, int radius);

struct ScalingRow {
  std::size_t n = 0;
  double mean_nodes_visited = 0.0;       // exact search, over the battery
  double mean_dist_comp = 0.0;           // tolerant retrieval, self excluded
  double mean_linear_comp = 0.0;         // always n-1
  double build_ms = 0.0;                 // wall clock, not deterministic
};

struct ScalingOptions {
  std::uint32_t side = 64;
  std::uint32_t categories = 8;
  std::size_t battery = 32;   // queries per database size
  std::size_t top_k = 10;
  int radius = 1;
};

// Builds one index per database size over seeded synthetic images and runs
// a fixed query battery against each. Asserts the structural guarantees:
// exact-search node accesses never exceed depth+1 and stay flat (< 10%
// spread) across sizes, and the index never scores more distances than the
// linear scan.
std::vector<ScalingRow> bench_scaling(const std::vector<std::size_t>& sizes,
                                      const IndexConfig& cfg, std::uint64_t seed,
                                      const ScalingOptions& options = {});

// CSV emission. Column orders are part of the interface:
//   scaling: n,mean_nodes_visited,mean_dist_comp,mean_linear_comp,build_ms
//   eval:    query_id,rank,result_id,distance,precision_at_k,nodes_visited,dist_comp
std::string scaling_csv(const std::vector<ScalingRow>& rows);
std::string eval_csv(const EvalReport& report);

}  // namespace fatt::harness

#endif
