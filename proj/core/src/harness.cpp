#include "fatt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "fatt/errors.hpp"
#include "fatt/log.hpp"
#include "fatt/wavelet.hpp"

namespace fatt {

IndexConfig IndexConfig::defaults() {
  IndexConfig cfg;
  cfg.coding = coding::CodingConfig::defaults();
  return cfg;
}

void IndexConfig::validate() const {
  coding.validate();
  tree_config().validate();
  if (side == 0 || (side & (side - 1)) != 0)
    throw InvalidArgument("index config: side must be a power of two");
  const auto& fb = wavelet::db4_filters();
  if (wavelet::max_pyramid_levels(side, side, fb) < coding.levels)
    throw InvalidArgument("index config: side " + std::to_string(side) +
                          " cannot support " + std::to_string(coding.levels) +
                          " decomposition levels");
}

}  // namespace fatt

namespace fatt::harness {

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  const auto elapsed = std::chrono::steady_clock::now() - start;
  return std::chrono::duration<double, std::milli>(elapsed).count();
}

void append_csv_number(std::string& out, double v, const char* fmt = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  out += buf;
}

}  // namespace

coding::CodeResult code_raster(const Raster& raster, const IndexConfig& cfg) {
  const wavelet::SubbandPyramid pyramid =
      wavelet::dwt2_pyramid(raster_to_matrix(raster), cfg.coding.levels, wavelet::db4_filters());
  return coding::image_code(pyramid, cfg.coding);
}

FattTree build_index(const Dataset& dataset, const IndexConfig& cfg, BuildReport* report) {
  cfg.validate();
  if (dataset.entries.empty()) throw DataError("build_index: empty dataset");

  const auto start = std::chrono::steady_clock::now();
  FattTree tree(cfg.tree_config());
  std::uint64_t nodes_created = 0;
  for (const DatasetEntry& entry : dataset.entries) {
    try {
      coding::CodeResult coded = code_raster(entry.raster, cfg);
      const InsertReport r = tree.insert(
          {entry.id, std::move(coded.code), std::move(coded.features), entry.id});
      nodes_created += r.nodes_created;
    } catch (const Error& e) {
      throw DataError("build_index: entry '" + entry.id + "': " + e.what());
    }
  }

  if (report != nullptr) {
    report->build_ms = ms_since(start);
    report->nodes_created = nodes_created;
    report->tree = tree.stats();
    report->leaf_occupancy_histogram.clear();
    tree.visit_depth_first([&](const FattNode& node, int) {
      if (node.level() != tree.config().depth || node.entries().empty()) return;
      const std::size_t occupancy = node.entries().size();
      if (report->leaf_occupancy_histogram.size() < occupancy)
        report->leaf_occupancy_histogram.resize(occupancy, 0);
      ++report->leaf_occupancy_histogram[occupancy - 1];
    });
  }
  return tree;
}

EvalReport run_qbe(const FattTree& tree, const Dataset& dataset,
                   const std::vector<std::string>& query_ids, std::size_t top_k, int radius) {
  if (top_k < 1) throw InvalidArgument("run_qbe: top_k must be >= 1");

  // Snapshot of everything indexed, in deterministic DFS order, for the
  // brute-force baseline.
  struct Indexed {
    const ImageEntry* entry;
    const DatasetEntry* source;
  };
  std::vector<Indexed> all;
  tree.visit_depth_first([&](const FattNode& node, int) {
    for (const ImageEntry& e : node.entries()) all.push_back({&e, dataset.find(e.id)});
  });

  EvalReport report;
  report.top_k = top_k;
  report.rows.reserve(query_ids.size());

  for (const std::string& qid : query_ids) {
    const DatasetEntry* query = dataset.find(qid);
    if (query == nullptr) throw DataError("run_qbe: unknown query id '" + qid + "'");

    // The stored entry for the query id carries exactly the features/code
    // its raster codes to (build_index put them there), so QBE reuses them.
    const ImageEntry* stored = nullptr;
    for (const Indexed& ix : all)
      if (ix.entry->id == qid) stored = ix.entry;
    if (stored == nullptr) throw DataError("run_qbe: query id '" + qid + "' is not indexed");

    QueryRow row;
    row.query_id = qid;
    const auto start = std::chrono::steady_clock::now();
    auto [results, stats] = tree.retrieve(stored->features, stored->code, top_k, radius, qid);
    row.wall_ms = ms_since(start);
    row.results = std::move(results);
    row.stats = stats;

    // Brute-force baseline over every other indexed entry.
    std::vector<RankedMatch> linear;
    linear.reserve(all.size());
    for (const Indexed& ix : all) {
      if (ix.entry->id == qid) continue;
      linear.push_back({ix.entry->id, euclidean_distance(stored->features, ix.entry->features)});
    }
    row.linear_computations = linear.size();
    std::sort(linear.begin(), linear.end(), [](const RankedMatch& a, const RankedMatch& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      return a.id < b.id;
    });
    if (linear.size() > top_k) linear.resize(top_k);
    row.linear_results = std::move(linear);

    if (!row.results.empty()) {
      std::size_t same_category = 0;
      for (const RankedMatch& m : row.results) {
        const DatasetEntry* hit = dataset.find(m.id);
        if (hit != nullptr && hit->category == query->category) ++same_category;
      }
      row.precision_at_k = static_cast<double>(same_category) /
                           static_cast<double>(row.results.size());
    }
    report.rows.push_back(std::move(row));
  }

  if (!report.rows.empty()) {
    double precision = 0.0, nodes = 0.0, dist = 0.0, linear = 0.0;
    for (const QueryRow& row : report.rows) {
      precision += row.precision_at_k;
      nodes += static_cast<double>(row.stats.nodes_visited);
      dist += static_cast<double>(row.stats.distance_computations);
      linear += static_cast<double>(row.linear_computations);
    }
    const double count = static_cast<double>(report.rows.size());
    report.mean_precision = precision / count;
    report.mean_nodes_visited = nodes / count;
    report.mean_distance_computations = dist / count;
    report.mean_linear_computations = linear / count;
  }
  return report;
}

std::vector<ScalingRow> bench_scaling(const std::vector<std::size_t>& sizes,
                                      const IndexConfig& cfg, std::uint64_t seed,
                                      const ScalingOptions& options) {
  if (sizes.empty()) throw InvalidArgument("bench_scaling: no sizes");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
    if (!(sizes[i] < sizes[i + 1]))
      throw InvalidArgument("bench_scaling: sizes must be strictly ascending");

  IndexConfig bench_cfg = cfg;
  bench_cfg.side = options.side;
  bench_cfg.validate();

  std::vector<ScalingRow> rows;
  rows.reserve(sizes.size());
  for (const std::size_t n : sizes) {
    if (n == 0) throw InvalidArgument("bench_scaling: database size 0");
    const Dataset dataset = synthetic_dataset(seed, options.side, options.categories, n);

    BuildReport build;
    const FattTree tree = build_index(dataset, bench_cfg, &build);

    const std::size_t battery = std::min(options.battery, n);
    ScalingRow row;
    row.n = n;
    row.build_ms = build.build_ms;
    row.mean_linear_comp = static_cast<double>(n - 1);

    double nodes = 0.0, dist = 0.0;
    for (std::size_t q = 0; q < battery; ++q) {
      const std::size_t idx = q * n / battery;
      const DatasetEntry& query = dataset.entries[idx];
      const coding::CodeResult coded = code_raster(query.raster, bench_cfg);

      auto [leaf, search_stats] = tree.search(coded.code);
      if (leaf == nullptr) throw Error("bench_scaling: indexed image not found by exact search");
      nodes += static_cast<double>(search_stats.nodes_visited);

      auto [results, retrieve_stats] = tree.retrieve(
          coded.features, coded.code, std::min(options.top_k, n), options.radius, query.id);
      dist += static_cast<double>(retrieve_stats.distance_computations);
      if (retrieve_stats.distance_computations > static_cast<std::uint64_t>(n - 1))
        throw Error("bench_scaling: index scored more distances than the linear scan");
    }
    row.mean_nodes_visited = nodes / static_cast<double>(battery);
    row.mean_dist_comp = dist / static_cast<double>(battery);

    const double depth_bound = static_cast<double>(bench_cfg.coding.depth + 1);
    if (row.mean_nodes_visited > depth_bound)
      throw Error("bench_scaling: exact-search node accesses exceed depth+1");
    if (n > 1 && !(row.mean_dist_comp < row.mean_linear_comp))
      throw Error("bench_scaling: candidate set did not beat the linear scan at n=" +
                  std::to_string(n) + "; synthetic codes are not spreading over leaves");
    rows.push_back(row);
    log::info("bench n=" + std::to_string(n) + " build_ms=" + std::to_string(build.build_ms));
  }

  // Cost flatness across database sizes.
  double lo = rows.front().mean_nodes_visited, hi = lo;
  for (const ScalingRow& row : rows) {
    lo = std::min(lo, row.mean_nodes_visited);
    hi = std::max(hi, row.mean_nodes_visited);
  }
  if (lo > 0.0 && (hi - lo) / lo >= 0.10)
    throw Error("bench_scaling: exact-search cost varied by >= 10% across sizes");
  return rows;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  std::string out = "n,mean_nodes_visited,mean_dist_comp,mean_linear_comp,build_ms\n";
  for (const ScalingRow& row : rows) {
    out += std::to_string(row.n);
    out += ',';
    append_csv_number(out, row.mean_nodes_visited);
    out += ',';
    append_csv_number(out, row.mean_dist_comp);
    out += ',';
    append_csv_number(out, row.mean_linear_comp);
    out += ',';
    append_csv_number(out, row.build_ms, "%.3f");
    out += '\n';
  }
  return out;
}

std::string eval_csv(const EvalReport& report) {
  std::string out = "query_id,rank,result_id,distance,precision_at_k,nodes_visited,dist_comp\n";
  for (const QueryRow& row : report.rows) {
    for (std::size_t r = 0; r < row.results.size(); ++r) {
      out += row.query_id;
      out += ',';
      out += std::to_string(r + 1);
      out += ',';
      out += row.results[r].id;
      out += ',';
      append_csv_number(out, row.results[r].distance, "%.12g");
      out += ',';
      append_csv_number(out, row.precision_at_k);
      out += ',';
      out += std::to_string(row.stats.nodes_visited);
      out += ',';
      out += std::to_string(row.stats.distance_computations);
      out += '\n';
    }
  }
  return out;
}

}  // namespace fatt::harness
