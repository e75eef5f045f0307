// fatt: build, query, and benchmark feature-indexed image databases.
//
// Exit codes: 0 success, 1 usage error, 2 data/corruption error.
// Timing goes to stderr; stdout stays deterministic for fixed inputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fatt/errors.hpp"
#include "fatt/harness.hpp"
#include "fatt/log.hpp"
#include "fatt/store.hpp"

namespace {

using namespace fatt;

struct ConfigFlags {
  int branching = 16;
  std::size_t depth = 6;
  std::size_t block_grid = 3;
  std::uint32_t side = 256;
  std::uint32_t levels = 4;
  int tolerance = 1;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--branching", flags.branching, "Digits per code position (tree fanout)")
      ->check(CLI::Range(2, 65536));
  cmd->add_option("--depth", flags.depth, "Code length / tree depth");
  cmd->add_option("--k", flags.block_grid, "Feature matrix side (k x k tile grid)");
  cmd->add_option("--side", flags.side, "Canonical image side (power of two)");
  cmd->add_option("--levels", flags.levels, "Wavelet decomposition levels");
  cmd->add_option("--tolerance", flags.tolerance, "Default last-digit search radius");
}

IndexConfig make_config(const ConfigFlags& flags) {
  IndexConfig cfg;
  cfg.coding.branching = flags.branching;
  cfg.coding.depth = flags.depth;
  cfg.coding.block_grid = flags.block_grid;
  cfg.coding.levels = flags.levels;
  cfg.coding.selection = coding::CodingConfig::default_selection(flags.depth, flags.levels);
  cfg.coding.table = coding::CodeTable::uniform(flags.branching);
  cfg.coding.normalization.range_max = 10.0 * flags.branching;
  cfg.side = flags.side;
  cfg.tolerance_default = flags.tolerance;
  cfg.validate();
  return cfg;
}

int run_build(const std::string& input, const std::string& out, const ConfigFlags& flags) {
  const IndexConfig cfg = make_config(flags);
  const harness::Dataset dataset = harness::ingest_dataset(input, cfg.side);
  harness::BuildReport report;
  const FattTree tree = harness::build_index(dataset, cfg, &report);
  const std::uint64_t bytes = store::save_index(tree, cfg, out);

  std::fprintf(stderr, "indexed %llu images into %s (%llu bytes) in %.1f ms\n",
               static_cast<unsigned long long>(tree.entry_count()), out.c_str(),
               static_cast<unsigned long long>(bytes), report.build_ms);
  std::printf("entries %llu\n", static_cast<unsigned long long>(report.tree.entry_count));
  std::printf("occupied_leaves %llu\n",
              static_cast<unsigned long long>(report.tree.occupied_leaves));
  return 0;
}

int run_query(const std::string& index_path, const std::string& image_path, std::size_t top_k,
              int radius_flag, bool radius_given, bool json) {
  store::LoadResult loaded = store::load_index(index_path);
  const int radius = radius_given ? radius_flag : loaded.config.tolerance_default;

  const Raster raster = load_raster(image_path, loaded.config.side);
  const coding::CodeResult coded = harness::code_raster(raster, loaded.config);
  const auto [results, stats] =
      loaded.tree.retrieve(coded.features, coded.code, top_k, radius);

  std::fprintf(stderr, "query code %s, %llu nodes visited, %llu distances\n",
               coding::render_code(coded.code, loaded.config.coding.branching).c_str(),
               static_cast<unsigned long long>(stats.nodes_visited),
               static_cast<unsigned long long>(stats.distance_computations));

  for (std::size_t i = 0; i < results.size(); ++i) {
    if (json) {
      nlohmann::json line = {{"rank", i + 1}, {"id", results[i].id},
                             {"distance", results[i].distance}};
      std::printf("%s\n", line.dump().c_str());
    } else {
      std::printf("%zu\t%s\t%.12g\n", i + 1, results[i].id.c_str(), results[i].distance);
    }
  }
  return 0;
}

int run_code(const std::string& image_path, const ConfigFlags& flags) {
  const IndexConfig cfg = make_config(flags);
  const Raster raster = load_raster(image_path, cfg.side);
  const coding::CodeResult coded = harness::code_raster(raster, cfg);
  std::printf("%s\n", coding::render_code(coded.code, cfg.coding.branching).c_str());
  return 0;
}

int run_stats(const std::string& index_path) {
  store::LoadResult loaded = store::load_index(index_path);
  const TreeReport report = loaded.tree.stats();
  const coding::CodingConfig& c = loaded.config.coding;

  std::printf("branching %d\n", c.branching);
  std::printf("depth %zu\n", c.depth);
  std::printf("block_grid %zu\n", c.block_grid);
  std::printf("levels %u\n", c.levels);
  std::printf("side %u\n", loaded.config.side);
  std::printf("capacity %llu\n", static_cast<unsigned long long>(report.capacity));
  std::printf("entries %llu\n", static_cast<unsigned long long>(report.entry_count));
  std::printf("nodes %llu\n", static_cast<unsigned long long>(report.node_count));
  for (std::size_t level = 0; level < report.nodes_per_level.size(); ++level)
    std::printf("nodes_level_%zu %llu\n", level,
                static_cast<unsigned long long>(report.nodes_per_level[level]));
  std::printf("occupied_leaves %llu\n", static_cast<unsigned long long>(report.occupied_leaves));
  std::printf("max_leaf_occupancy %llu\n",
              static_cast<unsigned long long>(report.max_leaf_occupancy));
  std::printf("mean_leaf_occupancy %.6f\n", report.mean_leaf_occupancy);
  return 0;
}

int run_bench(const std::vector<std::size_t>& sizes, std::uint64_t seed, const std::string& out,
              const ConfigFlags& flags, harness::ScalingOptions options) {
  options.side = flags.side;
  const IndexConfig cfg = make_config(flags);
  const std::vector<harness::ScalingRow> rows = harness::bench_scaling(sizes, cfg, seed, options);
  const std::string csv = harness::scaling_csv(rows);

  if (!out.empty()) {
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file) throw DataError("cannot write " + out);
    file << csv;
  }
  // stdout stays deterministic: timing column lives only in the CSV file.
  std::printf("n,mean_nodes_visited,mean_dist_comp,mean_linear_comp\n");
  for (const harness::ScalingRow& row : rows)
    std::printf("%zu,%.6f,%.6f,%.6f\n", row.n, row.mean_nodes_visited, row.mean_dist_comp,
                row.mean_linear_comp);
  for (const harness::ScalingRow& row : rows)
    std::fprintf(stderr, "n=%zu build %.1f ms\n", row.n, row.build_ms);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feature-based adaptive tolerance tree image index"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build", "Index a directory of images");
  std::string build_input, build_out;
  ConfigFlags build_flags;
  build->add_option("--input", build_input, "Image directory")->required();
  build->add_option("--out", build_out, "Index file to write")->required();
  add_config_flags(build, build_flags);

  auto* query = app.add_subcommand("query", "Rank indexed images against a query image");
  std::string query_index, query_image;
  std::size_t top_k = 10;
  int radius = 1;
  bool json = false;
  query->add_option("--index", query_index, "Index file")->required();
  query->add_option("--image", query_image, "Query image")->required();
  query->add_option("--top-k", top_k, "Results to return");
  auto* radius_opt = query->add_option("--radius", radius, "Last-digit search radius");
  query->add_flag("--json", json, "One JSON object per result line");

  auto* code = app.add_subcommand("code", "Print the index code of an image");
  std::string code_image;
  ConfigFlags code_flags;
  code->add_option("--image", code_image, "Image file")->required();
  add_config_flags(code, code_flags);

  auto* stats = app.add_subcommand("stats", "Describe an index file");
  std::string stats_index;
  stats->add_option("--index", stats_index, "Index file")->required();

  auto* bench = app.add_subcommand("bench", "Scaling benchmark over synthetic databases");
  std::vector<std::size_t> sizes = {100, 500, 1000};
  std::uint64_t seed = 7;
  std::string bench_out;
  harness::ScalingOptions options;
  ConfigFlags bench_flags;
  bench_flags.side = 64;  // synthetic images default small; --side overrides
  bench->add_option("--sizes", sizes, "Ascending database sizes")->delimiter(',');
  bench->add_option("--seed", seed, "Generator seed");
  bench->add_option("--out", bench_out, "CSV output path");
  bench->add_option("--queries", options.battery, "Queries per database size");
  bench->add_option("--categories", options.categories, "Synthetic category count");
  bench->add_option("--top-k", options.top_k, "Results per query");
  bench->add_option("--radius", options.radius, "Last-digit search radius");
  add_config_flags(bench, bench_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help to stdout, errors + usage to stderr
    return code == 0 ? 0 : 1;
  }

  try {
    if (build->parsed()) return run_build(build_input, build_out, build_flags);
    if (query->parsed())
      return run_query(query_index, query_image, top_k, radius, radius_opt->count() > 0, json);
    if (code->parsed()) return run_code(code_image, code_flags);
    if (stats->parsed()) return run_stats(stats_index);
    if (bench->parsed()) return run_bench(sizes, seed, bench_out, bench_flags, options);
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "fatt: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fatt: %s\n", e.what());
    return 2;
  }
  return 1;
}
