#ifndef FATT_TREE_HPP
#define FATT_TREE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fatt/coding.hpp"

namespace fatt {

using NodeAddress = std::uint64_t;

// Implicit array addressing: the root is 1, the children of A are
// {B*A + j : 0 <= j < B}, the parent of A is floor(A/B). A node at level L
// therefore has an address in [B^L, 2*B^L).
NodeAddress child_index(NodeAddress address, int digit, int branching);
NodeAddress parent_index(NodeAddress address, int branching);

// Leaf address for a full code: folds child_index over the digits, i.e.
// B^m + sum digit_i * B^(m-i).
NodeAddress address_of(const coding::IndexCode& code, int branching);

struct FattConfig {
  int branching = 16;       // N-ary fanout B
  std::size_t depth = 6;    // m: edges on every root-to-leaf path
  int tolerance_default = 1;

  std::uint64_t capacity() const;  // B^m distinct leaf addresses
  void validate() const;
};

// One indexed image: its identifier, leaf code, and the Euclidean feature
// vector ranked at retrieval time.
struct ImageEntry {
  std::string id;
  coding::IndexCode code;
  std::vector<double> features;
  std::string source_path;
};

struct SearchStats {
  std::uint64_t nodes_visited = 0;
  std::uint64_t distance_computations = 0;
  std::uint64_t leaves_probed = 0;  // tolerance probes beyond the exact path

  SearchStats& operator+=(const SearchStats& other) {
    nodes_visited += other.nodes_visited;
    distance_computations += other.distance_computations;
    leaves_probed += other.leaves_probed;
    return *this;
  }
};

class FattTree;

class FattNode {
 public:
  NodeAddress address() const { return address_; }
  std::size_t level() const { return level_; }
  const std::map<int, std::unique_ptr<FattNode>>& children() const { return children_; }
  const std::vector<ImageEntry>& entries() const { return entries_; }

  const FattNode* child(int digit) const {
    auto it = children_.find(digit);
    return it == children_.end() ? nullptr : it->second.get();
  }

 private:
  friend class FattTree;
  FattNode(NodeAddress address, std::size_t level) : address_(address), level_(level) {}

  NodeAddress address_;
  std::size_t level_;
  std::map<int, std::unique_ptr<FattNode>> children_;  // ordered: DFS is digit-ascending
  std::vector<ImageEntry> entries_;                    // leaf level only
};

struct InsertReport {
  std::uint64_t nodes_created = 0;
  NodeAddress leaf_address = 0;
  bool replaced_existing = false;
};

struct TreeReport {
  std::uint64_t entry_count = 0;
  std::vector<std::uint64_t> nodes_per_level;  // size depth+1, root first
  std::uint64_t node_count = 0;
  std::uint64_t occupied_leaves = 0;
  std::uint64_t max_leaf_occupancy = 0;
  double mean_leaf_occupancy = 0.0;
  std::uint64_t capacity = 0;

  bool operator==(const TreeReport&) const = default;
};

struct RankedMatch {
  std::string id;
  double distance = 0.0;

  bool operator==(const RankedMatch&) const = default;
};

// Fixed-depth N-ary index. Nodes materialize lazily on insertion; every
// root-to-leaf path has exactly `depth` edges and leaves hold the entries.
//
// Writes must be serialized by the caller; any number of threads may search
// a quiescent tree concurrently.
class FattTree {
 public:
  explicit FattTree(FattConfig config);

  const FattConfig& config() const { return config_; }
  std::uint64_t entry_count() const { return entry_count_; }
  std::size_t feature_length() const { return feature_length_; }  // 0 until first insert
  const FattNode& root() const { return *root_; }

  // Digit-guided descent creating missing nodes. An entry with the same id
  // already present at the leaf is replaced.
  InsertReport insert(ImageEntry entry);

  // Exact descent: visits at most depth+1 nodes regardless of tree size.
  // Returns the leaf, or nullptr as soon as a digit's child is missing.
  std::pair<const FattNode*, SearchStats> search(const coding::IndexCode& code) const;

  // Exact search first; on a miss, probes sibling leaves whose last digit is
  // within +/- radius (same prefix), nearest digits first (lower digit before
  // higher at equal distance). Returns every nonempty leaf found.
  std::pair<std::vector<const FattNode*>, SearchStats> tolerant_search(
      const coding::IndexCode& code, int radius) const;

  // Ranks all entries in the tolerant candidate set by Euclidean distance,
  // ascending, ties by id; returns the best top_k. Entries whose id equals
  // exclude_id are not scored (query-by-example uses this to skip the query
  // itself).
  std::pair<std::vector<RankedMatch>, SearchStats> retrieve(
      std::span<const double> query_features, const coding::IndexCode& query_code,
      std::size_t top_k, int radius, std::string_view exclude_id = {}) const;

  TreeReport stats() const;

  // Full-tree consistency check: recomputes every node's address from its
  // digit path, checks levels, leaf-only entries, and code/address agreement.
  // Throws Error on the first violation.
  void audit() const;

  // Pre-order DFS, children in ascending digit order. The callback receives
  // the node and the digit that leads to it from its parent (0 for the root).
  void visit_depth_first(const std::function<void(const FattNode&, int)>& visit) const;

 private:
  void check_code(const coding::IndexCode& code) const;

  FattConfig config_;
  std::unique_ptr<FattNode> root_;
  std::uint64_t entry_count_ = 0;
  std::uint64_t node_count_ = 1;
  std::size_t feature_length_ = 0;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

}  // namespace fatt

#endif
