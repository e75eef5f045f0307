#include "fatt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fatt/errors.hpp"

namespace fatt {

NodeAddress child_index(NodeAddress address, int digit, int branching) {
  if (address < 1) throw InvalidArgument("child_index: addresses start at 1");
  if (branching < 2) throw InvalidArgument("child_index: branching must be >= 2");
  if (digit < 0 || digit >= branching)
    throw InvalidArgument("child_index: digit " + std::to_string(digit) +
                          " out of range for branching " + std::to_string(branching));
  const NodeAddress b = static_cast<NodeAddress>(branching);
  if (address > (std::numeric_limits<NodeAddress>::max() - static_cast<NodeAddress>(digit)) / b)
    throw InvalidArgument("child_index: address overflow");
  return b * address + static_cast<NodeAddress>(digit);
}

NodeAddress parent_index(NodeAddress address, int branching) {
  if (branching < 2) throw InvalidArgument("parent_index: branching must be >= 2");
  if (address <= 1) throw InvalidArgument("parent_index: the root has no parent");
  return address / static_cast<NodeAddress>(branching);
}

NodeAddress address_of(const coding::IndexCode& code, int branching) {
  NodeAddress a = 1;
  for (int digit : code.digits) a = child_index(a, digit, branching);
  return a;
}

std::uint64_t FattConfig::capacity() const {
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < depth; ++i) c *= static_cast<std::uint64_t>(branching);
  return c;
}

void FattConfig::validate() const {
  if (branching < 2) throw InvalidArgument("fatt config: branching must be >= 2");
  if (depth < 1) throw InvalidArgument("fatt config: depth must be >= 1");
  if (tolerance_default < 0 || tolerance_default > branching - 1)
    throw InvalidArgument("fatt config: tolerance must be in [0, branching-1]");
  // Leaf addresses reach 2*B^m - 1; keep them well inside 64 bits.
  std::uint64_t a = 1;
  const std::uint64_t limit = std::uint64_t{1} << 62;
  for (std::size_t i = 0; i < depth; ++i) {
    if (a > limit / static_cast<std::uint64_t>(branching))
      throw InvalidArgument("fatt config: branching^depth exceeds the address space");
    a *= static_cast<std::uint64_t>(branching);
  }
}

FattTree::FattTree(FattConfig config) : config_(config) {
  config_.validate();
  root_ = std::unique_ptr<FattNode>(new FattNode(1, 0));
}

void FattTree::check_code(const coding::IndexCode& code) const {
  if (code.digits.size() != config_.depth)
    throw InvalidArgument("code has " + std::to_string(code.digits.size()) +
                          " digits, tree depth is " + std::to_string(config_.depth));
  for (int d : code.digits)
    if (d < 0 || d >= config_.branching)
      throw InvalidArgument("code digit " + std::to_string(d) +
                            " out of range for branching " + std::to_string(config_.branching));
}

InsertReport FattTree::insert(ImageEntry entry) {
  check_code(entry.code);
  if (feature_length_ == 0 && !entry.features.empty()) {
    feature_length_ = entry.features.size();
  } else if (entry.features.size() != feature_length_) {
    throw InvalidArgument("entry '" + entry.id + "' has feature length " +
                          std::to_string(entry.features.size()) + ", index uses " +
                          std::to_string(feature_length_));
  }

  InsertReport report;
  FattNode* node = root_.get();
  for (int digit : entry.code.digits) {
    auto it = node->children_.find(digit);
    if (it == node->children_.end()) {
      const NodeAddress addr = child_index(node->address_, digit, config_.branching);
      auto child = std::unique_ptr<FattNode>(new FattNode(addr, node->level_ + 1));
      it = node->children_.emplace(digit, std::move(child)).first;
      ++report.nodes_created;
      ++node_count_;
    }
    node = it->second.get();
  }
  report.leaf_address = node->address_;

  auto existing = std::find_if(node->entries_.begin(), node->entries_.end(),
                               [&](const ImageEntry& e) { return e.id == entry.id; });
  if (existing != node->entries_.end()) {
    *existing = std::move(entry);
    report.replaced_existing = true;
  } else {
    node->entries_.push_back(std::move(entry));
    ++entry_count_;
  }
  return report;
}

std::pair<const FattNode*, SearchStats> FattTree::search(const coding::IndexCode& code) const {
  check_code(code);
  SearchStats stats;
  const FattNode* node = root_.get();
  stats.nodes_visited = 1;
  for (int digit : code.digits) {
    const FattNode* child = node->child(digit);
    if (child == nullptr) return {nullptr, stats};
    node = child;
    ++stats.nodes_visited;
  }
  return {node, stats};
}

std::pair<std::vector<const FattNode*>, SearchStats> FattTree::tolerant_search(
    const coding::IndexCode& code, int radius) const {
  check_code(code);
  if (radius < 0 || radius > config_.branching - 1)
    throw InvalidArgument("tolerant_search: radius must be in [0, branching-1]");

  SearchStats stats;
  stats.nodes_visited = 1;
  const FattNode* node = root_.get();
  const FattNode* last_parent = nullptr;  // node at level depth-1 on the path
  for (int digit : code.digits) {
    if (node->level_ + 1 == config_.depth) last_parent = node;
    const FattNode* child = node->child(digit);
    if (child == nullptr) {
      node = nullptr;
      break;
    }
    node = child;
    ++stats.nodes_visited;
  }
  // `node` is the exact leaf or null; the fast path needs no probing.
  if (node != nullptr && !node->entries_.empty()) return {{node}, stats};

  std::vector<const FattNode*> candidates;
  if (last_parent == nullptr) return {candidates, stats};  // prefix diverged above the last level

  // Last-level rectification: same prefix, last digit within +/- radius,
  // nearest first; at equal distance the lower digit goes first.
  const int exact = code.digits.back();
  for (int delta = 1; delta <= radius; ++delta) {
    for (const int candidate_digit : {exact - delta, exact + delta}) {
      if (candidate_digit < 0 || candidate_digit >= config_.branching) continue;
      const FattNode* leaf = last_parent->child(candidate_digit);
      if (leaf == nullptr) continue;
      ++stats.nodes_visited;
      ++stats.leaves_probed;
      if (!leaf->entries_.empty()) candidates.push_back(leaf);
    }
  }
  return {candidates, stats};
}

std::pair<std::vector<RankedMatch>, SearchStats> FattTree::retrieve(
    std::span<const double> query_features, const coding::IndexCode& query_code,
    std::size_t top_k, int radius, std::string_view exclude_id) const {
  if (top_k < 1) throw InvalidArgument("retrieve: top_k must be >= 1");
  if (feature_length_ != 0 && query_features.size() != feature_length_)
    throw InvalidArgument("retrieve: query feature length " +
                          std::to_string(query_features.size()) + " != index feature length " +
                          std::to_string(feature_length_));

  auto [candidates, stats] = tolerant_search(query_code, radius);
  std::vector<RankedMatch> matches;
  for (const FattNode* leaf : candidates) {
    for (const ImageEntry& entry : leaf->entries_) {
      if (!exclude_id.empty() && entry.id == exclude_id) continue;
      matches.push_back({entry.id, euclidean_distance(query_features, entry.features)});
      ++stats.distance_computations;
    }
  }
  std::sort(matches.begin(), matches.end(), [](const RankedMatch& a, const RankedMatch& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  });
  if (matches.size() > top_k) matches.resize(top_k);
  return {std::move(matches), stats};
}

TreeReport FattTree::stats() const {
  TreeReport report;
  report.entry_count = entry_count_;
  report.capacity = config_.capacity();
  report.nodes_per_level.assign(config_.depth + 1, 0);
  visit_depth_first([&](const FattNode& node, int) {
    ++report.node_count;
    ++report.nodes_per_level[node.level()];
    if (node.level() == config_.depth && !node.entries().empty()) {
      ++report.occupied_leaves;
      report.max_leaf_occupancy = std::max(report.max_leaf_occupancy,
                                           static_cast<std::uint64_t>(node.entries().size()));
    }
  });
  report.mean_leaf_occupancy =
      report.occupied_leaves == 0
          ? 0.0
          : static_cast<double>(report.entry_count) / static_cast<double>(report.occupied_leaves);
  return report;
}

void FattTree::audit() const {
  std::uint64_t seen_nodes = 0;
  std::uint64_t seen_entries = 0;
  std::vector<int> path;

  const std::function<void(const FattNode&)> walk = [&](const FattNode& node) {
    ++seen_nodes;
    if (node.level() != path.size())
      throw Error("audit: node level " + std::to_string(node.level()) + " != path depth " +
                  std::to_string(path.size()));
    NodeAddress expected = 1;
    for (int d : path) expected = child_index(expected, d, config_.branching);
    if (node.address() != expected)
      throw Error("audit: node address " + std::to_string(node.address()) +
                  " != path address " + std::to_string(expected));
    if (!node.entries().empty() && node.level() != config_.depth)
      throw Error("audit: interior node " + std::to_string(node.address()) + " holds entries");
    if (node.level() == config_.depth) {
      for (const ImageEntry& e : node.entries()) {
        ++seen_entries;
        check_code(e.code);
        if (address_of(e.code, config_.branching) != node.address())
          throw Error("audit: entry '" + e.id + "' coded for a different leaf");
        if (e.features.size() != feature_length_)
          throw Error("audit: entry '" + e.id + "' feature length mismatch");
      }
      if (!node.children().empty())
        throw Error("audit: leaf " + std::to_string(node.address()) + " has children");
    }
    for (const auto& [digit, child] : node.children()) {
      if (digit < 0 || digit >= config_.branching)
        throw Error("audit: child digit out of range");
      if (child->address() != child_index(node.address(), digit, config_.branching))
        throw Error("audit: child address inconsistent with its digit");
      path.push_back(digit);
      walk(*child);
      path.pop_back();
    }
  };
  walk(*root_);

  if (seen_nodes != node_count_)
    throw Error("audit: node count " + std::to_string(seen_nodes) + " != tracked " +
                std::to_string(node_count_));
  if (seen_entries != entry_count_)
    throw Error("audit: entry count " + std::to_string(seen_entries) + " != tracked " +
                std::to_string(entry_count_));
}

void FattTree::visit_depth_first(const std::function<void(const FattNode&, int)>& visit) const {
  const std::function<void(const FattNode&, int)> walk = [&](const FattNode& node, int digit) {
    visit(node, digit);
    for (const auto& [child_digit, child] : node.children_) walk(*child, child_digit);
  };
  walk(*root_, 0);
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("euclidean_distance: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace fatt
