#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include "fatt/dataset.hpp"
#include "fatt/errors.hpp"
#include "fatt/tree.hpp"

using namespace fatt;
using coding::IndexCode;

namespace {

IndexCode code_of(std::initializer_list<int> digits) { return IndexCode{digits}; }

std::vector<double> features_for(std::uint64_t seed, std::size_t len = 4) {
  harness::SplitMix64 rng(seed);
  std::vector<double> f(len);
  for (double& v : f) v = rng.uniform();
  return f;
}

ImageEntry entry(std::string id, IndexCode code, std::uint64_t seed) {
  return {std::move(id), std::move(code), features_for(seed), ""};
}

// All codes of the given shape, in lexicographic order.
std::vector<IndexCode> all_codes(int branching, std::size_t depth) {
  std::vector<IndexCode> out;
  IndexCode code;
  code.digits.assign(depth, 0);
  while (true) {
    out.push_back(code);
    std::size_t i = depth;
    while (i > 0 && code.digits[i - 1] == branching - 1) code.digits[--i] = 0;
    if (i == 0) break;
    ++code.digits[i - 1];
  }
  return out;
}

}  // namespace

TEST_CASE("child_index reproduces the printed special cases") {
  CHECK(child_index(1, 0, 2) == 2);   // left child of the root at 2A
  CHECK(child_index(1, 1, 2) == 3);   // right child at 2A+1
  CHECK(child_index(1, 0, 3) == 3);
  CHECK(child_index(1, 1, 3) == 4);
  CHECK(child_index(1, 2, 3) == 5);   // right child at 3A+2
  CHECK(child_index(child_index(1, 1, 2), 0, 2) == 6);
  CHECK_THROWS_AS(child_index(1, 2, 2), InvalidArgument);
  CHECK_THROWS_AS(child_index(0, 0, 2), InvalidArgument);
}

TEST_CASE("parent_index floors the division and rejects the root") {
  CHECK(parent_index(5, 3) == 1);
  CHECK(parent_index(2, 2) == 1);
  CHECK(parent_index(7, 2) == 3);
  CHECK_THROWS_AS(parent_index(1, 2), InvalidArgument);
}

TEST_CASE("parent of child round-trips exhaustively") {
  for (int branching : {2, 3, 16}) {
    for (NodeAddress a = 1; a <= 10000; ++a) {
      for (int digit = 0; digit < branching; ++digit) {
        CHECK(parent_index(child_index(a, digit, branching), branching) == a);
      }
    }
  }
}

TEST_CASE("level ranges hold for materialized addresses") {
  // Nodes created by descending digits stay inside [B^L, 2 B^L).
  for (int branching : {2, 3, 16}) {
    harness::SplitMix64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
      NodeAddress address = 1;
      NodeAddress low = 1;
      for (int level = 1; level <= 4; ++level) {
        address = child_index(address, static_cast<int>(rng.below(branching)), branching);
        low *= static_cast<NodeAddress>(branching);
        CHECK(address >= low);
        CHECK(address < 2 * low);
      }
    }
  }
}

TEST_CASE("address_of folds child_index over the digits") {
  CHECK(address_of(code_of({0, 0, 0, 0}), 2) == 16);
  CHECK(address_of(code_of({1, 1}), 2) == 7);
  CHECK(address_of(code_of({1, 1, 1, 1}), 2) == 31);     // rightmost leaf: 2 B^m - 1
  CHECK(address_of(code_of({15, 15, 15}), 16) == 8191);  // 2*16^3 - 1
  harness::SplitMix64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    IndexCode code;
    for (int i = 0; i < 5; ++i) code.digits.push_back(static_cast<int>(rng.below(16)));
    NodeAddress folded = 1;
    for (int d : code.digits) folded = child_index(folded, d, 16);
    CHECK(address_of(code, 16) == folded);
  }
}

TEST_CASE("config capacity and validation") {
  CHECK(FattConfig{2, 4}.capacity() == 16);
  CHECK(FattConfig{3, 4}.capacity() == 81);
  CHECK(FattConfig{16, 6}.capacity() == 16777216);
  CHECK_THROWS_AS((FattConfig{1, 4}).validate(), InvalidArgument);
  CHECK_THROWS_AS((FattConfig{2, 0}).validate(), InvalidArgument);
  CHECK_THROWS_AS((FattConfig{256, 9}).validate(), InvalidArgument);  // 256^9 > 2^62
}

TEST_CASE("insert materializes one node per level") {
  FattTree tree(FattConfig{2, 4});
  const InsertReport r = tree.insert(entry("a", code_of({0, 0, 0, 0}), 1));
  CHECK(r.nodes_created == 4);
  CHECK(r.leaf_address == 16);
  CHECK_FALSE(r.replaced_existing);

  const TreeReport stats = tree.stats();
  CHECK(stats.node_count == 5);
  CHECK(stats.entry_count == 1);
  CHECK(stats.nodes_per_level == std::vector<std::uint64_t>{1, 1, 1, 1, 1});
}

TEST_CASE("insert replaces duplicates by id") {
  FattTree tree(FattConfig{2, 4});
  tree.insert(entry("a", code_of({0, 1, 0, 1}), 1));
  const InsertReport r = tree.insert(entry("a", code_of({0, 1, 0, 1}), 2));
  CHECK(r.replaced_existing);
  CHECK(tree.entry_count() == 1);
  const auto [leaf, stats] = tree.search(code_of({0, 1, 0, 1}));
  REQUIRE(leaf != nullptr);
  REQUIRE(leaf->entries().size() == 1);
  CHECK(leaf->entries()[0].features == features_for(2));
}

TEST_CASE("a full B=2 m=4 tree has 16 occupied leaves") {
  FattTree tree(FattConfig{2, 4});
  std::uint64_t i = 0;
  std::set<NodeAddress> leaves;
  for (const IndexCode& code : all_codes(2, 4)) {
    const InsertReport r = tree.insert(entry("img" + std::to_string(i), code, i));
    leaves.insert(r.leaf_address);
    ++i;
  }
  CHECK(i == 16);
  CHECK(leaves.size() == 16);
  const TreeReport stats = tree.stats();
  CHECK(stats.occupied_leaves == 16);
  CHECK(stats.capacity == 16);
  CHECK(stats.node_count == 1 + 2 + 4 + 8 + 16);
  tree.audit();
}

TEST_CASE("insert validates code shape") {
  FattTree tree(FattConfig{2, 4});
  CHECK_THROWS_AS(tree.insert(entry("a", code_of({0, 1}), 1)), InvalidArgument);
  CHECK_THROWS_AS(tree.insert(entry("a", code_of({0, 1, 2, 0}), 1)), InvalidArgument);
}

TEST_CASE("insert enforces a uniform feature length") {
  FattTree tree(FattConfig{2, 2});
  tree.insert(entry("a", code_of({0, 0}), 1));
  ImageEntry bad{"b", code_of({0, 1}), {1.0, 2.0}, ""};
  CHECK_THROWS_AS(tree.insert(std::move(bad)), InvalidArgument);
}

TEST_CASE("search finds just-inserted codes in depth+1 visits") {
  FattTree tree(FattConfig{16, 6});
  const IndexCode code = code_of({3, 1, 4, 1, 5, 9});
  tree.insert(entry("pi", code, 3));
  const auto [leaf, stats] = tree.search(code);
  REQUIRE(leaf != nullptr);
  CHECK(leaf->entries()[0].id == "pi");
  CHECK(stats.nodes_visited == 7);
}

TEST_CASE("search in an empty tree visits only the root") {
  FattTree tree(FattConfig{16, 6});
  const auto [leaf, stats] = tree.search(code_of({0, 0, 0, 0, 0, 0}));
  CHECK(leaf == nullptr);
  CHECK(stats.nodes_visited == 1);
}

TEST_CASE("search misses codes that diverge at level 1") {
  FattTree tree(FattConfig{4, 3});
  tree.insert(entry("a", code_of({1, 2, 3}), 4));
  const auto [leaf, stats] = tree.search(code_of({2, 2, 3}));
  CHECK(leaf == nullptr);
  CHECK(stats.nodes_visited == 1);  // root only; level-1 child 2 does not exist
}

TEST_CASE("search cost is independent of database size") {
  for (std::size_t n : {10u, 1000u, 100000u}) {
    FattTree tree(FattConfig{16, 6});
    harness::SplitMix64 rng(n);
    IndexCode probe;
    for (std::size_t i = 0; i < n; ++i) {
      IndexCode code;
      for (int d = 0; d < 6; ++d) code.digits.push_back(static_cast<int>(rng.below(16)));
      if (i == 0) probe = code;
      tree.insert({"e" + std::to_string(i), code, {}, ""});
    }
    const auto [leaf, stats] = tree.search(probe);
    REQUIRE(leaf != nullptr);
    CHECK(stats.nodes_visited <= 7);
  }
}

TEST_CASE("tolerant search recovers last-digit perturbations") {
  FattTree tree(FattConfig{24, 3});
  tree.insert(entry("stored", code_of({12, 23, 0}), 5));

  SUBCASE("query one off in the last digit") {
    const auto [leaves, stats] = tree.tolerant_search(code_of({12, 23, 1}), 1);
    REQUIRE(leaves.size() == 1);
    CHECK(leaves[0]->entries()[0].id == "stored");
    CHECK(stats.leaves_probed == 1);
  }
  SUBCASE("first-digit perturbation stays out of scope") {
    const auto [leaves, stats] = tree.tolerant_search(code_of({13, 23, 0}), 1);
    CHECK(leaves.empty());
    CHECK(stats.leaves_probed == 0);
  }
  SUBCASE("middle-digit perturbation stays out of scope") {
    const auto [leaves, stats] = tree.tolerant_search(code_of({12, 22, 0}), 23);
    CHECK(leaves.empty());
  }
  SUBCASE("exact hit takes the fast path") {
    const auto [leaves, stats] = tree.tolerant_search(code_of({12, 23, 0}), 1);
    REQUIRE(leaves.size() == 1);
    CHECK(stats.leaves_probed == 0);
    CHECK(stats.nodes_visited == 4);
  }
  SUBCASE("radius zero is the exact search") {
    const auto [leaves, stats] = tree.tolerant_search(code_of({12, 23, 1}), 0);
    CHECK(leaves.empty());
  }
  SUBCASE("radius outside [0, B-1] is rejected") {
    CHECK_THROWS_AS(tree.tolerant_search(code_of({12, 23, 1}), 24), InvalidArgument);
    CHECK_THROWS_AS(tree.tolerant_search(code_of({12, 23, 1}), -1), InvalidArgument);
  }
}

TEST_CASE("tolerant search orders probes by digit distance") {
  FattTree tree(FattConfig{16, 2});
  tree.insert(entry("d3", code_of({5, 3}), 1));
  tree.insert(entry("d5", code_of({5, 5}), 2));
  tree.insert(entry("d6", code_of({5, 6}), 3));
  // query digit 4: distance order is 3 (lower first), 5, then 6 at distance 2.
  const auto [leaves, stats] = tree.tolerant_search(code_of({5, 4}), 2);
  REQUIRE(leaves.size() == 3);
  CHECK(leaves[0]->entries()[0].id == "d3");
  CHECK(leaves[1]->entries()[0].id == "d5");
  CHECK(leaves[2]->entries()[0].id == "d6");
  CHECK(stats.leaves_probed == 3);
}

TEST_CASE("stats of an empty and tiny tree") {
  FattTree tree(FattConfig{16, 4});
  TreeReport s = tree.stats();
  CHECK(s.entry_count == 0);
  CHECK(s.node_count == 1);
  CHECK(s.occupied_leaves == 0);
  CHECK(s.mean_leaf_occupancy == 0.0);

  tree.insert(entry("one", code_of({0, 1, 2, 3}), 6));
  s = tree.stats();
  CHECK(s.node_count == 5);
  CHECK(s.entry_count == 1);
  CHECK(s.max_leaf_occupancy == 1);
}

TEST_CASE("retrieve ranks by distance with id tiebreak") {
  FattTree tree(FattConfig{16, 2});
  const std::vector<double> q = {0.0, 0.0};
  tree.insert({"far", code_of({1, 1}), {3.0, 4.0}, ""});
  tree.insert({"near", code_of({1, 1}), {0.1, 0.0}, ""});
  tree.insert({"tie_b", code_of({1, 1}), {1.0, 0.0}, ""});
  tree.insert({"tie_a", code_of({1, 1}), {0.0, 1.0}, ""});

  const auto [ranked, stats] = tree.retrieve(q, code_of({1, 1}), 10, 0);
  REQUIRE(ranked.size() == 4);
  CHECK(ranked[0].id == "near");
  CHECK(ranked[1].id == "tie_a");  // equal distances fall back to id order
  CHECK(ranked[2].id == "tie_b");
  CHECK(ranked[3].id == "far");
  CHECK(stats.distance_computations == 4);
}

TEST_CASE("retrieve of a stored image's own features ranks itself first") {
  FattTree tree(FattConfig{16, 3});
  const std::vector<double> f = features_for(42);
  tree.insert({"self", code_of({1, 2, 3}), f, ""});
  tree.insert({"other", code_of({1, 2, 3}), features_for(43), ""});
  const auto [ranked, stats] = tree.retrieve(f, code_of({1, 2, 3}), 2, 1);
  REQUIRE(!ranked.empty());
  CHECK(ranked[0].id == "self");
  CHECK(ranked[0].distance == 0.0);
}

TEST_CASE("retrieve on an empty tree returns nothing") {
  FattTree tree(FattConfig{16, 3});
  const auto [ranked, stats] = tree.retrieve(features_for(1), code_of({0, 0, 0}), 5, 1);
  CHECK(ranked.empty());
  CHECK(stats.distance_computations == 0);
}

TEST_CASE("retrieve validates arguments") {
  FattTree tree(FattConfig{16, 2});
  tree.insert({"a", code_of({0, 0}), {1.0, 2.0, 3.0}, ""});
  CHECK_THROWS_AS(tree.retrieve({}, code_of({0, 0}), 0, 1), InvalidArgument);
  const std::vector<double> short_features = {1.0};
  CHECK_THROWS_AS(tree.retrieve(short_features, code_of({0, 0}), 3, 1), InvalidArgument);
}

TEST_CASE("retrieve can exclude an id for query-by-example") {
  FattTree tree(FattConfig{16, 2});
  const std::vector<double> f = {1.0, 1.0};
  tree.insert({"q", code_of({2, 2}), f, ""});
  tree.insert({"dup", code_of({2, 2}), f, ""});
  const auto [ranked, stats] = tree.retrieve(f, code_of({2, 2}), 5, 1, "q");
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].id == "dup");
  CHECK(ranked[0].distance == 0.0);
  CHECK(stats.distance_computations == 1);
}

TEST_CASE("retrieve equals a brute-force scan over the candidate leaves") {
  harness::SplitMix64 rng(2024);
  for (int db = 0; db < 20; ++db) {
    FattTree tree(FattConfig{8, 3});
    const std::size_t n = 20 + rng.below(80);
    for (std::size_t i = 0; i < n; ++i) {
      IndexCode code;
      for (int d = 0; d < 3; ++d) code.digits.push_back(static_cast<int>(rng.below(8)));
      tree.insert({"e" + std::to_string(i), code, features_for(rng.next(), 6), ""});
    }
    for (int q = 0; q < 10; ++q) {
      IndexCode code;
      for (int d = 0; d < 3; ++d) code.digits.push_back(static_cast<int>(rng.below(8)));
      const std::vector<double> features = features_for(rng.next(), 6);
      const int radius = static_cast<int>(rng.below(3));
      const std::size_t top_k = 1 + rng.below(8);

      const auto [ranked, stats] = tree.retrieve(features, code, top_k, radius);

      // Oracle: gather the same candidate leaves, then sort linearly.
      const auto [leaves, _] = tree.tolerant_search(code, radius);
      std::vector<RankedMatch> oracle;
      for (const FattNode* leaf : leaves)
        for (const ImageEntry& e : leaf->entries())
          oracle.push_back({e.id, euclidean_distance(features, e.features)});
      std::sort(oracle.begin(), oracle.end(), [](const RankedMatch& a, const RankedMatch& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
      });
      if (oracle.size() > top_k) oracle.resize(top_k);
      CHECK(ranked == oracle);
    }
  }
}

TEST_CASE("last-digit perturbations within the radius are always recovered") {
  harness::SplitMix64 rng(606);
  for (int trial = 0; trial < 300; ++trial) {
    const int branching = 4 + static_cast<int>(rng.below(20));
    const std::size_t depth = 2 + rng.below(4);
    FattTree tree(FattConfig{branching, depth});
    IndexCode stored;
    for (std::size_t d = 0; d < depth; ++d)
      stored.digits.push_back(static_cast<int>(rng.below(branching)));
    tree.insert({"target", stored, {}, ""});

    const int radius = 1 + static_cast<int>(rng.below(branching - 1));
    const int delta = 1 + static_cast<int>(rng.below(radius));
    IndexCode query = stored;
    int& last = query.digits.back();
    const bool prefer_down = (rng.next() & 1) != 0;
    if (prefer_down && last - delta >= 0)
      last -= delta;
    else if (last + delta < branching)
      last += delta;
    else if (last - delta >= 0)
      last -= delta;
    else
      continue;  // no in-range perturbation exists for this draw

    const auto [leaves, stats] = tree.tolerant_search(query, radius);
    bool found = false;
    for (const FattNode* leaf : leaves)
      for (const ImageEntry& e : leaf->entries())
        if (e.id == "target") found = true;
    CHECK(found);
    // stats stay inside the documented bound
    CHECK(stats.nodes_visited <= (depth + 1) + stats.leaves_probed * (depth + 1));
  }
}

TEST_CASE("concurrent readers agree with serial results") {
  FattTree tree(FattConfig{16, 4});
  harness::SplitMix64 rng(31337);
  for (int i = 0; i < 2000; ++i) {
    IndexCode code;
    for (int d = 0; d < 4; ++d) code.digits.push_back(static_cast<int>(rng.below(16)));
    tree.insert({"e" + std::to_string(i), code, features_for(rng.next()), ""});
  }

  struct Query {
    IndexCode code;
    std::vector<double> features;
    int radius;
  };
  std::vector<Query> queries;
  for (int q = 0; q < 64; ++q) {
    Query query;
    for (int d = 0; d < 4; ++d) query.code.digits.push_back(static_cast<int>(rng.below(16)));
    query.features = features_for(rng.next());
    query.radius = static_cast<int>(rng.below(4));
    queries.push_back(std::move(query));
  }

  std::vector<std::vector<RankedMatch>> serial;
  for (const Query& q : queries)
    serial.push_back(tree.retrieve(q.features, q.code, 8, q.radius).first);

  std::atomic<int> mismatches{0};
  std::vector<std::thread> readers;
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&] {
      for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto [ranked, stats] =
            tree.retrieve(queries[i].features, queries[i].code, 8, queries[i].radius);
        if (ranked != serial[i]) ++mismatches;
      }
    });
  }
  for (std::thread& t : readers) t.join();
  CHECK(mismatches.load() == 0);
}

TEST_CASE("audit passes on healthy trees and full trees pass address checks") {
  FattTree tree(FattConfig{3, 4});
  harness::SplitMix64 rng(3);
  for (int i = 0; i < 100; ++i) {
    IndexCode code;
    for (int d = 0; d < 4; ++d) code.digits.push_back(static_cast<int>(rng.below(3)));
    tree.insert({"e" + std::to_string(i), code, {1.0}, ""});
  }
  tree.audit();
  CHECK(tree.stats().capacity == 81);
}

TEST_CASE("depth never exceeds the configured bound") {
  FattTree tree(FattConfig{4, 3});
  harness::SplitMix64 rng(8);
  for (int i = 0; i < 50; ++i) {
    IndexCode code;
    for (int d = 0; d < 3; ++d) code.digits.push_back(static_cast<int>(rng.below(4)));
    tree.insert({"e" + std::to_string(i), code, {}, ""});
  }
  std::size_t deepest = 0;
  tree.visit_depth_first([&](const FattNode& node, int) {
    deepest = std::max(deepest, node.level());
    if (node.level() < 3) CHECK(node.entries().empty());
  });
  CHECK(deepest == 3);
}

TEST_CASE("depth-first visit walks children in ascending digit order") {
  FattTree tree(FattConfig{16, 1});
  for (int d : {9, 3, 12, 0}) tree.insert({"d" + std::to_string(d), code_of({d}), {}, ""});
  std::vector<int> order;
  tree.visit_depth_first([&](const FattNode& node, int digit) {
    if (node.level() == 1) order.push_back(digit);
  });
  CHECK(order == std::vector<int>{0, 3, 9, 12});
}
