// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "dagplace/graph.hpp"
#include "support/test_util.hpp"

using namespace dagplace;
using namespace dagplace::test;

namespace {

ComputationGraph chain_abc() {
  // a(2) -> b(3) -> c(1), transfer times 5 and 2 under unit_comm
  return make_graph({{0, 2}, {1, 3}, {2, 1}}, {{0, 1, 5}, {1, 2, 2}});
}

}  // namespace

TEST_CASE("validate accepts a chain") {
  auto result = validate(chain_abc());
  CHECK(result.ok);
  CHECK(result.violations.empty());
}

TEST_CASE("validate reports a 2-cycle with its witness") {
  auto g = make_graph({{0, 1}, {1, 1}}, {{0, 1, 1}, {1, 0, 1}});
  auto result = validate(g);
  REQUIRE_FALSE(result.ok);
  REQUIRE(result.violations.size() == 1);
  CHECK(result.violations[0].kind == ErrorKind::CycleDetected);
  CHECK(result.violations[0].nodes == std::vector<NodeId>{0, 1});
}

TEST_CASE("validate reports dangling edges") {
  auto g = make_graph({{1, 1}}, {{1, 99, 1}});
  auto result = validate(g);
  REQUIRE_FALSE(result.ok);
  CHECK(result.violations[0].kind == ErrorKind::DanglingEdge);
}

TEST_CASE("validate reports duplicate ids, parallel edges, and bad values together") {
  ComputationGraph g = make_graph({{0, 1}, {0, 2}, {1, 3}}, {{0, 1, 1}, {0, 1, 4}});
  g.nodes.push_back({2, "neg", -5, -1, {}});
  auto result = validate(g);
  REQUIRE_FALSE(result.ok);
  int dup = 0, par = 0, bad = 0;
  for (const auto& v : result.violations) {
    dup += v.kind == ErrorKind::DuplicateId;
    par += v.kind == ErrorKind::DuplicateEdge;
    bad += v.kind == ErrorKind::InvalidValue;
  }
  CHECK(dup == 1);
  CHECK(par == 1);
  CHECK(bad == 2);
}

TEST_CASE("validate flags self-loops as cycles") {
  auto g = make_graph({{0, 1}}, {{0, 0, 1}});
  auto result = validate(g);
  REQUIRE_FALSE(result.ok);
  CHECK(result.violations[0].kind == ErrorKind::CycleDetected);
}

TEST_CASE("comm_time evaluates the affine model") {
  CHECK(comm_time(0, {2.0, 7.0}) == 7);
  CHECK(comm_time(10, {2.0, 7.0}) == 27);
  CHECK(comm_time(1'000'000, {0.001, 50.0}) == 1050);
}

TEST_CASE("comm_time rounds half-up") {
  CHECK(comm_time(1, {0.5, 0.0}) == 1);
  CHECK(comm_time(3, {0.5, 0.0}) == 2);
  CHECK(comm_time(1, {0.4, 0.0}) == 0);
  CHECK_THROWS_AS(comm_time(-1, {1.0, 0.0}), DagError);
}

TEST_CASE("ccr on the 3-node chain") {
  CHECK(ccr(chain_abc(), unit_comm()) == doctest::Approx(7.0 / 6.0));
}

TEST_CASE("ccr is zero without communication") {
  CHECK(ccr(make_graph({{0, 5}}, {}), unit_comm()) == 0.0);
  CHECK(ccr(make_graph({{0, 1}, {1, 1}}, {}), unit_comm()) == 0.0);
}

TEST_CASE("ccr rejects zero total compute") {
  auto g = make_graph({{0, 0}, {1, 0}}, {{0, 1, 3}});
  CHECK_THROWS_AS(ccr(g, unit_comm()), DagError);
}

TEST_CASE("levels on the 3-node chain") {
  auto table = compute_levels(chain_abc(), unit_comm());
  CHECK(table.at(0).tlevel == 0);
  CHECK(table.at(1).tlevel == 7);
  CHECK(table.at(2).tlevel == 12);
  CHECK(table.at(2).blevel == 1);
  CHECK(table.at(1).blevel == 6);
  CHECK(table.at(0).blevel == 13);
  for (NodeId id : {0, 1, 2}) CHECK(table.at(id).cpath == 13);
  CHECK(table.max_cpath() == 13);
}

TEST_CASE("levels on a single node hit both base cases") {
  auto table = compute_levels(make_graph({{7, 4}}, {}), unit_comm());
  CHECK(table.at(7).tlevel == 0);
  CHECK(table.at(7).blevel == 4);
  CHECK(table.at(7).cpath == 4);
}

TEST_CASE("levels on a symmetric diamond") {
  auto g = make_graph({{0, 1}, {1, 1}, {2, 1}, {3, 1}},
                      {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}, {2, 3, 1}});
  auto table = compute_levels(g, unit_comm());
  for (NodeId id : {0, 1, 2, 3}) CHECK(table.at(id).cpath == 5);
}

TEST_CASE("levels propagate validation failures") {
  auto g = make_graph({{0, 1}, {1, 1}}, {{0, 1, 1}, {1, 0, 1}});
  CHECK_THROWS_AS(compute_levels(g, unit_comm()), DagError);
}

TEST_CASE("max cpath equals exhaustive longest path on small random graphs") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng() % 7);  // up to 8 nodes
    auto g = random_dag(rng, n, 0.3);
    auto table = compute_levels(g, unit_comm());
    CHECK(table.max_cpath() == brute_force_longest_path(g, unit_comm()));
  }
}

TEST_CASE("source and sink base cases hold on random graphs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_dag(rng, 2 + static_cast<int>(rng() % 30), 0.1);
    GraphIndex ix(g);
    auto table = compute_levels(g, unit_comm());
    Duration max_cpath = table.max_cpath();
    bool source_on_critical = false, sink_on_critical = false;
    for (int v = 0; v < ix.node_count(); ++v) {
      const auto& lv = table.at(ix.node(v).id);
      CHECK(lv.cpath <= max_cpath);
      if (ix.in_degree(v) == 0) {
        CHECK(lv.tlevel == 0);
        source_on_critical = source_on_critical || lv.cpath == max_cpath;
      }
      if (ix.out_degree(v) == 0) {
        CHECK(lv.blevel == ix.node(v).compute_us);
        sink_on_critical = sink_on_critical || lv.cpath == max_cpath;
      }
    }
    CHECK(source_on_critical);
    CHECK(sink_on_critical);
  }
}

TEST_CASE("ccr and levels are independent of input ordering") {
  std::mt19937_64 rng(11);
  auto g = random_dag(rng, 25, 0.2);
  auto base_ccr = ccr(g, unit_comm());
  auto base_levels = compute_levels(g, unit_comm());
  for (std::uint64_t seed : {1u, 2u}) {
    auto permuted = shuffled_copy(g, seed);
    CHECK(ccr(permuted, unit_comm()) == base_ccr);
    auto levels = compute_levels(permuted, unit_comm());
    for (const auto& [id, lv] : base_levels.levels) {
      CHECK(levels.at(id).tlevel == lv.tlevel);
      CHECK(levels.at(id).blevel == lv.blevel);
    }
  }
}
