// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "dagplace/generator.hpp"
#include "dagplace/ordering.hpp"
#include "support/test_util.hpp"

using namespace dagplace;
using namespace dagplace::test;

TEST_CASE("parallel-chains with two chains builds the two-source shape") {
  SyntheticSpec spec;
  spec.kind = GenKind::ParallelChains;
  spec.node_count = 8;
  spec.layer_width = 2;
  spec.seed = 5;
  auto g = gen_graph(spec);
  REQUIRE(g.nodes.size() == 8);
  REQUIRE(g.edges.size() == 6);
  GraphIndex ix(g);
  int sources = 0, sinks = 0;
  for (int v = 0; v < ix.node_count(); ++v) {
    sources += ix.in_degree(v) == 0;
    sinks += ix.out_degree(v) == 0;
  }
  CHECK(sources == 2);
  CHECK(sinks == 2);
  CHECK(validate(g).ok);
}

TEST_CASE("layered generation hits the requested CCR regime") {
  SyntheticSpec spec;
  spec.kind = GenKind::Layered;
  spec.node_count = 6332;
  spec.layer_width = 8;
  spec.target_ccr = 33.0;
  spec.seed = 2023;
  auto g = gen_graph(spec);
  CHECK(validate(g).ok);
  double achieved = ccr(g, spec.comm);
  CHECK(achieved >= 33.0 * 0.8);
  CHECK(achieved <= 33.0 * 1.2);
}

TEST_CASE("generation is deterministic in the seed") {
  SyntheticSpec spec;
  spec.kind = GenKind::RandomDag;
  spec.node_count = 120;
  spec.target_ccr = 2.0;
  spec.seed = 99;
  auto a = gen_graph(spec);
  auto b = gen_graph(spec);
  REQUIRE(a.nodes.size() == b.nodes.size());
  REQUIRE(a.edges.size() == b.edges.size());
  for (size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].id == b.nodes[i].id);
    CHECK(a.nodes[i].compute_us == b.nodes[i].compute_us);
    CHECK(a.nodes[i].memory_bytes == b.nodes[i].memory_bytes);
  }
  for (size_t i = 0; i < a.edges.size(); ++i) {
    CHECK(a.edges[i].tensor_bytes == b.edges[i].tensor_bytes);
  }

  spec.seed = 100;
  auto c = gen_graph(spec);
  bool any_diff = c.edges.size() != a.edges.size();
  for (size_t i = 0; !any_diff && i < a.nodes.size(); ++i) {
    any_diff = a.nodes[i].compute_us != c.nodes[i].compute_us;
  }
  CHECK(any_diff);
}

TEST_CASE("every generator yields valid graphs across seeds") {
  for (auto kind : {GenKind::Layered, GenKind::RandomDag, GenKind::ParallelChains}) {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      SyntheticSpec spec;
      spec.kind = kind;
      spec.node_count = 200;
      spec.layer_width = 6;
      spec.seed = seed;
      auto g = gen_graph(spec);
      CHECK(validate(g).ok);
      CHECK(g.nodes.size() == 200);
    }
  }
}

TEST_CASE("an impossible CCR target is reported") {
  SyntheticSpec spec;
  spec.kind = GenKind::ParallelChains;
  spec.node_count = 6;
  spec.layer_width = 2;
  spec.seed = 1;
  spec.comm = {0.0, 1.0};  // flat model: CCR cannot rise with bytes
  spec.target_ccr = 1000.0;
  CHECK_THROWS_AS(gen_graph(spec), DagError);
}

TEST_CASE("generator kind names round-trip") {
  for (auto kind : {GenKind::Layered, GenKind::RandomDag, GenKind::ParallelChains}) {
    CHECK(gen_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(gen_kind_from_string("))"), DagError);
}
