// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include "dagplace/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dagplace {

std::string to_string(GenKind kind) {
  switch (kind) {
    case GenKind::Layered: return "layered";
    case GenKind::RandomDag: return "random-dag";
    case GenKind::ParallelChains: return "parallel-chains";
  }
  return "unknown";
}

GenKind gen_kind_from_string(const std::string& name) {
  if (name == "layered") return GenKind::Layered;
  if (name == "random-dag" || name == "random") return GenKind::RandomDag;
  if (name == "parallel-chains" || name == "chains") return GenKind::ParallelChains;
  throw DagError(ErrorKind::InvalidValue, "unknown generator kind '" + name + "'");
}

namespace {

// mt19937_64 is pinned by the standard; the range mappings below avoid the
// implementation-defined std distributions so outputs are portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {  // inclusive bounds
    if (hi <= lo) return lo;
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::int64_t sample_around(Rng& rng, std::int64_t mean, std::int64_t spread,
                           std::int64_t floor_value) {
  return std::max(floor_value, rng.uniform(mean - spread, mean + spread));
}

ComputationGraph gen_layered(const SyntheticSpec& spec, Rng& rng) {
  const int n = spec.node_count;
  const int width = std::max(1, spec.layer_width);
  ComputationGraph g;
  g.nodes.reserve(n);
  std::vector<std::vector<NodeId>> layers;
  for (int i = 0; i < n; ++i) {
    int layer = i / width;
    if (layer >= static_cast<int>(layers.size())) layers.emplace_back();
    layers[layer].push_back(i);
    OpNode node;
    node.id = i;
    node.name = "op" + std::to_string(i);
    node.compute_us = sample_around(rng, spec.compute_mean_us, spec.compute_spread_us, 1);
    node.memory_bytes = sample_around(rng, spec.memory_mean_bytes, spec.memory_spread_bytes, 1);
    g.nodes.push_back(std::move(node));
  }
  for (size_t layer = 1; layer < layers.size(); ++layer) {
    const auto& prev = layers[layer - 1];
    for (NodeId v : layers[layer]) {
      int fanin = static_cast<int>(
          std::min<std::int64_t>(static_cast<std::int64_t>(prev.size()), rng.uniform(1, 3)));
      // pick distinct predecessors from the previous layer
      std::vector<NodeId> pool = prev;
      for (int k = 0; k < fanin; ++k) {
        std::int64_t pick = rng.uniform(0, static_cast<std::int64_t>(pool.size()) - 1);
        NodeId u = pool[pick];
        pool.erase(pool.begin() + pick);
        Bytes bytes = sample_around(rng, spec.edge_bytes_mean, spec.edge_bytes_mean / 2, 1);
        g.edges.push_back({u, v, bytes});
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const TensorEdge& a, const TensorEdge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  return g;
}

ComputationGraph gen_random_dag(const SyntheticSpec& spec, Rng& rng) {
  const int n = spec.node_count;
  ComputationGraph g;
  g.nodes.reserve(n);
  for (int i = 0; i < n; ++i) {
    OpNode node;
    node.id = i;
    node.name = "op" + std::to_string(i);
    node.compute_us = sample_around(rng, spec.compute_mean_us, spec.compute_spread_us, 1);
    node.memory_bytes = sample_around(rng, spec.memory_mean_bytes, spec.memory_spread_bytes, 1);
    g.nodes.push_back(std::move(node));
  }
  for (int v = 1; v < n; ++v) {
    int fanin = static_cast<int>(rng.uniform(1, std::min(3, v)));
    std::vector<NodeId> picked;
    while (static_cast<int>(picked.size()) < fanin) {
      NodeId u = rng.uniform(0, v - 1);
      if (std::find(picked.begin(), picked.end(), u) == picked.end()) picked.push_back(u);
    }
    std::sort(picked.begin(), picked.end());
    for (NodeId u : picked) {
      Bytes bytes = sample_around(rng, spec.edge_bytes_mean, spec.edge_bytes_mean / 2, 1);
      g.edges.push_back({u, v, bytes});
    }
  }
  return g;
}

ComputationGraph gen_parallel_chains(const SyntheticSpec& spec, Rng& rng) {
  const int n = spec.node_count;
  const int chains = std::max(1, spec.layer_width);
  ComputationGraph g;
  g.nodes.reserve(n);
  int per_chain = std::max(1, n / chains);
  int next_id = 0;
  for (int c = 0; c < chains && next_id < n; ++c) {
    int len = (c == chains - 1) ? n - next_id : per_chain;
    for (int i = 0; i < len; ++i) {
      OpNode node;
      node.id = next_id;
      node.name = "chain" + std::to_string(c) + "_op" + std::to_string(i);
      node.compute_us = sample_around(rng, spec.compute_mean_us, spec.compute_spread_us, 1);
      node.memory_bytes = sample_around(rng, spec.memory_mean_bytes, spec.memory_spread_bytes, 1);
      g.nodes.push_back(std::move(node));
      if (i > 0) {
        Bytes bytes = sample_around(rng, spec.edge_bytes_mean, spec.edge_bytes_mean / 2, 1);
        g.edges.push_back({next_id - 1, next_id, bytes});
      }
      ++next_id;
    }
  }
  return g;
}

// Rescale every edge's bytes by one factor until the measured ratio hits the
// target. comm_time is affine and nondecreasing in bytes, so the ratio is
// monotone in the factor and bisection converges.
void calibrate_ccr(ComputationGraph& g, const SyntheticSpec& spec) {
  const double target = *spec.target_ccr;
  if (target <= 0) throw DagError(ErrorKind::InvalidValue, "target CCR must be > 0");
  if (g.edges.empty()) {
    throw DagError(ErrorKind::UnreachableTargetCcr, "graph has no edges to carry communication");
  }

  std::vector<Bytes> base_bytes(g.edges.size());
  for (size_t e = 0; e < g.edges.size(); ++e) base_bytes[e] = g.edges[e].tensor_bytes;
  auto apply = [&](double factor) {
    for (size_t e = 0; e < g.edges.size(); ++e) {
      double scaled = static_cast<double>(base_bytes[e]) * factor;
      g.edges[e].tensor_bytes =
          std::max<Bytes>(0, static_cast<Bytes>(std::llround(std::min(scaled, 1.0e15))));
    }
    return ccr(g, spec.comm);
  };

  double lo = 0.0, hi = 1.0;
  double achieved = apply(hi);
  int expand = 0;
  while (achieved < target && expand < 60) {
    hi *= 2;
    achieved = apply(hi);
    ++expand;
  }
  if (achieved < target) {
    throw DagError(ErrorKind::UnreachableTargetCcr,
                   "cannot raise CCR to " + std::to_string(target));
  }
  for (int iter = 0; iter < 64; ++iter) {
    double mid = (lo + hi) / 2;
    if (apply(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  achieved = apply(hi);
  if (std::abs(achieved - target) / target > 0.2) {
    throw DagError(ErrorKind::UnreachableTargetCcr,
                   "achieved CCR " + std::to_string(achieved) + " misses target " +
                       std::to_string(target) + " by more than 20%");
  }
}

}  // namespace

ComputationGraph gen_graph(const SyntheticSpec& spec) {
  if (spec.node_count < 1) throw DagError(ErrorKind::InvalidValue, "node count must be >= 1");
  Rng rng(spec.seed);
  ComputationGraph g;
  switch (spec.kind) {
    case GenKind::Layered: g = gen_layered(spec, rng); break;
    case GenKind::RandomDag: g = gen_random_dag(spec, rng); break;
    case GenKind::ParallelChains: g = gen_parallel_chains(spec, rng); break;
  }
  if (spec.target_ccr) calibrate_ccr(g, spec);
  require_valid(g);
  return g;
}

}  // namespace dagplace
