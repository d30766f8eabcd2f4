// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include "dagplace/fusion.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <unordered_set>

#include "dagplace/graph_index.hpp"

namespace dagplace {

bool merge_is_safe(const ComputationGraph& graph, NodeId u, NodeId v) {
  require_valid(graph);
  GraphIndex ix(graph);
  const int ui = ix.index_of(u);
  const int vi = ix.index_of(v);
  int direct = -1;
  for (int e : ix.out_edges(ui)) {
    if (ix.edge_dst(e) == vi) {
      direct = e;
      break;
    }
  }
  if (direct < 0) {
    throw DagError(ErrorKind::NoSuchEdge,
                   "no edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
  }

  // Reachability u -> v with the direct edge removed.
  std::vector<char> seen(ix.node_count(), 0);
  std::deque<int> stack{ui};
  seen[ui] = 1;
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    for (int e : ix.out_edges(cur)) {
      if (e == direct && cur == ui) continue;
      int nxt = ix.edge_dst(e);
      if (nxt == vi) return false;
      if (!seen[nxt]) {
        seen[nxt] = 1;
        stack.push_back(nxt);
      }
    }
  }
  return true;
}

namespace {

void check_order(const ComputationGraph& graph, const TopoOrder& order) {
  if (!is_valid_topo_order(graph, order)) {
    throw DagError(ErrorKind::InvalidValue, "order is not a topological order of this graph");
  }
}

ClusterMap clusters_from_cuts(const ComputationGraph& graph, const TopoOrder& order,
                              const std::vector<int>& cuts) {
  GraphIndex ix(graph);
  ClusterMap map;
  map.node_to_cluster.reserve(graph.nodes.size());
  for (size_t c = 0; c + 1 < cuts.size(); ++c) {
    Cluster cluster;
    cluster.id = static_cast<int>(c);
    for (int p = cuts[c]; p < cuts[c + 1]; ++p) {
      NodeId id = order.sequence[p];
      const OpNode& node = ix.node(ix.index_of(id));
      cluster.members.push_back(id);
      cluster.total_compute_us += node.compute_us;
      cluster.total_memory_bytes += node.memory_bytes;
      map.node_to_cluster[id] = cluster.id;
    }
    map.clusters.push_back(std::move(cluster));
  }
  for (size_t c = 1; c + 1 < cuts.size(); ++c) map.breakpoints.push_back(cuts[c]);
  return map;
}

}  // namespace

ClusterMap optimal_breakpoints(const ComputationGraph& graph, const TopoOrder& order,
                               const CommModel& model, const FusionConfig& config) {
  require_valid(graph);
  check_order(graph, order);
  if (config.range < 1) throw DagError(ErrorKind::InvalidValue, "exploration range must be >= 1");
  if (config.cluster_memory_limit <= 0) {
    throw DagError(ErrorKind::InvalidValue, "cluster memory limit must be > 0");
  }

  GraphIndex ix(graph);
  const int n = static_cast<int>(order.sequence.size());
  if (n == 0) return clusters_from_cuts(graph, order, {0});

  std::vector<int> pos_of_idx(n);  // node index -> sequence position
  std::vector<int> idx_at_pos(n);
  for (int p = 0; p < n; ++p) {
    int idx = ix.index_of(order.sequence[p]);
    pos_of_idx[idx] = p;
    idx_at_pos[p] = idx;
  }

  const Bytes limit = config.cluster_memory_limit;
  std::vector<Bytes> mem_prefix(n + 1, 0);
  for (int p = 0; p < n; ++p) {
    const OpNode& node = ix.node(idx_at_pos[p]);
    if (node.memory_bytes > limit) {
      throw DagError(ErrorKind::NodeExceedsClusterLimit,
                     "node " + std::to_string(node.id) + " needs " +
                         std::to_string(node.memory_bytes) + " bytes, cluster limit is " +
                         std::to_string(limit));
    }
    mem_prefix[p + 1] = mem_prefix[p] + node.memory_bytes;
  }

  std::vector<Duration> edge_cost(graph.edges.size());
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    edge_cost[e] = comm_time(graph.edges[e].tensor_bytes, model);
  }

  // forward[p]: total transfer time of edges from position p to positions
  // >= j, maintained incrementally while the cut candidate j advances.
  std::vector<Duration> forward(n, 0);
  constexpr Duration kInf = kNever;
  std::vector<Duration> best(n + 1, kInf);
  std::vector<int> prev_cut(n + 1, -1);
  best[0] = 0;

  const int range = config.range;
  for (int j = 1; j <= n; ++j) {
    // Position j-1 enters the candidate windows: its full out-cost is now
    // forward cost, and edges into it from earlier positions stop counting.
    const int fp = j - 1;
    Duration out_sum = 0;
    for (int e : ix.out_edges(idx_at_pos[fp])) out_sum += edge_cost[e];
    forward[fp] = out_sum;
    for (int e : ix.in_edges(idx_at_pos[fp])) {
      forward[pos_of_idx[ix.edge_src(e)]] -= edge_cost[e];
    }

    Duration window_cost = 0;
    const int lo = std::max(0, j - range);
    for (int i = j - 1; i >= lo; --i) {
      window_cost += forward[i];
      if (mem_prefix[j] - mem_prefix[i] > limit) break;  // grows monotonically
      if (best[i] == kInf) continue;
      Duration candidate = best[i] + window_cost;
      if (candidate < best[j]) {
        best[j] = candidate;
        prev_cut[j] = i;
      }
    }
    if (best[j] == kInf) {
      // Unreachable: a singleton window is always admissible once every
      // node fits the limit.
      throw DagError(ErrorKind::InfeasiblePartition,
                     "no admissible cluster ends at position " + std::to_string(j));
    }
  }

  std::vector<int> cuts;
  for (int c = n; c >= 0; c = prev_cut[c]) {
    cuts.push_back(c);
    if (c == 0) break;
  }
  std::reverse(cuts.begin(), cuts.end());
  return clusters_from_cuts(graph, order, cuts);
}

CoarseGraph build_coarse_graph(const ComputationGraph& graph, const TopoOrder& order,
                               const ClusterMap& clusters) {
  require_valid(graph);
  check_order(graph, order);

  // The map must partition exactly the graph's nodes into the listed clusters.
  if (clusters.node_to_cluster.size() != graph.nodes.size()) {
    throw DagError(ErrorKind::InvalidClusterMap, "cluster map does not cover the node set");
  }
  std::unordered_set<NodeId> accounted;
  for (size_t c = 0; c < clusters.clusters.size(); ++c) {
    const Cluster& cluster = clusters.clusters[c];
    if (cluster.id != static_cast<int>(c) || cluster.members.empty()) {
      throw DagError(ErrorKind::InvalidClusterMap,
                     "cluster " + std::to_string(c) + " is empty or misnumbered");
    }
    for (NodeId m : cluster.members) {
      auto it = clusters.node_to_cluster.find(m);
      if (it == clusters.node_to_cluster.end() || it->second != cluster.id ||
          !accounted.insert(m).second) {
        throw DagError(ErrorKind::InvalidClusterMap,
                       "node " + std::to_string(m) + " is not mapped consistently");
      }
    }
  }
  for (const auto& n : graph.nodes) {
    if (!accounted.count(n.id)) {
      throw DagError(ErrorKind::InvalidClusterMap,
                     "node " + std::to_string(n.id) + " missing from cluster map");
    }
  }

  CoarseGraph coarse;
  coarse.nodes.reserve(clusters.clusters.size());
  for (const Cluster& cluster : clusters.clusters) {
    OpNode node;
    node.id = cluster.id;
    node.name = "cluster_" + std::to_string(cluster.id);
    node.compute_us = cluster.total_compute_us;
    node.memory_bytes = cluster.total_memory_bytes;
    coarse.nodes.push_back(std::move(node));
  }

  std::map<std::pair<int, int>, Bytes> crossing;
  for (const auto& e : graph.edges) {
    int cu = clusters.node_to_cluster.at(e.src);
    int cv = clusters.node_to_cluster.at(e.dst);
    if (cu != cv) crossing[{cu, cv}] += e.tensor_bytes;
  }
  coarse.edges.reserve(crossing.size());
  for (const auto& [pair, bytes] : crossing) {
    coarse.edges.push_back({pair.first, pair.second, bytes});
  }

  require_valid(coarse);
  return coarse;
}

GroupContraction contract_colocation_groups(const ComputationGraph& graph) {
  require_valid(graph);
  GroupContraction result;

  std::map<std::string, std::vector<NodeId>> groups;
  for (const auto& n : graph.nodes) {
    if (n.colocation_group) groups[*n.colocation_group].push_back(n.id);
  }

  std::unordered_map<NodeId, NodeId> rep;  // original id -> contracted id
  rep.reserve(graph.nodes.size());
  for (auto& [name, members] : groups) {
    std::sort(members.begin(), members.end());
    for (NodeId m : members) rep[m] = members.front();
  }

  for (const auto& n : graph.nodes) {
    auto it = rep.find(n.id);
    if (it == rep.end()) {
      result.contracted.nodes.push_back(n);
      result.members_of[n.id] = {n.id};
    } else if (it->second == n.id) {
      // Representative carries the group's summed footprint.
      const auto& members = groups[*n.colocation_group];
      OpNode super = n;
      super.compute_us = 0;
      super.memory_bytes = 0;
      result.contracted.nodes.push_back(super);
      result.members_of[n.id] = members;
    }
  }
  std::unordered_map<NodeId, OpNode*> contracted_by_id;
  for (auto& n : result.contracted.nodes) contracted_by_id[n.id] = &n;
  for (const auto& n : graph.nodes) {
    auto it = rep.find(n.id);
    if (it != rep.end()) {
      OpNode* super = contracted_by_id.at(it->second);
      super->compute_us += n.compute_us;
      super->memory_bytes += n.memory_bytes;
    }
  }

  auto rep_of = [&rep](NodeId id) {
    auto it = rep.find(id);
    return it == rep.end() ? id : it->second;
  };
  std::map<std::pair<NodeId, NodeId>, Bytes> merged_edges;
  for (const auto& e : graph.edges) {
    NodeId u = rep_of(e.src);
    NodeId v = rep_of(e.dst);
    if (u != v) merged_edges[{u, v}] += e.tensor_bytes;
  }
  result.contracted.edges.reserve(merged_edges.size());
  for (const auto& [pair, bytes] : merged_edges) {
    result.contracted.edges.push_back({pair.first, pair.second, bytes});
  }

  ValidationResult check = validate(result.contracted);
  if (!check.ok) {
    throw DagError(ErrorKind::CycleDetected,
                   "co-location groups are inconsistent with a DAG: " +
                       check.violations.front().message);
  }
  return result;
}

FusionResult fuse(const ComputationGraph& graph, const CommModel& model,
                  const FusionConfig& config) {
  GroupContraction contraction = contract_colocation_groups(graph);
  const ComputationGraph& work = contraction.contracted;

  for (const auto& n : work.nodes) {
    if (contraction.members_of.at(n.id).size() > 1 &&
        n.memory_bytes > config.cluster_memory_limit) {
      throw DagError(ErrorKind::GroupExceedsClusterLimit,
                     "co-location group of node " + std::to_string(n.id) + " needs " +
                         std::to_string(n.memory_bytes) + " bytes, cluster limit is " +
                         std::to_string(config.cluster_memory_limit));
    }
  }

  LevelTable levels = compute_levels(work, model);
  TopoOrder order = cpd_topo(work, levels);
  ClusterMap contracted_map = optimal_breakpoints(work, order, model, config);
  CoarseGraph coarse = build_coarse_graph(work, order, contracted_map);

  // Re-express the map over the original node ids.
  ClusterMap map;
  map.breakpoints = contracted_map.breakpoints;
  map.clusters.reserve(contracted_map.clusters.size());
  for (const Cluster& cluster : contracted_map.clusters) {
    Cluster expanded;
    expanded.id = cluster.id;
    expanded.total_compute_us = cluster.total_compute_us;
    expanded.total_memory_bytes = cluster.total_memory_bytes;
    for (NodeId super : cluster.members) {
      for (NodeId original : contraction.members_of.at(super)) {
        expanded.members.push_back(original);
        map.node_to_cluster[original] = cluster.id;
      }
    }
    map.clusters.push_back(std::move(expanded));
  }
  return {std::move(coarse), std::move(map)};
}

}  // namespace dagplace
