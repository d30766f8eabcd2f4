// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include "dagplace/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "dagplace/graph_index.hpp"

namespace dagplace {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::DanglingEdge: return "DanglingEdge";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::InvalidValue: return "InvalidValue";
    case ErrorKind::ZeroComputeTime: return "ZeroComputeTime";
    case ErrorKind::NoSuchEdge: return "NoSuchEdge";
    case ErrorKind::NodeExceedsClusterLimit: return "NodeExceedsClusterLimit";
    case ErrorKind::GroupExceedsClusterLimit: return "GroupExceedsClusterLimit";
    case ErrorKind::InfeasiblePartition: return "InfeasiblePartition";
    case ErrorKind::InvalidClusterMap: return "InvalidClusterMap";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::NodeUniverseMismatch: return "NodeUniverseMismatch";
    case ErrorKind::UnplacedNode: return "UnplacedNode";
    case ErrorKind::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorKind::InstanceInfeasible: return "InstanceInfeasible";
    case ErrorKind::UnreachableTargetCcr: return "UnreachableTargetCcr";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "UnknownError";
}

const NodeLevels& LevelTable::at(NodeId id) const {
  auto it = levels.find(id);
  if (it == levels.end()) {
    throw DagError(ErrorKind::UnknownNode, "no levels for node " + std::to_string(id));
  }
  return it->second;
}

Duration LevelTable::max_cpath() const {
  Duration best = 0;
  for (const auto& [id, lv] : levels) best = std::max(best, lv.cpath);
  return best;
}

namespace {

std::string join_ids(const std::vector<NodeId>& ids) {
  std::ostringstream out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out << ",";
    out << ids[i];
  }
  return out.str();
}

// Extracts one directed cycle among `remaining` nodes (all of which sit on
// or lead into a cycle after Kahn peeling).
std::vector<NodeId> find_cycle_witness(const ComputationGraph& graph,
                                       const std::unordered_set<NodeId>& remaining) {
  std::unordered_map<NodeId, std::vector<NodeId>> succ;
  for (const auto& e : graph.edges) {
    if (remaining.count(e.src) && remaining.count(e.dst)) succ[e.src].push_back(e.dst);
  }
  for (auto& [id, nbrs] : succ) std::sort(nbrs.begin(), nbrs.end());

  NodeId start = *std::min_element(remaining.begin(), remaining.end());
  std::vector<NodeId> path;
  std::unordered_map<NodeId, int> pos_in_path;
  NodeId cur = start;
  while (true) {
    auto seen = pos_in_path.find(cur);
    if (seen != pos_in_path.end()) {
      return {path.begin() + seen->second, path.end()};
    }
    pos_in_path[cur] = static_cast<int>(path.size());
    path.push_back(cur);
    const auto& nbrs = succ[cur];
    if (nbrs.empty()) return path;  // defensive; peeled nodes always have a successor
    cur = nbrs.front();
  }
}

}  // namespace

ValidationResult validate(const ComputationGraph& graph) {
  ValidationResult result;
  auto add = [&result](ErrorKind kind, std::string message, std::vector<NodeId> nodes = {}) {
    result.ok = false;
    result.violations.push_back({kind, std::move(message), std::move(nodes)});
  };

  std::unordered_map<NodeId, int> id_count;
  for (const auto& n : graph.nodes) ++id_count[n.id];
  std::set<NodeId> reported_dup;
  for (const auto& n : graph.nodes) {
    if (id_count[n.id] > 1 && reported_dup.insert(n.id).second) {
      add(ErrorKind::DuplicateId,
          "node id " + std::to_string(n.id) + " appears " + std::to_string(id_count[n.id]) + " times",
          {n.id});
    }
    if (n.compute_us < 0) {
      add(ErrorKind::InvalidValue, "node " + std::to_string(n.id) + " has negative compute_us", {n.id});
    }
    if (n.memory_bytes < 0) {
      add(ErrorKind::InvalidValue, "node " + std::to_string(n.id) + " has negative memory_bytes", {n.id});
    }
  }

  std::set<std::pair<NodeId, NodeId>> seen_pairs;
  bool edges_resolvable = true;
  for (const auto& e : graph.edges) {
    bool ok_endpoints = true;
    if (!id_count.count(e.src)) {
      add(ErrorKind::DanglingEdge,
          "edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) + ") references missing node " +
              std::to_string(e.src),
          {e.src, e.dst});
      ok_endpoints = false;
    }
    if (!id_count.count(e.dst)) {
      add(ErrorKind::DanglingEdge,
          "edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) + ") references missing node " +
              std::to_string(e.dst),
          {e.src, e.dst});
      ok_endpoints = false;
    }
    if (e.src == e.dst) {
      add(ErrorKind::CycleDetected, "self-loop on node " + std::to_string(e.src), {e.src});
      ok_endpoints = false;
    }
    if (e.tensor_bytes < 0) {
      add(ErrorKind::InvalidValue,
          "edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) + ") has negative tensor_bytes",
          {e.src, e.dst});
    }
    if (ok_endpoints && !seen_pairs.insert({e.src, e.dst}).second) {
      add(ErrorKind::DuplicateEdge,
          "parallel edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
              "); aggregate tensor bytes upstream",
          {e.src, e.dst});
    }
    edges_resolvable = edges_resolvable && ok_endpoints;
  }

  // Cycle check only makes sense once ids and endpoints resolve.
  if (edges_resolvable && reported_dup.empty() && !graph.nodes.empty()) {
    std::unordered_map<NodeId, int> indegree;
    std::unordered_map<NodeId, std::vector<NodeId>> succ;
    for (const auto& n : graph.nodes) indegree[n.id] = 0;
    for (const auto& e : graph.edges) {
      ++indegree[e.dst];
      succ[e.src].push_back(e.dst);
    }
    std::deque<NodeId> queue;
    for (const auto& n : graph.nodes) {
      if (indegree[n.id] == 0) queue.push_back(n.id);
    }
    size_t emitted = 0;
    while (!queue.empty()) {
      NodeId id = queue.front();
      queue.pop_front();
      ++emitted;
      for (NodeId nxt : succ[id]) {
        if (--indegree[nxt] == 0) queue.push_back(nxt);
      }
    }
    if (emitted != graph.nodes.size()) {
      std::unordered_set<NodeId> remaining;
      for (const auto& n : graph.nodes) {
        if (indegree[n.id] > 0) remaining.insert(n.id);
      }
      auto witness = find_cycle_witness(graph, remaining);
      add(ErrorKind::CycleDetected, "cycle: [" + join_ids(witness) + "]", witness);
    }
  }

  return result;
}

void require_valid(const ComputationGraph& graph) {
  ValidationResult result = validate(graph);
  if (!result.ok) {
    throw DagError(result.violations.front().kind, result.violations.front().message);
  }
}

Duration comm_time(Bytes bytes, const CommModel& model) {
  if (bytes < 0) throw DagError(ErrorKind::InvalidValue, "negative byte count");
  double t = model.k_us_per_byte * static_cast<double>(bytes) + model.b_us;
  return static_cast<Duration>(std::llround(t));
}

double ccr(const ComputationGraph& graph, const CommModel& model) {
  Duration total_compute = 0;
  for (const auto& n : graph.nodes) total_compute += n.compute_us;
  if (total_compute <= 0) {
    throw DagError(ErrorKind::ZeroComputeTime, "total compute time is zero");
  }
  Duration total_comm = 0;
  for (const auto& e : graph.edges) total_comm += comm_time(e.tensor_bytes, model);
  return static_cast<double>(total_comm) / static_cast<double>(total_compute);
}

LevelTable compute_levels(const ComputationGraph& graph, const CommModel& model) {
  require_valid(graph);
  GraphIndex ix(graph);
  const int n = ix.node_count();

  std::vector<Duration> edge_cost(graph.edges.size());
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    edge_cost[e] = comm_time(graph.edges[e].tensor_bytes, model);
  }

  // Kahn order; the resulting levels do not depend on which valid order is used.
  std::vector<int> topo;
  topo.reserve(n);
  std::vector<int> indeg(n);
  std::deque<int> queue;
  for (int v = 0; v < n; ++v) {
    indeg[v] = ix.in_degree(v);
    if (indeg[v] == 0) queue.push_back(v);
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    topo.push_back(v);
    for (int e : ix.out_edges(v)) {
      int w = ix.edge_dst(e);
      if (--indeg[w] == 0) queue.push_back(w);
    }
  }

  std::vector<Duration> tlevel(n, 0), blevel(n, 0);
  for (int v : topo) {
    for (int e : ix.in_edges(v)) {
      int p = ix.edge_src(e);
      tlevel[v] = std::max(tlevel[v], tlevel[p] + ix.node(p).compute_us + edge_cost[e]);
    }
  }
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    int v = *it;
    Duration best_out = 0;
    for (int e : ix.out_edges(v)) {
      int s = ix.edge_dst(e);
      best_out = std::max(best_out, blevel[s] + edge_cost[e]);
    }
    blevel[v] = best_out + ix.node(v).compute_us;
  }

  LevelTable table;
  table.levels.reserve(n);
  for (int v = 0; v < n; ++v) {
    table.levels[ix.node(v).id] = {tlevel[v], blevel[v], tlevel[v] + blevel[v]};
  }
  return table;
}

}  // namespace dagplace
