// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include "dagplace/ordering.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "dagplace/graph_index.hpp"

namespace dagplace {

std::string to_string(TopoPolicy policy) {
  switch (policy) {
    case TopoPolicy::MTopo: return "m-topo";
    case TopoPolicy::DfsTopo: return "dfs-topo";
    case TopoPolicy::CpdTopo: return "cpd-topo";
  }
  return "unknown";
}

TopoPolicy topo_policy_from_string(const std::string& name) {
  if (name == "m-topo" || name == "mtopo" || name == "m") return TopoPolicy::MTopo;
  if (name == "dfs-topo" || name == "dfs") return TopoPolicy::DfsTopo;
  if (name == "cpd-topo" || name == "cpd") return TopoPolicy::CpdTopo;
  throw DagError(ErrorKind::InvalidValue, "unknown topo policy '" + name + "'");
}

namespace {

enum class FreedChildInsert { Tail, Head };

// Shared peeling loop. `initial_less` orders the starting 0-indegree nodes;
// `child_less` orders simultaneously freed children before insertion. With
// Head insertion the children are pushed one by one, so the LAST child in
// `child_less` order ends up emitted first.
template <typename InitialLess, typename ChildLess>
std::vector<NodeId> peel(const GraphIndex& ix, InitialLess initial_less, ChildLess child_less,
                         FreedChildInsert insert) {
  const int n = ix.node_count();
  std::vector<int> indeg(n);
  std::vector<int> sources;
  for (int v = 0; v < n; ++v) {
    indeg[v] = ix.in_degree(v);
    if (indeg[v] == 0) sources.push_back(v);
  }
  std::sort(sources.begin(), sources.end(), initial_less);
  std::deque<int> queue(sources.begin(), sources.end());

  std::vector<NodeId> sequence;
  sequence.reserve(n);
  std::vector<int> freed;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    sequence.push_back(ix.node(v).id);
    freed.clear();
    for (int e : ix.out_edges(v)) {
      int child = ix.edge_dst(e);
      if (--indeg[child] == 0) freed.push_back(child);
    }
    std::sort(freed.begin(), freed.end(), child_less);
    for (int child : freed) {
      if (insert == FreedChildInsert::Tail) {
        queue.push_back(child);
      } else {
        queue.push_front(child);
      }
    }
  }
  if (sequence.size() != static_cast<size_t>(n)) {
    throw DagError(ErrorKind::CycleDetected, "graph has a cycle; topological order impossible");
  }
  return sequence;
}

}  // namespace

TopoOrder m_topo(const ComputationGraph& graph) {
  require_valid(graph);
  GraphIndex ix(graph);
  auto by_id = [&ix](int a, int b) { return ix.node(a).id < ix.node(b).id; };
  return {TopoPolicy::MTopo, peel(ix, by_id, by_id, FreedChildInsert::Tail)};
}

TopoOrder dfs_topo(const ComputationGraph& graph) {
  require_valid(graph);
  GraphIndex ix(graph);
  auto by_id = [&ix](int a, int b) { return ix.node(a).id < ix.node(b).id; };
  // Head insertion reverses the sorted run, so sort descending to emit the
  // smallest id first.
  auto by_id_desc = [&ix](int a, int b) { return ix.node(a).id > ix.node(b).id; };
  return {TopoPolicy::DfsTopo, peel(ix, by_id, by_id_desc, FreedChildInsert::Head)};
}

TopoOrder cpd_topo(const ComputationGraph& graph, const LevelTable& levels) {
  require_valid(graph);
  GraphIndex ix(graph);
  auto cpath = [&](int v) { return levels.at(ix.node(v).id).cpath; };
  auto initial = [&](int a, int b) {
    if (cpath(a) != cpath(b)) return cpath(a) > cpath(b);
    return ix.node(a).id < ix.node(b).id;
  };
  // Freed children are head-inserted in ascending cpath order so the
  // largest-cpath child (the critical one) lands at the very head and is
  // emitted right after its parent.
  auto children = [&](int a, int b) {
    if (cpath(a) != cpath(b)) return cpath(a) < cpath(b);
    return ix.node(a).id > ix.node(b).id;
  };
  return {TopoPolicy::CpdTopo, peel(ix, initial, children, FreedChildInsert::Head)};
}

bool is_valid_topo_order(const ComputationGraph& graph, const TopoOrder& order) {
  if (order.sequence.size() != graph.nodes.size()) return false;
  std::unordered_map<NodeId, size_t> position;
  position.reserve(order.sequence.size());
  for (size_t i = 0; i < order.sequence.size(); ++i) {
    if (!position.emplace(order.sequence[i], i).second) return false;
  }
  for (const auto& n : graph.nodes) {
    if (!position.count(n.id)) return false;
  }
  for (const auto& e : graph.edges) {
    auto u = position.find(e.src);
    auto v = position.find(e.dst);
    if (u == position.end() || v == position.end() || u->second >= v->second) return false;
  }
  return true;
}

}  // namespace dagplace
