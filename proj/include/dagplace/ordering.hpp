// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "dagplace/graph.hpp"

namespace dagplace {

enum class TopoPolicy { MTopo, DfsTopo, CpdTopo };

std::string to_string(TopoPolicy policy);
TopoPolicy topo_policy_from_string(const std::string& name);

/// A topological order: for every edge (u,v), u appears before v.
struct TopoOrder {
  TopoPolicy policy = TopoPolicy::MTopo;
  std::vector<NodeId> sequence;
};

/// BFS-like baseline: FIFO queue of 0-indegree nodes, newly freed children
/// appended to the tail. Ties broken by ascending node id.
TopoOrder m_topo(const ComputationGraph& graph);

/// Depth-first variant: freed children go to the head of the deque, so a
/// chain is emitted end to end before a sibling chain starts. Ties broken
/// by ascending node id.
TopoOrder dfs_topo(const ComputationGraph& graph);

/// Depth-first order that follows the critical path: the initial queue is
/// sorted by descending cpath, and freed children are head-inserted so the
/// largest-cpath child is emitted immediately after its parent. Equal
/// cpath ties broken by ascending node id.
TopoOrder cpd_topo(const ComputationGraph& graph, const LevelTable& levels);

/// True when `order.sequence` is a permutation of the graph's node ids with
/// every edge pointing forward.
bool is_valid_topo_order(const ComputationGraph& graph, const TopoOrder& order);

}  // namespace dagplace
