// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include "dagplace/graph_index.hpp"

namespace dagplace {

GraphIndex::GraphIndex(const ComputationGraph& graph) : graph_(&graph) {
  const int n = static_cast<int>(graph.nodes.size());
  const int m = static_cast<int>(graph.edges.size());
  index_.reserve(n);
  for (int v = 0; v < n; ++v) {
    if (!index_.emplace(graph.nodes[v].id, v).second) {
      throw DagError(ErrorKind::DuplicateId,
                     "node id " + std::to_string(graph.nodes[v].id) + " is not unique");
    }
  }

  edge_src_.resize(m);
  edge_dst_.resize(m);
  std::vector<int> out_count(n, 0), in_count(n, 0);
  for (int e = 0; e < m; ++e) {
    edge_src_[e] = index_of(graph.edges[e].src);
    edge_dst_[e] = index_of(graph.edges[e].dst);
    ++out_count[edge_src_[e]];
    ++in_count[edge_dst_[e]];
  }

  out_start_.assign(n + 1, 0);
  in_start_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) {
    out_start_[v + 1] = out_start_[v] + out_count[v];
    in_start_[v + 1] = in_start_[v] + in_count[v];
  }
  out_list_.resize(m);
  in_list_.resize(m);
  std::vector<int> out_fill = out_start_, in_fill = in_start_;
  for (int e = 0; e < m; ++e) {
    out_list_[out_fill[edge_src_[e]]++] = e;
    in_list_[in_fill[edge_dst_[e]]++] = e;
  }
}

int GraphIndex::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw DagError(ErrorKind::UnknownNode, "node " + std::to_string(id) + " not in graph");
  }
  return it->second;
}

std::span<const int> GraphIndex::out_edges(int node_idx) const {
  return {out_list_.data() + out_start_[node_idx],
          static_cast<size_t>(out_start_[node_idx + 1] - out_start_[node_idx])};
}

std::span<const int> GraphIndex::in_edges(int node_idx) const {
  return {in_list_.data() + in_start_[node_idx],
          static_cast<size_t>(in_start_[node_idx + 1] - in_start_[node_idx])};
}

}  // namespace dagplace
