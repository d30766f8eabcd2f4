// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "dagplace/graph.hpp"

namespace dagplace {

/// Read-only adjacency view over a ComputationGraph. Expects a graph that
/// already passed validate(); endpoints must resolve and ids be unique.
/// Node indices are positions in graph.nodes, edge indices positions in
/// graph.edges, so results are reproducible for a given input ordering.
class GraphIndex {
 public:
  explicit GraphIndex(const ComputationGraph& graph);

  int node_count() const { return static_cast<int>(graph_->nodes.size()); }
  int edge_count() const { return static_cast<int>(graph_->edges.size()); }

  const ComputationGraph& graph() const { return *graph_; }
  const OpNode& node(int idx) const { return graph_->nodes[idx]; }
  const TensorEdge& edge(int e) const { return graph_->edges[e]; }

  int index_of(NodeId id) const;      // throws UnknownNode
  bool contains(NodeId id) const { return index_.count(id) != 0; }

  int edge_src(int e) const { return edge_src_[e]; }
  int edge_dst(int e) const { return edge_dst_[e]; }

  /// Edge indices leaving / entering a node, in input edge order.
  std::span<const int> out_edges(int node_idx) const;
  std::span<const int> in_edges(int node_idx) const;

  int out_degree(int node_idx) const { return static_cast<int>(out_edges(node_idx).size()); }
  int in_degree(int node_idx) const { return static_cast<int>(in_edges(node_idx).size()); }

 private:
  const ComputationGraph* graph_;
  std::unordered_map<NodeId, int> index_;
  std::vector<int> edge_src_, edge_dst_;
  // CSR layout
  std::vector<int> out_start_, out_list_;
  std::vector<int> in_start_, in_list_;
};

}  // namespace dagplace
