// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <unordered_map>
#include <vector>

#include "dagplace/graph.hpp"
#include "dagplace/ordering.hpp"

namespace dagplace {

/// A coarse graph is an ordinary ComputationGraph whose nodes are clusters
/// (node id == cluster id) and whose edges carry aggregated tensor bytes.
using CoarseGraph = ComputationGraph;

struct FusionConfig {
  int range = 200;                    // max nodes per cluster explored by the DP
  Bytes cluster_memory_limit = 0;     // hard cap on a cluster's total memory
};

/// One fused cluster: a contiguous run of the fusion sequence.
struct Cluster {
  int id = 0;
  std::vector<NodeId> members;
  Duration total_compute_us = 0;
  Bytes total_memory_bytes = 0;
};

/// Surjection from original nodes onto clusters plus the cut positions
/// (0 < p < n) that produced them from the fusion sequence.
struct ClusterMap {
  std::unordered_map<NodeId, int> node_to_cluster;
  std::vector<int> breakpoints;
  std::vector<Cluster> clusters;  // in sequence order; clusters[k].id == k
};

/// Result of contracting co-location groups into atomic super-nodes.
/// Identity when the graph has no groups.
struct GroupContraction {
  ComputationGraph contracted;
  // contracted node id -> original member ids (ascending)
  std::unordered_map<NodeId, std::vector<NodeId>> members_of;
};

struct FusionResult {
  CoarseGraph coarse;
  ClusterMap map;
};

/// Contracting `u` into `v` along edge (u,v) keeps the graph acyclic iff
/// the direct edge is the only u->v path.
bool merge_is_safe(const ComputationGraph& graph, NodeId u, NodeId v);

/// Minimum-communication contiguous partition of the order's sequence.
/// Dynamic program over cut positions: S(j) = min_i S(i) + cost(i,j) with
/// window size <= range and window memory <= cluster_memory_limit, where
/// cost(i,j) is the transfer time of all edges from window [i,j) to
/// positions >= j. Throws NodeExceedsClusterLimit when a single node cannot
/// fit any cluster.
ClusterMap optimal_breakpoints(const ComputationGraph& graph, const TopoOrder& order,
                               const CommModel& model, const FusionConfig& config);

/// Collapse clusters into single nodes. Crossing edges are aggregated by
/// byte sum; intra-cluster edges vanish. The result always satisfies
/// validate() because clusters are contiguous runs of a topological order.
CoarseGraph build_coarse_graph(const ComputationGraph& graph, const TopoOrder& order,
                               const ClusterMap& clusters);

/// Condense co-location groups into super-nodes (summed compute/memory,
/// aggregated boundary edges). Throws CycleDetected if the grouping itself
/// is inconsistent with a DAG.
GroupContraction contract_colocation_groups(const ComputationGraph& graph);

/// Full coarsening pass: contract groups, compute levels, order with
/// cpd_topo, cut with optimal_breakpoints, build the coarse graph. The
/// returned ClusterMap maps original node ids.
FusionResult fuse(const ComputationGraph& graph, const CommModel& model,
                  const FusionConfig& config);

}  // namespace dagplace
