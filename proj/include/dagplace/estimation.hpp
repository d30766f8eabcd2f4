// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dagplace/graph.hpp"
#include "dagplace/placement.hpp"

namespace dagplace {

struct NodeSample {
  Bytes memory_bytes = 0;
  Duration compute_us = 0;
};

struct BatchProfile {
  std::int64_t batch_size = 0;
  std::unordered_map<NodeId, NodeSample> nodes;
};

/// Small-batch measurements used to extrapolate a large-batch graph.
/// Needs at least two distinct batch sizes, and every node must appear in
/// every batch.
struct ProfileSet {
  std::vector<BatchProfile> batches;
  std::vector<std::pair<Bytes, double>> comm_samples;  // (bytes, microseconds)
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_norm = 0.0;

  double predict(double x) const { return slope * x + intercept; }
};

/// Per-node least-squares lines for memory and (rough) time vs batch size.
struct NodeCostModel {
  std::unordered_map<NodeId, LinearFit> memory_fit;
  std::unordered_map<NodeId, LinearFit> time_fit;
};

struct EdgeScaling {
  std::int64_t reference_batch = 1;  // batch the base graph's edge bytes describe
  // optional per-edge multiplier that replaces the batch-ratio default
  std::map<std::pair<NodeId, NodeId>, double> scale_override;
};

struct DeviationReport {
  std::map<NodeId, double> memory_deviation;
  std::map<NodeId, double> time_deviation;
  double mean_memory_deviation = 0.0;
  double mean_time_deviation = 0.0;
  // nodes whose measured value is 0 are listed here and excluded from means
  std::vector<NodeId> zero_memory_nodes;
  std::vector<NodeId> zero_time_nodes;
};

NodeCostModel fit_node_models(const ProfileSet& profiles);

/// Predict the graph at `target_batch`: node memory/time from the fitted
/// lines (clamped at 0), edge bytes scaled by batch ratio unless
/// overridden. Time predictions are rough by nature; reports label them so.
ComputationGraph estimate_graph(const ComputationGraph& base, const NodeCostModel& models,
                                std::int64_t target_batch, const EdgeScaling& scaling);

/// Affine least-squares fit of transfer time vs bytes. Negative fitted
/// coefficients are clamped to 0.
CommModel fit_comm_model(const std::vector<std::pair<Bytes, double>>& samples);

/// Memory-capped sequential fill along the DFS topological order, packing
/// as few devices as possible; same best-effort overflow handling as
/// order_place.
PlacementResult sequential_eval_placement(const ComputationGraph& estimated,
                                          const std::vector<DeviceSpec>& devices);

/// Per-node relative deviation |est - actual| / actual for memory and time.
DeviationReport deviation_report(const ComputationGraph& estimated,
                                 const ComputationGraph& measured);

}  // namespace dagplace
