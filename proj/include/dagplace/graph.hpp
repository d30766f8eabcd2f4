// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dagplace/error.hpp"

namespace dagplace {

using NodeId = std::int64_t;
using DeviceId = std::int32_t;
using Duration = std::int64_t;  // microseconds
using Bytes = std::int64_t;

/// Sentinel for "cannot be scheduled" (memory-exhausted device, etc.).
inline constexpr Duration kNever = std::numeric_limits<Duration>::max();

/// A profiled computation operation.
struct OpNode {
  NodeId id = 0;
  std::string name;
  Duration compute_us = 0;
  Bytes memory_bytes = 0;
  std::optional<std::string> colocation_group;
};

/// Directed tensor transfer between two operations.
struct TensorEdge {
  NodeId src = 0;
  NodeId dst = 0;
  Bytes tensor_bytes = 0;
};

/// Plain DAG of operations. Construction is permissive; run validate()
/// before feeding a graph to any algorithm.
struct ComputationGraph {
  std::vector<OpNode> nodes;
  std::vector<TensorEdge> edges;
};

/// Affine transfer-cost model: time(d) = k*d + b, in microseconds.
struct CommModel {
  double k_us_per_byte = 0.0;
  double b_us = 0.0;
};

struct DeviceSpec {
  DeviceId id = 0;
  Bytes memory_bytes = 0;
};

struct NodeLevels {
  Duration tlevel = 0;  // longest path into the node, excluding its own compute
  Duration blevel = 0;  // longest path out of the node, including its own compute
  Duration cpath = 0;   // tlevel + blevel: longest path through the node
};

/// Per-node critical-path quantities keyed by node id.
struct LevelTable {
  std::unordered_map<NodeId, NodeLevels> levels;

  const NodeLevels& at(NodeId id) const;
  Duration max_cpath() const;
};

struct Violation {
  ErrorKind kind = ErrorKind::InvalidValue;
  std::string message;
  std::vector<NodeId> nodes;  // witness: cycle sequence, duplicate id, edge endpoints
};

struct ValidationResult {
  bool ok = true;
  std::vector<Violation> violations;
};

/// Structural check: unique ids, resolvable edges, no parallel edges,
/// non-negative costs, acyclicity (with a cycle witness on failure).
/// Collects every violation instead of stopping at the first.
ValidationResult validate(const ComputationGraph& graph);

/// Throws DagError for the first violation; used by operations whose
/// precondition is a valid graph.
void require_valid(const ComputationGraph& graph);

/// Transfer time for `bytes`, rounded half-up to whole microseconds.
Duration comm_time(Bytes bytes, const CommModel& model);

/// Communication-to-computing ratio: total edge transfer time over total
/// node compute time. Throws ZeroComputeTime when the graph does no work.
double ccr(const ComputationGraph& graph, const CommModel& model);

/// tlevel/blevel/cpath for every node, computed iteratively over a
/// topological order so deep graphs cannot exhaust the stack. Edge costs
/// always pay the full transfer time; levels are placement-agnostic.
LevelTable compute_levels(const ComputationGraph& graph, const CommModel& model);

}  // namespace dagplace
