// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <unordered_map>
#include <vector>

#include "dagplace/fusion.hpp"
#include "dagplace/graph.hpp"
#include "dagplace/ordering.hpp"

namespace dagplace {

struct Placement {
  std::unordered_map<NodeId, DeviceId> assignment;
  std::map<DeviceId, Bytes> per_device_memory;
};

struct BusyInterval {
  Duration start = 0;
  Duration end = 0;
};

/// Sorted, disjoint busy intervals of one device; supports insertion-based
/// slot search (first gap of the requested length at or after `earliest`).
class DeviceTimeline {
 public:
  Duration find_slot(Duration earliest, Duration duration) const;
  void reserve(Duration start, Duration duration);
  const std::vector<BusyInterval>& busy() const { return busy_; }

 private:
  std::vector<BusyInterval> busy_;
};

/// Mutable state threaded through a placement run. Vectors are indexed by
/// the position of a device id in `device_ids` (kept in ascending order).
struct SchedulerState {
  std::vector<DeviceId> device_ids;
  std::unordered_map<NodeId, Duration> finish_time;  // completion time per placed node
  std::vector<DeviceTimeline> timelines;
  std::vector<Bytes> available_memory;               // remaining bytes per device

  static SchedulerState for_devices(const std::vector<DeviceSpec>& devices);
  int device_pos(DeviceId id) const;  // throws InvalidValue for unknown ids
};

/// One step of the adjusting heuristic, kept for replay verification.
struct PlacementDecision {
  NodeId node = 0;
  DeviceId prev_device = 0;               // device of the previous node in the order
  Duration back_cost_us = 0;              // max transfer time back to prev_device
  std::map<DeviceId, Duration> est_us;    // kNever marks a memory-exhausted device
  DeviceId chosen = 0;
  bool relocated = false;
  bool best_effort = false;
};

struct PlacementResult {
  Placement placement;
  bool oom_risk = false;
  std::vector<PlacementDecision> decisions;
};

/// Sequential fill: walk the order, stay on the current device until the
/// next node would not fit, then move to the next one. When every device
/// is exhausted, falls back to the device with the most remaining memory
/// and flags oom_risk instead of failing.
PlacementResult order_place(const CoarseGraph& coarse, const TopoOrder& order,
                            const std::vector<DeviceSpec>& devices);

/// Earliest-start-time adjustment: keeps each node with its predecessor in
/// the order unless moving to the min-EST device saves more than the worst
/// transfer cost back. Memory-exhausted devices get EST = kNever; the same
/// best-effort fallback as order_place applies when all are exhausted.
PlacementResult adjusting_placement(const CoarseGraph& coarse, const TopoOrder& order,
                                    const std::vector<DeviceSpec>& devices,
                                    const CommModel& model);

/// Earliest start of `node` on `device`: data-ready time over placed
/// predecessors (cross-device edges pay comm_time) pushed to the first idle
/// slot long enough for the node's compute. Returns kNever when the device
/// lacks memory for the node.
Duration compute_est(const SchedulerState& state, const CoarseGraph& graph,
                     const std::unordered_map<NodeId, DeviceId>& assignment,
                     NodeId node, DeviceId device, const CommModel& model);

/// Map a coarse placement back onto the original nodes; per-device memory
/// is recomputed from the original node sizes.
Placement expand_placement(const ComputationGraph& original, const ClusterMap& clusters,
                           const Placement& coarse_placement);

}  // namespace dagplace
