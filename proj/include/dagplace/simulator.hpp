// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dagplace/graph.hpp"
#include "dagplace/placement.hpp"

namespace dagplace {

enum class TaskKind { Compute, Send, Receive };

std::string to_string(TaskKind kind);

/// One executed task in the simulated timeline.
struct SimTaskRecord {
  TaskKind kind = TaskKind::Compute;
  NodeId node = -1;       // compute tasks
  NodeId edge_src = -1;   // transfer tasks
  NodeId edge_dst = -1;
  DeviceId device = 0;
  Duration start = 0;
  Duration end = 0;
};

struct DeviceReport {
  std::vector<BusyInterval> compute_busy;
  std::vector<BusyInterval> send_busy;
  std::vector<BusyInterval> receive_busy;
  Bytes peak_memory_bytes = 0;
  Bytes memory_capacity_bytes = 0;
};

struct SimulationReport {
  Duration makespan = 0;
  std::map<DeviceId, DeviceReport> devices;
  std::int64_t cross_transfer_count = 0;
  Bytes cross_transfer_bytes = 0;
  bool oom_flag = false;
  std::vector<SimTaskRecord> trace;  // deterministic event log, start-time order
};

/// Deterministic discrete-event replay of a placement. Each cross-device
/// edge becomes one transfer occupying the source's send engine and the
/// destination's receive engine for comm_time(bytes); engines serialize
/// FIFO by ready time with (ready, kind, id) tie-breaks. Compute overlaps
/// communication. Same-device edges are free.
SimulationReport simulate(const ComputationGraph& graph, const Placement& placement,
                          const std::vector<DeviceSpec>& devices, const CommModel& model);

/// Exhaustive minimum-makespan placement for tiny instances
/// (<= 12 nodes, <= 3 devices); ties resolved toward the lexicographically
/// smallest assignment over ascending node ids. Test oracle.
std::pair<Placement, Duration> brute_force_optimal(const ComputationGraph& graph,
                                                   const std::vector<DeviceSpec>& devices,
                                                   const CommModel& model);

}  // namespace dagplace
