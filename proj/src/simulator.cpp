// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include "dagplace/simulator.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <tuple>

#include "dagplace/graph_index.hpp"

namespace dagplace {

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Compute: return "compute";
    case TaskKind::Send: return "send";
    case TaskKind::Receive: return "receive";
  }
  return "unknown";
}

namespace {

constexpr int kComputeLane = 0;
constexpr int kSendLane = 1;
constexpr int kReceiveLane = 2;

// Total order used for queue positions, event ties, and trace ordering:
// (ready time, kind rank, stable id). Compute tasks rank before transfers.
using TaskKey = std::tuple<Duration, int, std::int64_t>;

struct SimTask {
  bool is_transfer = false;
  int node_idx = -1;
  int edge_idx = -1;
  Duration duration = 0;
  int engine_a = -1;  // compute lane, or the sender's send lane
  int engine_b = -1;  // receiver's receive lane for transfers
  int deps_remaining = 0;
  std::vector<int> dependents;
  Duration ready = -1;
  Duration start = -1;
  Duration end = -1;
};

struct Engine {
  bool busy = false;
  Duration free_time = 0;
  std::set<std::pair<TaskKey, int>> queue;  // (key, task index)
};

}  // namespace

SimulationReport simulate(const ComputationGraph& graph, const Placement& placement,
                          const std::vector<DeviceSpec>& devices, const CommModel& model) {
  require_valid(graph);
  GraphIndex ix(graph);

  std::vector<DeviceSpec> sorted_devices = devices;
  std::sort(sorted_devices.begin(), sorted_devices.end(),
            [](const DeviceSpec& a, const DeviceSpec& b) { return a.id < b.id; });
  if (sorted_devices.empty()) throw DagError(ErrorKind::InvalidValue, "device list is empty");
  std::unordered_map<DeviceId, int> device_pos;
  for (size_t d = 0; d < sorted_devices.size(); ++d) {
    if (sorted_devices[d].memory_bytes <= 0) {
      throw DagError(ErrorKind::InvalidValue, "device " + std::to_string(sorted_devices[d].id) +
                                                  " has non-positive memory capacity");
    }
    if (!device_pos.emplace(sorted_devices[d].id, static_cast<int>(d)).second) {
      throw DagError(ErrorKind::DuplicateId,
                     "device id " + std::to_string(sorted_devices[d].id) + " repeats");
    }
  }

  const int n = ix.node_count();
  std::vector<int> node_device(n);
  for (int v = 0; v < n; ++v) {
    auto it = placement.assignment.find(ix.node(v).id);
    if (it == placement.assignment.end()) {
      throw DagError(ErrorKind::UnplacedNode,
                     "node " + std::to_string(ix.node(v).id) + " has no device");
    }
    auto pos = device_pos.find(it->second);
    if (pos == device_pos.end()) {
      throw DagError(ErrorKind::InvalidValue,
                     "node " + std::to_string(ix.node(v).id) + " placed on unknown device " +
                         std::to_string(it->second));
    }
    node_device[v] = pos->second;
  }

  // Task table: computes first, then one transfer per cross-device edge.
  std::vector<SimTask> tasks(n);
  std::vector<int> transfer_of_edge(graph.edges.size(), -1);
  for (int v = 0; v < n; ++v) {
    tasks[v].node_idx = v;
    tasks[v].duration = ix.node(v).compute_us;
    tasks[v].engine_a = node_device[v] * 3 + kComputeLane;
  }
  SimulationReport report;
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    int u = ix.edge_src(e);
    int v = ix.edge_dst(e);
    if (node_device[u] == node_device[v]) continue;
    SimTask t;
    t.is_transfer = true;
    t.edge_idx = static_cast<int>(e);
    t.duration = comm_time(graph.edges[e].tensor_bytes, model);
    t.engine_a = node_device[u] * 3 + kSendLane;
    t.engine_b = node_device[v] * 3 + kReceiveLane;
    t.deps_remaining = 1;  // producer compute task
    transfer_of_edge[e] = static_cast<int>(tasks.size());
    tasks.push_back(std::move(t));
    ++report.cross_transfer_count;
    report.cross_transfer_bytes += graph.edges[e].tensor_bytes;
  }
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    int u = ix.edge_src(e);
    int v = ix.edge_dst(e);
    if (transfer_of_edge[e] >= 0) {
      tasks[u].dependents.push_back(transfer_of_edge[e]);
      tasks[transfer_of_edge[e]].dependents.push_back(v);
      ++tasks[v].deps_remaining;
    } else {
      tasks[u].dependents.push_back(v);
      ++tasks[v].deps_remaining;
    }
  }

  auto key_of = [&](int t) -> TaskKey {
    const SimTask& task = tasks[t];
    if (task.is_transfer) return {task.ready, 1, task.edge_idx};
    return {task.ready, 0, ix.node(task.node_idx).id};
  };

  std::vector<Engine> engines(sorted_devices.size() * 3);
  using Event = std::pair<TaskKey, int>;  // completion: key carries (end, rank, id)
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;

  auto enqueue_ready = [&](int t, Duration now) {
    tasks[t].ready = now;
    engines[tasks[t].engine_a].queue.insert({key_of(t), t});
    if (tasks[t].engine_b >= 0) engines[tasks[t].engine_b].queue.insert({key_of(t), t});
  };

  auto try_start = [&](Duration now) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (size_t e = 0; e < engines.size(); ++e) {
        Engine& engine = engines[e];
        if (engine.busy || engine.queue.empty()) continue;
        int t = engine.queue.begin()->second;
        SimTask& task = tasks[t];
        if (task.is_transfer) {
          Engine& a = engines[task.engine_a];
          Engine& b = engines[task.engine_b];
          if (a.busy || b.busy) continue;
          if (a.queue.begin()->second != t || b.queue.begin()->second != t) continue;
          a.queue.erase(a.queue.begin());
          b.queue.erase(b.queue.begin());
          task.start = std::max({task.ready, a.free_time, b.free_time, now});
          task.end = task.start + task.duration;
          a.busy = b.busy = true;
        } else {
          engine.queue.erase(engine.queue.begin());
          task.start = std::max({task.ready, engine.free_time, now});
          task.end = task.start + task.duration;
          engine.busy = true;
        }
        TaskKey done_key{task.end, task.is_transfer ? 1 : 0,
                         task.is_transfer ? task.edge_idx : ix.node(task.node_idx).id};
        events.push({done_key, t});
        progress = true;
      }
    }
  };

  for (int t = 0; t < static_cast<int>(tasks.size()); ++t) {
    if (tasks[t].deps_remaining == 0) enqueue_ready(t, 0);
  }
  try_start(0);

  size_t completed = 0;
  while (!events.empty()) {
    Duration now = std::get<0>(events.top().first);
    while (!events.empty() && std::get<0>(events.top().first) == now) {
      int t = events.top().second;
      events.pop();
      SimTask& task = tasks[t];
      engines[task.engine_a].busy = false;
      engines[task.engine_a].free_time = task.end;
      if (task.engine_b >= 0) {
        engines[task.engine_b].busy = false;
        engines[task.engine_b].free_time = task.end;
      }
      ++completed;
      for (int dep : task.dependents) {
        if (--tasks[dep].deps_remaining == 0) enqueue_ready(dep, now);
      }
    }
    try_start(now);
  }
  if (completed != tasks.size()) {
    throw DagError(ErrorKind::CycleDetected, "simulation stalled; dependency cycle");
  }

  for (const auto& d : sorted_devices) {
    DeviceReport dr;
    dr.memory_capacity_bytes = d.memory_bytes;
    report.devices[d.id] = dr;
  }
  for (int v = 0; v < n; ++v) {
    report.devices[sorted_devices[node_device[v]].id].peak_memory_bytes +=
        ix.node(v).memory_bytes;
  }
  for (auto& [id, dr] : report.devices) {
    report.oom_flag = report.oom_flag || dr.peak_memory_bytes > dr.memory_capacity_bytes;
  }

  std::vector<int> order(tasks.size());
  for (size_t t = 0; t < tasks.size(); ++t) order[t] = static_cast<int>(t);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (tasks[a].start != tasks[b].start) return tasks[a].start < tasks[b].start;
    if (tasks[a].is_transfer != tasks[b].is_transfer) return !tasks[a].is_transfer;
    if (tasks[a].is_transfer) return tasks[a].edge_idx < tasks[b].edge_idx;
    return ix.node(tasks[a].node_idx).id < ix.node(tasks[b].node_idx).id;
  });
  for (int t : order) {
    const SimTask& task = tasks[t];
    report.makespan = std::max(report.makespan, task.end);
    if (task.is_transfer) {
      const TensorEdge& edge = graph.edges[task.edge_idx];
      DeviceId src_dev = sorted_devices[task.engine_a / 3].id;
      DeviceId dst_dev = sorted_devices[task.engine_b / 3].id;
      report.devices[src_dev].send_busy.push_back({task.start, task.end});
      report.devices[dst_dev].receive_busy.push_back({task.start, task.end});
      report.trace.push_back(
          {TaskKind::Send, -1, edge.src, edge.dst, src_dev, task.start, task.end});
      report.trace.push_back(
          {TaskKind::Receive, -1, edge.src, edge.dst, dst_dev, task.start, task.end});
    } else {
      DeviceId dev = sorted_devices[task.engine_a / 3].id;
      report.devices[dev].compute_busy.push_back({task.start, task.end});
      report.trace.push_back(
          {TaskKind::Compute, ix.node(task.node_idx).id, -1, -1, dev, task.start, task.end});
    }
  }
  return report;
}

std::pair<Placement, Duration> brute_force_optimal(const ComputationGraph& graph,
                                                   const std::vector<DeviceSpec>& devices,
                                                   const CommModel& model) {
  require_valid(graph);
  const size_t n = graph.nodes.size();
  if (n > 12 || devices.size() > 3) {
    throw DagError(ErrorKind::InstanceTooLarge,
                   "exhaustive search limited to 12 nodes and 3 devices");
  }
  if (devices.empty()) throw DagError(ErrorKind::InvalidValue, "device list is empty");

  std::vector<DeviceSpec> sorted_devices = devices;
  std::sort(sorted_devices.begin(), sorted_devices.end(),
            [](const DeviceSpec& a, const DeviceSpec& b) { return a.id < b.id; });
  std::vector<const OpNode*> nodes;
  nodes.reserve(n);
  for (const auto& node : graph.nodes) nodes.push_back(&node);
  std::sort(nodes.begin(), nodes.end(),
            [](const OpNode* a, const OpNode* b) { return a->id < b->id; });

  const int m = static_cast<int>(sorted_devices.size());
  std::vector<int> choice(n, 0);
  std::optional<std::pair<Placement, Duration>> best;

  while (true) {
    std::vector<Bytes> used(m, 0);
    bool feasible = true;
    for (size_t v = 0; v < n && feasible; ++v) {
      used[choice[v]] += nodes[v]->memory_bytes;
      feasible = used[choice[v]] <= sorted_devices[choice[v]].memory_bytes;
    }
    if (feasible) {
      Placement candidate;
      for (size_t v = 0; v < n; ++v) {
        candidate.assignment[nodes[v]->id] = sorted_devices[choice[v]].id;
      }
      for (int d = 0; d < m; ++d) candidate.per_device_memory[sorted_devices[d].id] = used[d];
      Duration makespan = simulate(graph, candidate, sorted_devices, model).makespan;
      // Lexicographic enumeration order makes the first strict minimum the
      // lexicographically smallest optimum.
      if (!best || makespan < best->second) best = {std::move(candidate), makespan};
    }
    // Odometer: last position varies fastest.
    int pos = static_cast<int>(n) - 1;
    while (pos >= 0 && choice[pos] == m - 1) {
      choice[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++choice[pos];
  }

  if (!best) {
    throw DagError(ErrorKind::InstanceInfeasible, "no memory-feasible assignment exists");
  }
  return *best;
}

}  // namespace dagplace
