// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include "dagplace/placement.hpp"

#include <algorithm>
#include <cassert>

#include "dagplace/graph_index.hpp"

namespace dagplace {

Duration DeviceTimeline::find_slot(Duration earliest, Duration duration) const {
  Duration candidate = earliest;
  for (const auto& iv : busy_) {
    if (iv.end <= candidate) continue;
    if (iv.start >= candidate && iv.start - candidate >= duration) break;
    candidate = std::max(candidate, iv.end);
  }
  return candidate;
}

void DeviceTimeline::reserve(Duration start, Duration duration) {
  BusyInterval iv{start, start + duration};
  auto pos = std::upper_bound(busy_.begin(), busy_.end(), iv,
                              [](const BusyInterval& a, const BusyInterval& b) {
                                return a.start < b.start;
                              });
  assert((pos == busy_.end() || iv.end <= pos->start) &&
         (pos == busy_.begin() || std::prev(pos)->end <= iv.start));
  busy_.insert(pos, iv);
}

SchedulerState SchedulerState::for_devices(const std::vector<DeviceSpec>& devices) {
  if (devices.empty()) throw DagError(ErrorKind::InvalidValue, "device list is empty");
  std::vector<DeviceSpec> sorted = devices;
  std::sort(sorted.begin(), sorted.end(),
            [](const DeviceSpec& a, const DeviceSpec& b) { return a.id < b.id; });
  SchedulerState state;
  for (const auto& d : sorted) {
    if (d.memory_bytes <= 0) {
      throw DagError(ErrorKind::InvalidValue,
                     "device " + std::to_string(d.id) + " has non-positive memory capacity");
    }
    if (!state.device_ids.empty() && state.device_ids.back() == d.id) {
      throw DagError(ErrorKind::DuplicateId, "device id " + std::to_string(d.id) + " repeats");
    }
    state.device_ids.push_back(d.id);
    state.available_memory.push_back(d.memory_bytes);
  }
  state.timelines.resize(state.device_ids.size());
  return state;
}

int SchedulerState::device_pos(DeviceId id) const {
  auto it = std::lower_bound(device_ids.begin(), device_ids.end(), id);
  if (it == device_ids.end() || *it != id) {
    throw DagError(ErrorKind::InvalidValue, "unknown device id " + std::to_string(id));
  }
  return static_cast<int>(it - device_ids.begin());
}

namespace {

void check_order(const ComputationGraph& graph, const TopoOrder& order) {
  if (!is_valid_topo_order(graph, order)) {
    throw DagError(ErrorKind::InvalidValue, "order is not a topological order of this graph");
  }
}

// Device with the most remaining memory; lowest id on ties.
int most_free_device(const SchedulerState& state) {
  int best = 0;
  for (size_t d = 1; d < state.available_memory.size(); ++d) {
    if (state.available_memory[d] > state.available_memory[best]) best = static_cast<int>(d);
  }
  return best;
}

// Data-ready time plus insertion-based slot search on one device.
Duration est_on_device(const GraphIndex& ix, const std::vector<Duration>& edge_cost,
                       const SchedulerState& state, const std::vector<int>& device_of_idx,
                       int node_idx, int device_pos) {
  Duration pre_t = 0;
  for (int e : ix.in_edges(node_idx)) {
    int p = ix.edge_src(e);
    if (device_of_idx[p] < 0) {
      throw DagError(ErrorKind::UnplacedNode,
                     "predecessor " + std::to_string(ix.node(p).id) + " not placed yet");
    }
    Duration finish = state.finish_time.at(ix.node(p).id);
    Duration arrival = finish + (device_of_idx[p] == device_pos ? 0 : edge_cost[e]);
    pre_t = std::max(pre_t, arrival);
  }
  return state.timelines[device_pos].find_slot(pre_t, ix.node(node_idx).compute_us);
}

struct PlacementContext {
  GraphIndex ix;
  std::vector<Duration> edge_cost;
  SchedulerState state;
  std::vector<int> device_of_idx;  // node index -> device position, -1 until placed

  PlacementContext(const ComputationGraph& graph, const std::vector<DeviceSpec>& devices,
                   const CommModel* model)
      : ix(graph), state(SchedulerState::for_devices(devices)), device_of_idx(graph.nodes.size(), -1) {
    edge_cost.resize(graph.edges.size(), 0);
    if (model) {
      for (size_t e = 0; e < graph.edges.size(); ++e) {
        edge_cost[e] = comm_time(graph.edges[e].tensor_bytes, *model);
      }
    }
  }

  void commit(int node_idx, int device_pos, Duration start, PlacementResult& result) {
    const OpNode& node = ix.node(node_idx);
    device_of_idx[node_idx] = device_pos;
    state.available_memory[device_pos] -= node.memory_bytes;
    state.finish_time[node.id] = start + node.compute_us;
    state.timelines[device_pos].reserve(start, node.compute_us);
    result.placement.assignment[node.id] = state.device_ids[device_pos];
    result.placement.per_device_memory[state.device_ids[device_pos]] += node.memory_bytes;
  }
};

}  // namespace

PlacementResult order_place(const CoarseGraph& coarse, const TopoOrder& order,
                            const std::vector<DeviceSpec>& devices) {
  require_valid(coarse);
  check_order(coarse, order);
  PlacementContext ctx(coarse, devices, nullptr);
  const int device_count = static_cast<int>(ctx.state.device_ids.size());

  PlacementResult result;
  for (DeviceId id : ctx.state.device_ids) result.placement.per_device_memory[id] = 0;

  int cursor = 0;  // devices before the cursor are never revisited
  for (NodeId id : order.sequence) {
    int node_idx = ctx.ix.index_of(id);
    const OpNode& node = ctx.ix.node(node_idx);
    int target = -1;
    for (int d = cursor; d < device_count; ++d) {
      if (ctx.state.available_memory[d] >= node.memory_bytes) {
        target = d;
        break;
      }
    }
    if (target >= 0) {
      cursor = target;
    } else {
      target = most_free_device(ctx.state);
      result.oom_risk = true;
    }
    Duration start = ctx.state.timelines[target].find_slot(0, node.compute_us);
    ctx.commit(node_idx, target, start, result);
  }
  return result;
}

PlacementResult adjusting_placement(const CoarseGraph& coarse, const TopoOrder& order,
                                    const std::vector<DeviceSpec>& devices,
                                    const CommModel& model) {
  require_valid(coarse);
  check_order(coarse, order);
  PlacementContext ctx(coarse, devices, &model);
  const int device_count = static_cast<int>(ctx.state.device_ids.size());

  PlacementResult result;
  for (DeviceId id : ctx.state.device_ids) result.placement.per_device_memory[id] = 0;

  int prev_device = 0;  // position of the previous node's device; first node anchors to device 0
  for (NodeId id : order.sequence) {
    int node_idx = ctx.ix.index_of(id);
    const OpNode& node = ctx.ix.node(node_idx);

    Duration back_cost = 0;
    for (int e : ctx.ix.out_edges(node_idx)) back_cost = std::max(back_cost, ctx.edge_cost[e]);

    PlacementDecision decision;
    decision.node = id;
    decision.prev_device = ctx.state.device_ids[prev_device];
    decision.back_cost_us = back_cost;

    std::vector<Duration> est(device_count, kNever);
    int best = -1;
    for (int d = 0; d < device_count; ++d) {
      if (ctx.state.available_memory[d] >= node.memory_bytes) {
        est[d] = est_on_device(ctx.ix, ctx.edge_cost, ctx.state, ctx.device_of_idx, node_idx, d);
        if (best < 0 || est[d] < est[best]) best = d;  // strict: lowest id wins ties
      }
      decision.est_us[ctx.state.device_ids[d]] = est[d];
    }

    int chosen;
    Duration start;
    if (best >= 0 &&
        (est[prev_device] == kNever || est[prev_device] - est[best] > back_cost)) {
      chosen = best;
      start = est[best];
      decision.relocated = (chosen != prev_device);
    } else if (est[prev_device] != kNever) {
      chosen = prev_device;
      start = est[prev_device];
    } else {
      chosen = most_free_device(ctx.state);
      start = est_on_device(ctx.ix, ctx.edge_cost, ctx.state, ctx.device_of_idx, node_idx, chosen);
      decision.best_effort = true;
      result.oom_risk = true;
    }
    decision.chosen = ctx.state.device_ids[chosen];
    result.decisions.push_back(std::move(decision));

    ctx.commit(node_idx, chosen, start, result);
    prev_device = chosen;
  }
  return result;
}

Duration compute_est(const SchedulerState& state, const CoarseGraph& graph,
                     const std::unordered_map<NodeId, DeviceId>& assignment,
                     NodeId node, DeviceId device, const CommModel& model) {
  GraphIndex ix(graph);
  int node_idx = ix.index_of(node);
  int device_pos = state.device_pos(device);
  if (state.available_memory[device_pos] < ix.node(node_idx).memory_bytes) return kNever;

  std::vector<Duration> edge_cost(graph.edges.size(), 0);
  std::vector<int> device_of_idx(graph.nodes.size(), -1);
  for (int e : ix.in_edges(node_idx)) {
    edge_cost[e] = comm_time(graph.edges[e].tensor_bytes, model);
    int p = ix.edge_src(e);
    auto it = assignment.find(ix.node(p).id);
    if (it != assignment.end()) device_of_idx[p] = state.device_pos(it->second);
  }
  return est_on_device(ix, edge_cost, state, device_of_idx, node_idx, device_pos);
}

Placement expand_placement(const ComputationGraph& original, const ClusterMap& clusters,
                           const Placement& coarse_placement) {
  GraphIndex ix(original);
  if (clusters.node_to_cluster.size() != original.nodes.size()) {
    throw DagError(ErrorKind::InvalidClusterMap,
                   "cluster map covers " + std::to_string(clusters.node_to_cluster.size()) +
                       " nodes, graph has " + std::to_string(original.nodes.size()));
  }

  Placement expanded;
  for (const Cluster& cluster : clusters.clusters) {
    auto dev = coarse_placement.assignment.find(cluster.id);
    if (dev == coarse_placement.assignment.end()) {
      throw DagError(ErrorKind::UnplacedNode,
                     "cluster " + std::to_string(cluster.id) + " has no device");
    }
    for (NodeId member : cluster.members) {
      const OpNode& node = ix.node(ix.index_of(member));
      if (!expanded.assignment.emplace(member, dev->second).second) {
        throw DagError(ErrorKind::InvalidClusterMap,
                       "node " + std::to_string(member) + " appears in two clusters");
      }
      expanded.per_device_memory[dev->second] += node.memory_bytes;
    }
  }
  if (expanded.assignment.size() != original.nodes.size()) {
    throw DagError(ErrorKind::InvalidClusterMap, "expanded placement does not cover the graph");
  }
  return expanded;
}

}  // namespace dagplace
