// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include "dagplace/pipeline.hpp"

#include <algorithm>
#include <chrono>

namespace dagplace {

std::string to_string(PlaceStrategy strategy) {
  switch (strategy) {
    case PlaceStrategy::Order: return "order";
    case PlaceStrategy::Adjust: return "adjust";
    case PlaceStrategy::SequentialEval: return "sequential-eval";
  }
  return "unknown";
}

PlaceStrategy place_strategy_from_string(const std::string& name) {
  if (name == "order" || name == "order-place") return PlaceStrategy::Order;
  if (name == "adjust" || name == "adjusting") return PlaceStrategy::Adjust;
  if (name == "sequential-eval" || name == "sequential") return PlaceStrategy::SequentialEval;
  throw DagError(ErrorKind::InvalidValue, "unknown placement strategy '" + name + "'");
}

PipelineReport evaluate_pipeline(const ComputationGraph& graph,
                                 const std::optional<ProfileSet>& profiles,
                                 const std::vector<DeviceSpec>& devices,
                                 const CommModel& device_comm,
                                 const PipelineConfig& config) {
  if (devices.empty()) throw DagError(ErrorKind::InvalidValue, "device list is empty");
  require_valid(graph);

  PipelineReport report;
  CommModel comm = device_comm;
  report.comm_source = "devices";

  ComputationGraph working = graph;
  if (profiles) {
    if (!config.target_batch) {
      throw DagError(ErrorKind::InvalidValue, "profiles given but no target batch");
    }
    NodeCostModel models = fit_node_models(*profiles);
    std::int64_t reference = 0;
    for (const auto& b : profiles->batches) reference = std::max(reference, b.batch_size);
    EdgeScaling scaling;
    scaling.reference_batch = reference;
    working = estimate_graph(graph, models, *config.target_batch, scaling);
    if (profiles->comm_samples.size() >= 2) {
      comm = fit_comm_model(profiles->comm_samples);
      report.comm_source = "fitted";
    }
  }

  report.original_nodes = static_cast<std::int64_t>(working.nodes.size());
  report.original_edges = static_cast<std::int64_t>(working.edges.size());
  report.original_ccr = ccr(working, comm);

  Bytes min_capacity = devices.front().memory_bytes;
  for (const auto& d : devices) min_capacity = std::min(min_capacity, d.memory_bytes);
  FusionConfig fusion_config;
  fusion_config.range = config.fusion_range;
  fusion_config.cluster_memory_limit = std::max<Bytes>(
      1, static_cast<Bytes>(static_cast<double>(min_capacity) * config.cluster_mem_fraction));

  const auto t0 = std::chrono::steady_clock::now();
  report.fusion = fuse(working, comm, fusion_config);
  const CoarseGraph& coarse = report.fusion.coarse;
  LevelTable coarse_levels = compute_levels(coarse, comm);
  TopoOrder coarse_order = cpd_topo(coarse, coarse_levels);

  PlacementResult order_result = order_place(coarse, coarse_order, devices);
  PlacementResult adjust_result = adjusting_placement(coarse, coarse_order, devices, comm);
  Placement order_expanded = expand_placement(working, report.fusion.map, order_result.placement);
  Placement adjust_expanded = expand_placement(working, report.fusion.map, adjust_result.placement);
  const auto t1 = std::chrono::steady_clock::now();
  report.generation_wall_us =
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();

  report.coarse_nodes = static_cast<std::int64_t>(coarse.nodes.size());
  report.coarse_edges = static_cast<std::int64_t>(coarse.edges.size());
  report.coarse_ccr = coarse.edges.empty() ? 0.0 : ccr(coarse, comm);
  report.node_reduction_factor =
      static_cast<double>(report.original_nodes) / static_cast<double>(report.coarse_nodes);
  report.ccr_reduction_factor =
      report.coarse_ccr > 0 ? report.original_ccr / report.coarse_ccr : 0.0;

  SimulationReport order_sim = simulate(working, order_expanded, devices, comm);
  SimulationReport adjust_sim = simulate(working, adjust_expanded, devices, comm);
  report.order_place = {order_sim.makespan, order_result.oom_risk};
  report.adjusting = {adjust_sim.makespan, adjust_result.oom_risk};

  PlaceStrategy strategy = config.strategy;
  report.chosen_strategy = to_string(strategy);
  if (strategy == PlaceStrategy::SequentialEval) {
    PlacementResult seq = sequential_eval_placement(working, devices);
    report.chosen_oom_risk = seq.oom_risk;
    report.chosen_placement = seq.placement;
    report.chosen_simulation = simulate(working, seq.placement, devices, comm);
  } else if (strategy == PlaceStrategy::Order) {
    report.chosen_oom_risk = order_result.oom_risk;
    report.chosen_placement = std::move(order_expanded);
    report.chosen_simulation = std::move(order_sim);
  } else {
    report.chosen_oom_risk = adjust_result.oom_risk;
    report.chosen_placement = std::move(adjust_expanded);
    report.chosen_simulation = std::move(adjust_sim);
  }
  return report;
}

}  // namespace dagplace
