// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "dagplace/estimation.hpp"
#include "dagplace/fusion.hpp"
#include "dagplace/placement.hpp"
#include "dagplace/simulator.hpp"

namespace dagplace {

enum class PlaceStrategy { Order, Adjust, SequentialEval };

std::string to_string(PlaceStrategy strategy);
PlaceStrategy place_strategy_from_string(const std::string& name);

struct PipelineConfig {
  int fusion_range = 200;
  double cluster_mem_fraction = 0.25;  // of the smallest device's capacity
  PlaceStrategy strategy = PlaceStrategy::Adjust;
  std::optional<std::int64_t> target_batch;  // required when profiles are given
};

struct StrategyOutcome {
  Duration makespan_us = 0;
  bool oom_risk = false;
};

struct PipelineReport {
  std::int64_t original_nodes = 0;
  std::int64_t original_edges = 0;
  double original_ccr = 0.0;
  std::int64_t coarse_nodes = 0;
  std::int64_t coarse_edges = 0;
  double coarse_ccr = 0.0;
  double node_reduction_factor = 1.0;
  double ccr_reduction_factor = 1.0;
  StrategyOutcome order_place;
  StrategyOutcome adjusting;
  std::string comm_source;        // "devices" or "fitted"
  std::string chosen_strategy;
  bool chosen_oom_risk = false;
  Placement chosen_placement;     // expanded onto the original nodes
  SimulationReport chosen_simulation;
  FusionResult fusion;
  // wall clock of order+fuse+place (simulation and estimation excluded);
  // kept out of serialized reports so outputs stay byte-identical
  Duration generation_wall_us = 0;
};

/// End-to-end run: optional profile-based extrapolation, fusion, both
/// placement strategies, expansion, and simulation of each candidate.
PipelineReport evaluate_pipeline(const ComputationGraph& graph,
                                 const std::optional<ProfileSet>& profiles,
                                 const std::vector<DeviceSpec>& devices,
                                 const CommModel& device_comm,
                                 const PipelineConfig& config);

}  // namespace dagplace
