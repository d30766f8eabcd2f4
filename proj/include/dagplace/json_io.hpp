// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dagplace/estimation.hpp"
#include "dagplace/fusion.hpp"
#include "dagplace/graph.hpp"
#include "dagplace/ordering.hpp"
#include "dagplace/pipeline.hpp"
#include "dagplace/placement.hpp"
#include "dagplace/simulator.hpp"

namespace dagplace {

inline constexpr int kSchemaVersion = 1;

struct DeviceFile {
  std::vector<DeviceSpec> devices;
  CommModel comm;
};

// Parsing throws DagError{ParseError} naming the offending field.
ComputationGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const ComputationGraph& graph);

DeviceFile devices_from_json(const nlohmann::json& j);
nlohmann::json devices_to_json(const DeviceFile& file);

ProfileSet profiles_from_json(const nlohmann::json& j);
nlohmann::json profiles_to_json(const ProfileSet& profiles);

Placement placement_from_json(const nlohmann::json& j);
nlohmann::json placement_result_to_json(const PlacementResult& result);

nlohmann::json topo_order_to_json(const TopoOrder& order);
nlohmann::json cluster_map_to_json(const ClusterMap& map);
nlohmann::json validation_to_json(const ValidationResult& result);
nlohmann::json simulation_to_json(const SimulationReport& report);
nlohmann::json trace_to_json_lines(const SimulationReport& report);  // array of records
nlohmann::json pipeline_report_to_json(const PipelineReport& report);

// File helpers; read errors surface as DagError{ParseError}.
nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace dagplace
