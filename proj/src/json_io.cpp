// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include "dagplace/json_io.hpp"

#include <fstream>

namespace dagplace {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* name, const char* context) {
  auto it = j.find(name);
  if (it == j.end()) {
    throw DagError(ErrorKind::ParseError,
                   std::string("missing field '") + name + "' in " + context);
  }
  return *it;
}

template <typename T>
T number(const json& j, const char* name, const char* context) {
  const json& f = field(j, name, context);
  if (!f.is_number()) {
    throw DagError(ErrorKind::ParseError,
                   std::string("field '") + name + "' in " + context + " must be a number");
  }
  return f.get<T>();
}

void check_schema_version(const json& j, const char* context) {
  auto it = j.find("schema_version");
  if (it != j.end() && (!it->is_number_integer() || it->get<int>() != kSchemaVersion)) {
    throw DagError(ErrorKind::ParseError,
                   std::string("unsupported schema_version in ") + context);
  }
}

}  // namespace

ComputationGraph graph_from_json(const json& j) {
  if (!j.is_object()) throw DagError(ErrorKind::ParseError, "graph document must be an object");
  check_schema_version(j, "graph");
  ComputationGraph g;
  const json& nodes = field(j, "nodes", "graph");
  if (!nodes.is_array()) throw DagError(ErrorKind::ParseError, "field 'nodes' must be an array");
  for (const auto& nj : nodes) {
    OpNode node;
    node.id = number<NodeId>(nj, "id", "node");
    node.name = nj.contains("name") && nj["name"].is_string() ? nj["name"].get<std::string>() : "";
    node.compute_us = number<Duration>(nj, "compute_us", "node");
    node.memory_bytes = number<Bytes>(nj, "memory_bytes", "node");
    if (nj.contains("colocation_group") && !nj["colocation_group"].is_null()) {
      if (!nj["colocation_group"].is_string()) {
        throw DagError(ErrorKind::ParseError,
                       "field 'colocation_group' must be a string or null");
      }
      node.colocation_group = nj["colocation_group"].get<std::string>();
    }
    g.nodes.push_back(std::move(node));
  }
  const json& edges = field(j, "edges", "graph");
  if (!edges.is_array()) throw DagError(ErrorKind::ParseError, "field 'edges' must be an array");
  for (const auto& ej : edges) {
    TensorEdge edge;
    edge.src = number<NodeId>(ej, "src", "edge");
    edge.dst = number<NodeId>(ej, "dst", "edge");
    edge.tensor_bytes = number<Bytes>(ej, "tensor_bytes", "edge");
    g.edges.push_back(edge);
  }
  return g;
}

json graph_to_json(const ComputationGraph& graph) {
  json nodes = json::array();
  for (const auto& n : graph.nodes) {
    json nj{{"id", n.id},
            {"name", n.name},
            {"compute_us", n.compute_us},
            {"memory_bytes", n.memory_bytes}};
    nj["colocation_group"] = n.colocation_group ? json(*n.colocation_group) : json(nullptr);
    nodes.push_back(std::move(nj));
  }
  json edges = json::array();
  for (const auto& e : graph.edges) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"tensor_bytes", e.tensor_bytes}});
  }
  return json{{"schema_version", kSchemaVersion}, {"nodes", nodes}, {"edges", edges}};
}

DeviceFile devices_from_json(const json& j) {
  if (!j.is_object()) throw DagError(ErrorKind::ParseError, "device document must be an object");
  check_schema_version(j, "devices");
  DeviceFile file;
  const json& devices = field(j, "devices", "device file");
  if (!devices.is_array() || devices.empty()) {
    throw DagError(ErrorKind::ParseError, "field 'devices' must be a non-empty array");
  }
  for (const auto& dj : devices) {
    DeviceSpec d;
    d.id = number<DeviceId>(dj, "id", "device");
    d.memory_bytes = number<Bytes>(dj, "memory_bytes", "device");
    if (d.memory_bytes <= 0) {
      throw DagError(ErrorKind::ParseError, "field 'memory_bytes' must be > 0 in device " +
                                                std::to_string(d.id));
    }
    file.devices.push_back(d);
  }
  const json& comm = field(j, "comm", "device file");
  file.comm.k_us_per_byte = number<double>(comm, "k_us_per_byte", "comm");
  file.comm.b_us = number<double>(comm, "b_us", "comm");
  if (file.comm.k_us_per_byte < 0 || file.comm.b_us < 0) {
    throw DagError(ErrorKind::ParseError, "comm coefficients must be non-negative");
  }
  return file;
}

json devices_to_json(const DeviceFile& file) {
  json devices = json::array();
  for (const auto& d : file.devices) {
    devices.push_back({{"id", d.id}, {"memory_bytes", d.memory_bytes}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"devices", devices},
              {"comm", {{"k_us_per_byte", file.comm.k_us_per_byte}, {"b_us", file.comm.b_us}}}};
}

ProfileSet profiles_from_json(const json& j) {
  if (!j.is_object()) throw DagError(ErrorKind::ParseError, "profile document must be an object");
  check_schema_version(j, "profiles");
  ProfileSet profiles;
  const json& batches = field(j, "batches", "profile file");
  if (!batches.is_array()) {
    throw DagError(ErrorKind::ParseError, "field 'batches' must be an array");
  }
  for (const auto& bj : batches) {
    BatchProfile batch;
    batch.batch_size = number<std::int64_t>(bj, "batch_size", "batch");
    const json& nodes = field(bj, "nodes", "batch");
    if (!nodes.is_object()) {
      throw DagError(ErrorKind::ParseError, "field 'nodes' in a batch must be an object");
    }
    for (auto it = nodes.begin(); it != nodes.end(); ++it) {
      NodeId id;
      try {
        id = std::stoll(it.key());
      } catch (const std::exception&) {
        throw DagError(ErrorKind::ParseError,
                       "node key '" + it.key() + "' in batch is not an integer id");
      }
      NodeSample sample;
      sample.memory_bytes = number<Bytes>(it.value(), "memory_bytes", "node sample");
      sample.compute_us = number<Duration>(it.value(), "compute_us", "node sample");
      batch.nodes[id] = sample;
    }
    profiles.batches.push_back(std::move(batch));
  }
  if (j.contains("comm_samples")) {
    const json& samples = j["comm_samples"];
    if (!samples.is_array()) {
      throw DagError(ErrorKind::ParseError, "field 'comm_samples' must be an array");
    }
    for (const auto& sj : samples) {
      if (!sj.is_array() || sj.size() != 2 || !sj[0].is_number() || !sj[1].is_number()) {
        throw DagError(ErrorKind::ParseError,
                       "entries of 'comm_samples' must be [bytes, microseconds] pairs");
      }
      profiles.comm_samples.emplace_back(sj[0].get<Bytes>(), sj[1].get<double>());
    }
  }
  return profiles;
}

json profiles_to_json(const ProfileSet& profiles) {
  json batches = json::array();
  for (const auto& b : profiles.batches) {
    json nodes = json::object();
    for (const auto& [id, sample] : b.nodes) {
      nodes[std::to_string(id)] = {{"memory_bytes", sample.memory_bytes},
                                   {"compute_us", sample.compute_us}};
    }
    batches.push_back({{"batch_size", b.batch_size}, {"nodes", nodes}});
  }
  json samples = json::array();
  for (const auto& [bytes, us] : profiles.comm_samples) samples.push_back({bytes, us});
  return json{{"schema_version", kSchemaVersion},
              {"batches", batches},
              {"comm_samples", samples}};
}

Placement placement_from_json(const json& j) {
  if (!j.is_object()) throw DagError(ErrorKind::ParseError, "placement document must be an object");
  check_schema_version(j, "placement");
  Placement p;
  const json& assignment = field(j, "assignment", "placement");
  if (!assignment.is_object()) {
    throw DagError(ErrorKind::ParseError, "field 'assignment' must be an object");
  }
  for (auto it = assignment.begin(); it != assignment.end(); ++it) {
    NodeId id;
    try {
      id = std::stoll(it.key());
    } catch (const std::exception&) {
      throw DagError(ErrorKind::ParseError,
                     "assignment key '" + it.key() + "' is not an integer node id");
    }
    if (!it.value().is_number_integer()) {
      throw DagError(ErrorKind::ParseError, "assignment values must be integer device ids");
    }
    p.assignment[id] = it.value().get<DeviceId>();
  }
  if (j.contains("per_device_memory") && j["per_device_memory"].is_object()) {
    for (auto it = j["per_device_memory"].begin(); it != j["per_device_memory"].end(); ++it) {
      p.per_device_memory[static_cast<DeviceId>(std::stoll(it.key()))] = it.value().get<Bytes>();
    }
  }
  return p;
}

namespace {

json placement_to_json_fields(const Placement& p) {
  json assignment = json::object();
  for (const auto& [id, dev] : p.assignment) assignment[std::to_string(id)] = dev;
  json memory = json::object();
  for (const auto& [dev, bytes] : p.per_device_memory) memory[std::to_string(dev)] = bytes;
  return json{{"assignment", assignment}, {"per_device_memory", memory}};
}

json duration_or_null(Duration d) { return d == kNever ? json(nullptr) : json(d); }

}  // namespace

json placement_result_to_json(const PlacementResult& result) {
  json j = placement_to_json_fields(result.placement);
  j["schema_version"] = kSchemaVersion;
  j["oom_risk"] = result.oom_risk;
  json log = json::array();
  for (const auto& d : result.decisions) {
    json est = json::object();
    for (const auto& [dev, t] : d.est_us) est[std::to_string(dev)] = duration_or_null(t);
    log.push_back({{"node", d.node},
                   {"prev_device", d.prev_device},
                   {"back_cost_us", d.back_cost_us},
                   {"est_us", est},
                   {"chosen", d.chosen},
                   {"relocated", d.relocated},
                   {"best_effort", d.best_effort}});
  }
  j["decision_log"] = log;
  return j;
}

json topo_order_to_json(const TopoOrder& order) {
  return json{{"schema_version", kSchemaVersion},
              {"policy", to_string(order.policy)},
              {"sequence", order.sequence}};
}

json cluster_map_to_json(const ClusterMap& map) {
  json clusters = json::array();
  for (const auto& c : map.clusters) clusters.push_back(c.members);
  return json{{"schema_version", kSchemaVersion},
              {"clusters", clusters},
              {"breakpoints", map.breakpoints}};
}

json validation_to_json(const ValidationResult& result) {
  json violations = json::array();
  for (const auto& v : result.violations) {
    violations.push_back({{"kind", std::string(to_string(v.kind))},
                          {"message", v.message},
                          {"nodes", v.nodes}});
  }
  return json{{"schema_version", kSchemaVersion}, {"ok", result.ok}, {"violations", violations}};
}

namespace {

json intervals_to_json(const std::vector<BusyInterval>& intervals) {
  json out = json::array();
  for (const auto& iv : intervals) out.push_back({iv.start, iv.end});
  return out;
}

}  // namespace

json simulation_to_json(const SimulationReport& report) {
  json devices = json::object();
  for (const auto& [id, dr] : report.devices) {
    devices[std::to_string(id)] = {{"compute_busy", intervals_to_json(dr.compute_busy)},
                                   {"send_busy", intervals_to_json(dr.send_busy)},
                                   {"receive_busy", intervals_to_json(dr.receive_busy)},
                                   {"peak_memory_bytes", dr.peak_memory_bytes},
                                   {"memory_capacity_bytes", dr.memory_capacity_bytes}};
  }
  return json{{"schema_version", kSchemaVersion},
              {"makespan_us", report.makespan},
              {"devices", devices},
              {"cross_transfer_count", report.cross_transfer_count},
              {"cross_transfer_bytes", report.cross_transfer_bytes},
              {"oom", report.oom_flag}};
}

json trace_to_json_lines(const SimulationReport& report) {
  json lines = json::array();
  for (const auto& t : report.trace) {
    json rec{{"kind", to_string(t.kind)},
             {"device", t.device},
             {"start_us", t.start},
             {"end_us", t.end}};
    if (t.kind == TaskKind::Compute) {
      rec["node"] = t.node;
    } else {
      rec["edge"] = {t.edge_src, t.edge_dst};
    }
    lines.push_back(std::move(rec));
  }
  return lines;
}

json pipeline_report_to_json(const PipelineReport& report) {
  json chosen = placement_to_json_fields(report.chosen_placement);
  chosen["strategy"] = report.chosen_strategy;
  chosen["oom_risk"] = report.chosen_oom_risk;
  return json{
      {"schema_version", kSchemaVersion},
      {"graph", {{"nodes", report.original_nodes}, {"edges", report.original_edges},
                 {"ccr", report.original_ccr}}},
      {"coarse", {{"nodes", report.coarse_nodes}, {"edges", report.coarse_edges},
                  {"ccr", report.coarse_ccr}}},
      {"reduction", {{"nodes", report.node_reduction_factor}, {"ccr", report.ccr_reduction_factor}}},
      {"order_place", {{"makespan_us", report.order_place.makespan_us},
                       {"oom_risk", report.order_place.oom_risk}}},
      {"adjusting", {{"makespan_us", report.adjusting.makespan_us},
                     {"oom_risk", report.adjusting.oom_risk}}},
      {"comm_source", report.comm_source},
      {"chosen", chosen},
      {"clusters", cluster_map_to_json(report.fusion.map)["clusters"]},
      {"simulation", simulation_to_json(report.chosen_simulation)},
  };
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DagError(ErrorKind::ParseError, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DagError(ErrorKind::ParseError, "invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DagError(ErrorKind::ParseError, "cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace dagplace
