// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#include "dagplace/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dagplace/ordering.hpp"

namespace dagplace {

namespace {

LinearFit least_squares(const std::vector<std::pair<double, double>>& points) {
  const size_t n = points.size();
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (const auto& [x, y] : points) {
    double r = y - fit.predict(x);
    ss += r * r;
  }
  fit.residual_norm = std::sqrt(ss);
  return fit;
}

void check_profiles(const ProfileSet& profiles) {
  std::set<std::int64_t> sizes;
  for (const auto& b : profiles.batches) sizes.insert(b.batch_size);
  if (sizes.size() < 2) {
    throw DagError(ErrorKind::InsufficientSamples,
                   "need at least 2 distinct batch sizes, got " + std::to_string(sizes.size()));
  }
  const auto& universe = profiles.batches.front().nodes;
  for (const auto& b : profiles.batches) {
    if (b.nodes.size() != universe.size()) {
      throw DagError(ErrorKind::NodeUniverseMismatch,
                     "batch " + std::to_string(b.batch_size) + " profiles a different node set");
    }
    for (const auto& [id, sample] : universe) {
      (void)sample;
      if (!b.nodes.count(id)) {
        throw DagError(ErrorKind::NodeUniverseMismatch,
                       "node " + std::to_string(id) + " missing from batch " +
                           std::to_string(b.batch_size));
      }
    }
  }
}

}  // namespace

NodeCostModel fit_node_models(const ProfileSet& profiles) {
  check_profiles(profiles);
  NodeCostModel model;
  for (const auto& [id, first] : profiles.batches.front().nodes) {
    (void)first;
    std::vector<std::pair<double, double>> mem_points, time_points;
    mem_points.reserve(profiles.batches.size());
    time_points.reserve(profiles.batches.size());
    for (const auto& b : profiles.batches) {
      const NodeSample& s = b.nodes.at(id);
      mem_points.emplace_back(static_cast<double>(b.batch_size),
                              static_cast<double>(s.memory_bytes));
      time_points.emplace_back(static_cast<double>(b.batch_size),
                               static_cast<double>(s.compute_us));
    }
    model.memory_fit[id] = least_squares(mem_points);
    model.time_fit[id] = least_squares(time_points);
  }
  return model;
}

ComputationGraph estimate_graph(const ComputationGraph& base, const NodeCostModel& models,
                                std::int64_t target_batch, const EdgeScaling& scaling) {
  if (target_batch <= 0) throw DagError(ErrorKind::InvalidValue, "target batch must be > 0");
  if (scaling.reference_batch <= 0) {
    throw DagError(ErrorKind::InvalidValue, "reference batch must be > 0");
  }

  ComputationGraph estimated = base;
  for (auto& node : estimated.nodes) {
    auto mem = models.memory_fit.find(node.id);
    auto tm = models.time_fit.find(node.id);
    if (mem == models.memory_fit.end() || tm == models.time_fit.end()) {
      throw DagError(ErrorKind::UnknownNode,
                     "no fitted model for node " + std::to_string(node.id));
    }
    node.memory_bytes =
        std::max<Bytes>(0, std::llround(mem->second.predict(static_cast<double>(target_batch))));
    node.compute_us =
        std::max<Duration>(0, std::llround(tm->second.predict(static_cast<double>(target_batch))));
  }

  const double ratio = static_cast<double>(target_batch) / static_cast<double>(scaling.reference_batch);
  for (auto& edge : estimated.edges) {
    double factor = ratio;
    auto ov = scaling.scale_override.find({edge.src, edge.dst});
    if (ov != scaling.scale_override.end()) factor = ov->second;
    edge.tensor_bytes = std::max<Bytes>(
        0, std::llround(static_cast<double>(edge.tensor_bytes) * factor));
  }
  return estimated;
}

CommModel fit_comm_model(const std::vector<std::pair<Bytes, double>>& samples) {
  if (samples.size() < 2) {
    throw DagError(ErrorKind::InsufficientSamples, "need at least 2 transfer samples");
  }
  std::set<Bytes> distinct;
  for (const auto& [bytes, us] : samples) {
    (void)us;
    distinct.insert(bytes);
  }
  if (distinct.size() < 2) {
    throw DagError(ErrorKind::InsufficientSamples, "transfer samples need 2 distinct byte counts");
  }
  std::vector<std::pair<double, double>> points;
  points.reserve(samples.size());
  for (const auto& [bytes, us] : samples) {
    points.emplace_back(static_cast<double>(bytes), us);
  }
  LinearFit fit = least_squares(points);
  CommModel model{std::max(0.0, fit.slope), std::max(0.0, fit.intercept)};
  return model;
}

PlacementResult sequential_eval_placement(const ComputationGraph& estimated,
                                          const std::vector<DeviceSpec>& devices) {
  TopoOrder order = dfs_topo(estimated);
  return order_place(estimated, order, devices);
}

DeviationReport deviation_report(const ComputationGraph& estimated,
                                 const ComputationGraph& measured) {
  std::unordered_map<NodeId, const OpNode*> actual;
  actual.reserve(measured.nodes.size());
  for (const auto& n : measured.nodes) actual[n.id] = &n;
  if (actual.size() != estimated.nodes.size()) {
    throw DagError(ErrorKind::NodeUniverseMismatch,
                   "estimated and measured graphs have different node counts");
  }

  DeviationReport report;
  double mem_sum = 0, time_sum = 0;
  std::int64_t mem_count = 0, time_count = 0;
  for (const auto& est : estimated.nodes) {
    auto it = actual.find(est.id);
    if (it == actual.end()) {
      throw DagError(ErrorKind::NodeUniverseMismatch,
                     "node " + std::to_string(est.id) + " missing from measured graph");
    }
    const OpNode& meas = *it->second;
    if (meas.memory_bytes == 0) {
      report.zero_memory_nodes.push_back(est.id);
    } else {
      double dev = std::abs(static_cast<double>(est.memory_bytes - meas.memory_bytes)) /
                   static_cast<double>(meas.memory_bytes);
      report.memory_deviation[est.id] = dev;
      mem_sum += dev;
      ++mem_count;
    }
    if (meas.compute_us == 0) {
      report.zero_time_nodes.push_back(est.id);
    } else {
      double dev = std::abs(static_cast<double>(est.compute_us - meas.compute_us)) /
                   static_cast<double>(meas.compute_us);
      report.time_deviation[est.id] = dev;
      time_sum += dev;
      ++time_count;
    }
  }
  std::sort(report.zero_memory_nodes.begin(), report.zero_memory_nodes.end());
  std::sort(report.zero_time_nodes.begin(), report.zero_time_nodes.end());
  report.mean_memory_deviation = mem_count ? mem_sum / mem_count : 0.0;
  report.mean_time_deviation = time_count ? time_sum / time_count : 0.0;
  return report;
}

}  // namespace dagplace
