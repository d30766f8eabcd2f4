// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dagplace/graph.hpp"

namespace dagplace {

enum class GenKind { Layered, RandomDag, ParallelChains };

std::string to_string(GenKind kind);
GenKind gen_kind_from_string(const std::string& name);

/// Seeded synthetic graph description. When target_ccr is set, edge bytes
/// are rescaled by bisection until the measured ratio lands within 20% of
/// the target (UnreachableTargetCcr otherwise).
struct SyntheticSpec {
  GenKind kind = GenKind::Layered;
  int node_count = 0;
  int layer_width = 8;   // layered: nodes per layer; parallel-chains: chain count
  std::optional<double> target_ccr;
  Duration compute_mean_us = 500;
  Duration compute_spread_us = 400;
  Bytes memory_mean_bytes = 1 << 20;
  Bytes memory_spread_bytes = 1 << 19;
  Bytes edge_bytes_mean = 1 << 16;
  std::uint64_t seed = 0;
  CommModel comm{0.001, 10.0};  // model used for CCR calibration
};

ComputationGraph gen_graph(const SyntheticSpec& spec);

}  // namespace dagplace
