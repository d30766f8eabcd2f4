// Copyright 2026 The dagplace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dagplace {

enum class ErrorKind {
  CycleDetected,
  DanglingEdge,
  DuplicateId,
  DuplicateEdge,
  InvalidValue,
  ZeroComputeTime,
  NoSuchEdge,
  NodeExceedsClusterLimit,
  GroupExceedsClusterLimit,
  InfeasiblePartition,
  InvalidClusterMap,
  InsufficientSamples,
  UnknownNode,
  NodeUniverseMismatch,
  UnplacedNode,
  InstanceTooLarge,
  InstanceInfeasible,
  UnreachableTargetCcr,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// All library operations report failures through this exception type.
class DagError : public std::runtime_error {
 public:
  DagError(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dagplace
