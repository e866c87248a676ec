#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvmesh {

enum class ErrorKind {
  DegenerateTriangle,
  DegenerateSegment,
  DegenerateTetrahedron,
  TooFewPoints,
  AllCollinear,
  AllCoplanar,
  DuplicatePoints,
  EmptyInterval,
  NonConvexCell,
  NonPlanarFace,
  OrphanVertex,
  DimensionMismatch,
  UnsupportedFormat,
  IoFailure,
  RejectionBudgetExceeded,
  InvalidInput,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this exception. `indices` carries
// the offending point (or cell) indices when the failure can be localized.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::vector<int> indices = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        indices_(std::move(indices)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<int>& indices() const noexcept { return indices_; }

 private:
  ErrorKind kind_;
  std::vector<int> indices_;
};

}  // namespace cvmesh
