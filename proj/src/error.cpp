#include "cvmesh/error.hpp"

namespace cvmesh {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::DegenerateSegment: return "DegenerateSegment";
    case ErrorKind::DegenerateTetrahedron: return "DegenerateTetrahedron";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::AllCollinear: return "AllCollinear";
    case ErrorKind::AllCoplanar: return "AllCoplanar";
    case ErrorKind::DuplicatePoints: return "DuplicatePoints";
    case ErrorKind::EmptyInterval: return "EmptyInterval";
    case ErrorKind::NonConvexCell: return "NonConvexCell";
    case ErrorKind::NonPlanarFace: return "NonPlanarFace";
    case ErrorKind::OrphanVertex: return "OrphanVertex";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace cvmesh
