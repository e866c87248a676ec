#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cvmesh/delaunay.hpp"
#include "cvmesh/error.hpp"
#include "cvmesh/vec.hpp"

namespace cvmesh {

/// Convex polygon, counter-clockwise.
struct Domain2 {
  std::vector<Vec2> polygon;

  static Domain2 box(Vec2 lo, Vec2 hi);
  double area() const;
  bool operator==(const Domain2&) const = default;
};

/// Half-space n . x <= c.
struct Plane {
  Vec3 n;
  double c = 0.0;
  bool operator==(const Plane&) const = default;
};

/// Bounded convex polyhedron given as an intersection of half-spaces.
struct Domain3 {
  std::vector<Plane> planes;

  static Domain3 box(Vec3 lo, Vec3 hi);
  bool operator==(const Domain3&) const = default;
};

/// Bounding box of the points, each side pushed out by 5% of its extent.
Domain2 default_domain(std::span<const Vec2> pts);
Domain3 default_domain(std::span<const Vec3> pts);

/// Boundary face of a cell that lies on the domain boundary carries
/// neighbor = -1 - (domain edge / plane index).
inline int domain_tag(int e) { return -1 - e; }

struct CellFace {
  int neighbor = -1;
  std::vector<int> loop;  // counter-clockwise seen from outside the cell
  bool operator==(const CellFace&) const = default;
};

struct ControlVolume {
  int owner = -1;
  /// 2D: the polygon, counter-clockwise. 3D: every vertex of the cell, sorted.
  std::vector<int> vertices;
  /// 2D: edge_tags[k] tags the edge vertices[k] -> vertices[k+1].
  std::vector<int> edge_tags;
  /// 3D only.
  std::vector<CellFace> faces;
  bool closed = true;
  bool operator==(const ControlVolume&) const = default;
};

struct CellDiagnostic {
  int owner = -1;
  ErrorKind kind = ErrorKind::NonConvexCell;
  std::string detail;
  bool operator==(const CellDiagnostic&) const = default;
};

struct ControlVolumeMesh {
  int dim = 2;
  std::vector<Vec3> points;  // z = 0 in 2D
  std::vector<double> radii;
  std::vector<std::array<int, 4>> simplices;  // Delaunay; 2D entries end in -1
  std::vector<Vec3> vertices;
  std::vector<int> vertex_simplex;  // simplex whose candidate vertex this is, or -1
  std::vector<ControlVolume> volumes;
  /// (i, j) with i < j -> vertex ids of the common edge / face.
  std::map<std::pair<int, int>, std::vector<int>> shared;
  std::vector<CellDiagnostic> diagnostics;

  Domain2 domain2;
  Domain3 domain3;
  double domain_measure = 0.0;
  Vec3 domain_lo{}, domain_hi{};

  bool operator==(const ControlVolumeMesh&) const = default;
};

enum class BuildMode {
  Strict,   // throw on the first defective cell
  Collect,  // record defects in diagnostics and keep going
};

ControlVolumeMesh build_volumes2(const Triangulation2& tri, const NeighborMap2& nm,
                                 std::span<const double> radii, const Domain2& domain,
                                 BuildMode mode = BuildMode::Strict);
ControlVolumeMesh build_volumes2(const Triangulation2& tri, const NeighborMap2& nm,
                                 std::span<const double> radii, BuildMode mode = BuildMode::Strict);

ControlVolumeMesh build_volumes3(const Triangulation3& tet, const NeighborMap3& nm,
                                 std::span<const double> radii, const Domain3& domain,
                                 BuildMode mode = BuildMode::Strict);
ControlVolumeMesh build_volumes3(const Triangulation3& tet, const NeighborMap3& nm,
                                 std::span<const double> radii, BuildMode mode = BuildMode::Strict);

/// Area (2D) or volume (3D) of one cell.
double cell_measure(const ControlVolumeMesh& mesh, int cell);

/// Winding number of the cell boundary around x (1 inside, 0 outside).
double cell_winding(const ControlVolumeMesh& mesh, int cell, Vec3 x);

/// Recomputes the shared map from the cells' edge / face tags.
std::map<std::pair<int, int>, std::vector<int>> shared_faces(const ControlVolumeMesh& mesh, int side);

struct PerpendicularityViolation {
  int i = -1;
  int j = -1;
  double deviation = 0.0;  // |angle - 90 deg| in radians
};

struct PerpendicularityReport {
  std::vector<PerpendicularityViolation> violations;
  int checked = 0;
  int skipped = 0;  // degenerate edges / faces
  double max_deviation = 0.0;
  bool ok() const { return violations.empty(); }
};

PerpendicularityReport validate_perpendicularity(const ControlVolumeMesh& mesh, double tol = 1e-6);

struct GlobalOptions {
  int probes = 10000;
  std::uint64_t seed = 1;
};

struct GlobalReport {
  std::vector<std::pair<int, int>> shared_mismatch;  // (a)
  int probes = 0;
  long overlapping_probes = 0;                        // (b)
  std::vector<std::pair<int, int>> overlapping_cells;
  long uncovered_probes = 0;
  std::vector<int> owner_outside;                     // (c)
  std::vector<std::pair<int, int>> foreign_points;    // (d): (cell, point)
  double measure_sum = 0.0;
  double domain_measure = 0.0;
  double measure_rel_error = 0.0;

  bool ok() const {
    return shared_mismatch.empty() && overlapping_probes == 0 && owner_outside.empty() &&
           foreign_points.empty();
  }
};

GlobalReport validate_global(const ControlVolumeMesh& mesh, const GlobalOptions& options = {});

}  // namespace cvmesh
