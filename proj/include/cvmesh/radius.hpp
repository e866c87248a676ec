#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cvmesh/delaunay.hpp"
#include "cvmesh/optimize.hpp"
#include "cvmesh/vec.hpp"

namespace cvmesh {

enum class SolveMode { ExactIntersection, RadicalCenter };

/// What solve_radii does with a point whose admissible interval is empty.
enum class BoundsPolicy {
  Strict,   // throw EmptyInterval
  Relaxed,  // use (0, r_max) for that point and report it
};

/// Admissible radius interval lo < r < hi for one point.
struct RadiusBounds {
  double lo = 0.0;
  double hi = 0.0;
  int blocking = -1;     // neighbour that attains lo, -1 when lo is floored at 0
  bool relaxed = false;  // lo was dropped because the interval was empty

  bool empty() const { return !(lo < hi); }
};

/// Control-volume vertex of one simplex: the radical center of its circles
/// (spheres). residual is |power| of the vertex with respect to them, zero
/// exactly when all of them pass through it.
template <typename V>
struct CandidateVertex {
  V position{};
  int simplex = -1;
  double residual = 0.0;
};

using CandidateVertex2 = CandidateVertex<Vec2>;
using CandidateVertex3 = CandidateVertex<Vec3>;

/// Cramer's-rule pieces of the 3x3 pairwise-difference system
/// 2 (c1 - cl) . x = delta_{l-1}, l = 2..4 (all coordinates taken relative to c1).
struct CramerDeterminants {
  double w = 0.0, wx = 0.0, wy = 0.0, wz = 0.0;
  double delta1 = 0.0, delta2 = 0.0, delta3 = 0.0;
};

double power(Vec2 q, Vec2 center, double radius);
double power(Vec3 q, Vec3 center, double radius);

CandidateVertex2 vertex2(Vec2 c1, Vec2 c2, Vec2 c3, double r1, double r2, double r3);
CramerDeterminants cramer_determinants(const std::array<Vec3, 4>& c, const std::array<double, 4>& r);
CandidateVertex3 vertex3(const std::array<Vec3, 4>& c, const std::array<double, 4>& r);

/// Candidate vertex of every simplex, indexed like the simplices.
std::vector<CandidateVertex2> candidate_vertices(const Triangulation2& tri, std::span<const double> r);
std::vector<CandidateVertex3> candidate_vertices(const Triangulation3& tet, std::span<const double> r);

// r_max i: the smallest incident height, computed for every point at once.
std::vector<double> max_radii(const NeighborMap2& nm, std::span<const Vec2> pts);
std::vector<double> max_radii(const NeighborMap3& nm, std::span<const Vec3> pts);

/// Interval for point i: hi = r_max i and
/// lo = max(0, max_k [L(i, j(i,k)) - r_max j(i,k)]). Throws EmptyInterval
/// (indices {i, blocking neighbour}) when lo >= hi.
RadiusBounds radius_bounds2(int i, const NeighborMap2& nm, std::span<const Vec2> pts,
                            std::span<const double> rmax);

/// 3D interval: hi = r_max i from the tetrahedron heights,
/// lo = max(0, max over incident wall triangles (i, j_l, j_l+1) of
/// [h(i, j_l, j_l+1) - r_max j_l]).
RadiusBounds radius_bounds3(int i, const NeighborMap3& nm, std::span<const Vec3> pts,
                            std::span<const double> rmax);

std::vector<RadiusBounds> all_radius_bounds(const NeighborMap2& nm, std::span<const Vec2> pts,
                                            BoundsPolicy policy = BoundsPolicy::Strict);
std::vector<RadiusBounds> all_radius_bounds(const NeighborMap3& nm, std::span<const Vec3> pts,
                                            BoundsPolicy policy = BoundsPolicy::Strict);

/// Sum over simplices of w_s * power(Q_s, first corner)^2 with
/// w_s = 1 / (mean edge length of s)^4. Summed in fixed-size blocks in index
/// order, so the value is identical with or without `parallel`.
class RadiusObjective {
 public:
  explicit RadiusObjective(const Triangulation2& tri);
  explicit RadiusObjective(const Triangulation3& tet);

  double operator()(std::span<const double> r) const;
  double evaluate(std::span<const double> r, bool parallel) const;
  /// Largest per-simplex |power|, scale-normalized by w_s^(1/2).
  double max_residual(std::span<const double> r) const;
  std::size_t simplex_count() const { return weight_.size(); }

 private:
  double term(std::size_t s, std::span<const double> r) const;

  int dim_ = 2;
  std::vector<Vec3> points_;
  std::vector<std::array<int, 4>> simplices_;  // unused corner -1 in 2D
  std::vector<double> weight_;
};

double objective(std::span<const double> r, const Triangulation2& tri);
double objective(std::span<const double> r, const Triangulation3& tet);

enum class OverlapKind { Overlapping, NonOverlapping };

struct PairOverlap {
  int i = -1;
  int j = -1;
  double gap = 0.0;  // L(i,j) - (r_i + r_j)
  OverlapKind kind = OverlapKind::Overlapping;
};

/// Tangent circles (gap exactly 0) count as overlapping.
OverlapKind classify_pair(double distance, double ri, double rj);

/// One label per Delaunay edge, i < j, sorted.
std::vector<PairOverlap> classify_overlap(std::span<const double> r, const NeighborMap2& nm,
                                          std::span<const Vec2> pts);
std::vector<PairOverlap> classify_overlap(std::span<const double> r, const NeighborMap3& nm,
                                          std::span<const Vec3> pts);

struct SolveOptions {
  SolveMode mode = SolveMode::RadicalCenter;
  std::uint64_t seed = 1;
  BoundsPolicy bounds = BoundsPolicy::Strict;
  bool equal_radii = false;
  std::optional<double> equal_radius;  // default 0.5 * min r_max
  double init_fraction = 0.62;         // r0 = lo + f (hi - lo)
  std::optional<std::vector<double>> initial;
  opt::SoftSelectionParams search;
};

struct RadiusSolution {
  std::vector<double> r;
  SolveMode mode = SolveMode::RadicalCenter;
  std::vector<RadiusBounds> bounds;
  std::vector<int> relaxed;
  double objective = 0.0;
  double max_residual = 0.0;
  bool converged = true;
  bool equal_radii = false;
  long evaluations = 0;
  std::vector<double> trace;
};

RadiusSolution solve_radii(const Triangulation2& tri, const NeighborMap2& nm, const SolveOptions& opts);
RadiusSolution solve_radii(const Triangulation3& tet, const NeighborMap3& nm, const SolveOptions& opts);

}  // namespace cvmesh
