#pragma once

#include <optional>

#include "cvmesh/vec.hpp"

// Closed-form geometric primitives used by the radius bounds: distances,
// triangle classification and the neighbour heights that cap each radius.
namespace cvmesh::geom {

inline constexpr double kEpsRight = 1e-9;  // on angle cosines
inline constexpr double kEpsArea = 1e-12;  // relative to longest edge^2
inline constexpr double kEpsVolume = 1e-12;  // relative to longest edge^3
inline constexpr double kEpsLength = 1e-12;  // relative to local edge scale

double distance2(Vec2 p, Vec2 q);
double distance3(Vec3 p, Vec3 q);

enum class TriangleKind { Acute, Right, Obtuse };

struct TriangleShape {
  TriangleKind kind = TriangleKind::Acute;
  // 0, 1 or 2: the corner carrying the right/obtuse angle.
  std::optional<int> vertex;
};

TriangleShape classify_triangle(Vec2 p1, Vec2 p2, Vec2 p3);
TriangleShape classify_triangle(Vec3 p1, Vec3 p2, Vec3 p3);

double point_line_distance2(Vec2 p, Vec2 a, Vec2 b);
double point_line_distance3(Vec3 p, Vec3 a, Vec3 b);

enum class HeightSource { PerpendicularFoot, EdgeLengthFallback };

struct HeightValue {
  double value = 0.0;
  HeightSource source = HeightSource::PerpendicularFoot;
};

/// Height of triangle (i, jk, jk1) seen from i. Acute triangles use the
/// perpendicular distance from i to the opposite side; right and obtuse
/// triangles fall back to the shorter of the two edges leaving i.
HeightValue neighbor_height2(Vec2 i, Vec2 jk, Vec2 jk1);

/// Same rule for a wall triangle of a tetrahedron, measured in space.
HeightValue neighbor_height3(Vec3 i, Vec3 jk, Vec3 jk1);

/// Height of tetrahedron (i, j1, j2, j3) from apex i.
///
/// When the perpendicular foot of i on the plane (j1, j2, j3) falls inside
/// the base triangle (boundary included) the plane distance is returned.
/// Otherwise the result is the smallest wall-triangle height
/// neighbor_height3(i, j_l, j_{l+1}), tagged EdgeLengthFallback.
HeightValue tetra_height(Vec3 i, Vec3 j1, Vec3 j2, Vec3 j3);

// Signed predicates (plain floating point).
double orient2(Vec2 a, Vec2 b, Vec2 c);            // > 0 for counter-clockwise
double orient3(Vec3 a, Vec3 b, Vec3 c, Vec3 d);    // det[b-a, c-a, d-a]
double triangle_area(Vec2 a, Vec2 b, Vec2 c);      // unsigned
double triangle_area(Vec3 a, Vec3 b, Vec3 c);
double tetra_volume(Vec3 a, Vec3 b, Vec3 c, Vec3 d);  // unsigned

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c);
Vec3 circumcenter(Vec3 a, Vec3 b, Vec3 c, Vec3 d);

}  // namespace cvmesh::geom
