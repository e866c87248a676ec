#pragma once

#include <array>
#include <span>
#include <vector>

#include "cvmesh/vec.hpp"

namespace cvmesh {

/// Delaunay triangulation of a planar point set. Triangles are stored
/// counter-clockwise; adjacency[t][k] is the triangle across the edge
/// opposite corner k, or -1 on the convex hull.
struct Triangulation2 {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 3>> adjacency;
  std::vector<bool> on_hull;
};

/// Delaunay tetrahedralization. Every tetrahedron has orient3 > 0;
/// adjacency[t][k] is the tetrahedron across the face opposite corner k.
struct Triangulation3 {
  std::vector<Vec3> points;
  std::vector<std::array<int, 4>> tetrahedra;
  std::vector<std::array<int, 4>> adjacency;
  std::vector<bool> on_hull;
};

// Incremental Bowyer-Watson, insertion in input order. Near-cocircular
// (cospherical) points are treated as outside the circumcircle, so ties go
// to the configuration built from the earlier-inserted points.
Triangulation2 triangulate2(std::span<const Vec2> points);
Triangulation3 tetrahedralize3(std::span<const Vec3> points);

/// Cyclic neighbour rings j(i, k), k = 0..M(i)-1, in counter-clockwise order.
/// fan[i][k] is the triangle (i, ring[i][k], ring[i][k+1]). Hull points have
/// open fans: M(i) = fan size + 1 and there is no wraparound triangle.
struct NeighborMap2 {
  std::vector<std::vector<int>> ring;
  std::vector<std::vector<int>> fan;
  std::vector<bool> boundary;

  int size(int i) const { return static_cast<int>(ring[i].size()); }
};

/// Incident tetrahedra of every point: (i, j[0], j[1], j[2]) is positively
/// oriented. N(i) = stars[i].size().
struct NeighborMap3 {
  struct Star {
    int tet = -1;
    std::array<int, 3> j{};
  };
  std::vector<std::vector<Star>> stars;
  std::vector<std::vector<int>> neighbors;  // sorted, unique
  std::vector<bool> boundary;

  int size(int i) const { return static_cast<int>(stars[i].size()); }
};

NeighborMap2 neighbor_map(const Triangulation2& tri);
NeighborMap3 neighbor_map(const Triangulation3& tet);

}  // namespace cvmesh
