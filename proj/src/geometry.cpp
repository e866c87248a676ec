#include "cvmesh/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cvmesh/error.hpp"

namespace cvmesh::geom {

double distance2(Vec2 p, Vec2 q) { return std::hypot(p.x - q.x, p.y - q.y); }

double distance3(Vec3 p, Vec3 q) { return norm(p - q); }

double orient2(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

double orient3(Vec3 a, Vec3 b, Vec3 c, Vec3 d) { return dot(cross(b - a, c - a), d - a); }

double triangle_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * std::abs(orient2(a, b, c)); }

double triangle_area(Vec3 a, Vec3 b, Vec3 c) { return 0.5 * norm(cross(b - a, c - a)); }

double tetra_volume(Vec3 a, Vec3 b, Vec3 c, Vec3 d) { return std::abs(orient3(a, b, c, d)) / 6.0; }

namespace {

template <typename V>
TriangleShape classify_impl(V p1, V p2, V p3) {
  const std::array<V, 3> v{p1, p2, p3};
  const double longest =
      std::max({norm2(p2 - p1), norm2(p3 - p2), norm2(p1 - p3)});
  if (!(triangle_area(p1, p2, p3) > kEpsArea * longest)) {
    throw Error(ErrorKind::DegenerateTriangle, "collinear triangle corners");
  }

  std::array<double, 3> cosine{};
  for (int k = 0; k < 3; ++k) {
    const V u = v[(k + 1) % 3] - v[k];
    const V w = v[(k + 2) % 3] - v[k];
    cosine[k] = dot(u, w) / (norm(u) * norm(w));
  }
  for (int k = 0; k < 3; ++k) {
    if (std::abs(cosine[k]) <= kEpsRight) return {TriangleKind::Right, k};
  }
  for (int k = 0; k < 3; ++k) {
    if (cosine[k] < 0.0) return {TriangleKind::Obtuse, k};
  }
  return {TriangleKind::Acute, std::nullopt};
}

}  // namespace

TriangleShape classify_triangle(Vec2 p1, Vec2 p2, Vec2 p3) { return classify_impl(p1, p2, p3); }

TriangleShape classify_triangle(Vec3 p1, Vec3 p2, Vec3 p3) { return classify_impl(p1, p2, p3); }

double point_line_distance2(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len = norm(d);
  const double scale = std::max(norm(p - a), norm(p - b));
  if (!(len > kEpsLength * scale) || len == 0.0) {
    throw Error(ErrorKind::DegenerateSegment, "line through coincident points");
  }
  return std::abs(cross(d, p - a)) / len;
}

double point_line_distance3(Vec3 p, Vec3 a, Vec3 b) {
  // |AA x BB| / |base| with AA = p - a and base = b - a.
  const Vec3 d = b - a;
  const double len = norm(d);
  const double scale = std::max(norm(p - a), norm(p - b));
  if (!(len > kEpsLength * scale) || len == 0.0) {
    throw Error(ErrorKind::DegenerateSegment, "line through coincident points");
  }
  return norm(cross(p - a, d)) / len;
}

HeightValue neighbor_height2(Vec2 i, Vec2 jk, Vec2 jk1) {
  const TriangleShape shape = classify_triangle(i, jk, jk1);
  if (shape.kind == TriangleKind::Acute) {
    return {point_line_distance2(i, jk, jk1), HeightSource::PerpendicularFoot};
  }
  return {std::min(distance2(i, jk), distance2(i, jk1)), HeightSource::EdgeLengthFallback};
}

HeightValue neighbor_height3(Vec3 i, Vec3 jk, Vec3 jk1) {
  const TriangleShape shape = classify_triangle(i, jk, jk1);
  if (shape.kind == TriangleKind::Acute) {
    return {point_line_distance3(i, jk, jk1), HeightSource::PerpendicularFoot};
  }
  return {std::min(distance3(i, jk), distance3(i, jk1)), HeightSource::EdgeLengthFallback};
}

HeightValue tetra_height(Vec3 i, Vec3 j1, Vec3 j2, Vec3 j3) {
  const double longest = std::max({norm(j1 - i), norm(j2 - i), norm(j3 - i), norm(j2 - j1),
                                   norm(j3 - j1), norm(j3 - j2)});
  if (!(tetra_volume(i, j1, j2, j3) > kEpsVolume * longest * longest * longest)) {
    throw Error(ErrorKind::DegenerateTetrahedron, "coplanar tetrahedron corners");
  }

  // Plane A x + B y + C z + D = 0 through the base.
  const double d21 = j2.x - j1.x, m21 = j2.y - j1.y, n21 = j2.z - j1.z;
  const double d31 = j3.x - j1.x, m31 = j3.y - j1.y, n31 = j3.z - j1.z;
  const double A = m21 * n31 - m31 * n21;
  const double B = d31 * n21 - d21 * n31;
  const double C = d21 * m31 - d31 * m21;
  const double D = -A * j1.x - B * j1.y - C * j1.z;
  const Vec3 normal{A, B, C};
  const double nn = norm2(normal);

  const double signed_dist = (A * i.x + B * i.y + C * i.z + D) / std::sqrt(nn);
  const Vec3 foot = i - (signed_dist / std::sqrt(nn)) * normal;

  // Barycentric sign test; the boundary counts as inside.
  const std::array<Vec3, 3> base{j1, j2, j3};
  bool inside = true;
  for (int k = 0; k < 3; ++k) {
    const double s = dot(cross(base[(k + 1) % 3] - base[k], foot - base[k]), normal);
    if (s < -1e-12 * nn) inside = false;
  }
  if (inside) return {std::abs(signed_dist), HeightSource::PerpendicularFoot};

  double best = neighbor_height3(i, j1, j2).value;
  best = std::min(best, neighbor_height3(i, j2, j3).value);
  best = std::min(best, neighbor_height3(i, j3, j1).value);
  return {best, HeightSource::EdgeLengthFallback};
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 u = b - a, v = c - a;
  const double d = 2.0 * cross(u, v);
  const double uu = norm2(u), vv = norm2(v);
  return a + Vec2{(v.y * uu - u.y * vv) / d, (u.x * vv - v.x * uu) / d};
}

Vec3 circumcenter(Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
  const Vec3 u = b - a, v = c - a, w = d - a;
  const double det = 2.0 * dot(u, cross(v, w));
  const Vec3 num = norm2(u) * cross(v, w) + norm2(v) * cross(w, u) + norm2(w) * cross(u, v);
  return a + (1.0 / det) * num;
}

}  // namespace cvmesh::geom
