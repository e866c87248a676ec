#pragma once

#include <array>
#include <cmath>
#include <type_traits>

namespace cvmesh {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// z-component of the 3D cross product.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
constexpr double norm2(Vec2 a) { return dot(a, a); }
constexpr double norm2(Vec3 a) { return dot(a, a); }

inline Vec2 normalized(Vec2 a) { return (1.0 / norm(a)) * a; }
inline Vec3 normalized(Vec3 a) { return (1.0 / norm(a)) * a; }

// Rotations by +-90 degrees.
constexpr Vec2 perp_ccw(Vec2 a) { return {-a.y, a.x}; }
constexpr Vec2 perp_cw(Vec2 a) { return {a.y, -a.x}; }

constexpr Vec3 lift(Vec2 a) { return {a.x, a.y, 0.0}; }
constexpr Vec2 drop(Vec3 a) { return {a.x, a.y}; }

inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }
inline bool is_finite(Vec3 a) { return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z); }

// Component access for dimension-generic code.
template <typename V>
constexpr int dim_of() {
  if constexpr (std::is_same_v<V, Vec2>) return 2;
  else return 3;
}

}  // namespace cvmesh
