#pragma once

// Brute-force reference computations used only by the tests. Nothing here
// calls into the library's geometric routines, so the checks stay independent
// of the code paths they verify.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cvmesh/vec.hpp"

namespace oracle {

using cvmesh::Vec2;
using cvmesh::Vec3;

struct Rng {
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(engine() >> 11) * 0x1.0p-53);
  }
  std::mt19937_64 engine;
};

inline std::vector<Vec2> random_points2(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec2> p(n);
  for (auto& v : p) v = {rng.uniform(), rng.uniform()};
  return p;
}

inline std::vector<Vec3> random_points3(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec3> p(n);
  for (auto& v : p) v = {rng.uniform(), rng.uniform(), rng.uniform()};
  return p;
}

/// Gaussian elimination with partial pivoting on a dense n x n system.
inline std::optional<std::vector<double>> gauss_solve(std::vector<std::vector<double>> a,
                                                      std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

/// Circumcenter by solving |x - p_k|^2 = |x - p_0|^2 with Gaussian elimination.
inline Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  auto x = gauss_solve({{2 * (b.x - a.x), 2 * (b.y - a.y)}, {2 * (c.x - a.x), 2 * (c.y - a.y)}},
                       {b.x * b.x + b.y * b.y - a.x * a.x - a.y * a.y,
                        c.x * c.x + c.y * c.y - a.x * a.x - a.y * a.y});
  return {(*x)[0], (*x)[1]};
}

inline Vec3 circumcenter(Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
  auto row = [&](Vec3 p) {
    return std::vector<double>{2 * (p.x - a.x), 2 * (p.y - a.y), 2 * (p.z - a.z)};
  };
  auto rhs = [&](Vec3 p) { return cvmesh::norm2(p) - cvmesh::norm2(a); };
  auto x = gauss_solve({row(b), row(c), row(d)}, {rhs(b), rhs(c), rhs(d)});
  return {(*x)[0], (*x)[1], (*x)[2]};
}

/// Count of (simplex, point) pairs where the point lies strictly inside the
/// circumcircle shrunk by a relative margin.
inline int empty_circle_violations(const std::vector<Vec2>& pts,
                                   const std::vector<std::array<int, 3>>& tris,
                                   double rel = 1e-9) {
  int bad = 0;
  for (const auto& t : tris) {
    const Vec2 c = circumcenter(pts[t[0]], pts[t[1]], pts[t[2]]);
    const double r = cvmesh::norm(pts[t[0]] - c);
    for (int q = 0; q < static_cast<int>(pts.size()); ++q) {
      if (q == t[0] || q == t[1] || q == t[2]) continue;
      if (cvmesh::norm(pts[q] - c) < r * (1.0 - rel)) ++bad;
    }
  }
  return bad;
}

inline int empty_sphere_violations(const std::vector<Vec3>& pts,
                                   const std::vector<std::array<int, 4>>& tets,
                                   double rel = 1e-9) {
  int bad = 0;
  for (const auto& t : tets) {
    const Vec3 c = circumcenter(pts[t[0]], pts[t[1]], pts[t[2]], pts[t[3]]);
    const double r = cvmesh::norm(pts[t[0]] - c);
    for (int q = 0; q < static_cast<int>(pts.size()); ++q) {
      if (q == t[0] || q == t[1] || q == t[2] || q == t[3]) continue;
      if (cvmesh::norm(pts[q] - c) < r * (1.0 - rel)) ++bad;
    }
  }
  return bad;
}

/// Convex hull area by Andrew's monotone chain.
inline double hull_area(std::vector<Vec2> p) {
  std::sort(p.begin(), p.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  auto turn = [](Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  std::vector<Vec2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  double a = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Vec2 u = h[i], v = h[(i + 1) % h.size()];
    a += u.x * v.y - u.y * v.x;
  }
  return 0.5 * a;
}

/// Convex hull volume for points in general position: every triple whose
/// plane leaves all other points on one side is a hull facet.
inline double hull_volume(const std::vector<Vec3>& p) {
  const int n = static_cast<int>(p.size());
  Vec3 centroid{};
  for (const auto& v : p) centroid = centroid + (1.0 / n) * v;
  double vol = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        const Vec3 nrm = cvmesh::cross(p[b] - p[a], p[c] - p[a]);
        int pos = 0, neg = 0;
        for (int q = 0; q < n && !(pos && neg); ++q) {
          if (q == a || q == b || q == c) continue;
          const double s = cvmesh::dot(nrm, p[q] - p[a]);
          if (s > 0) ++pos;
          if (s < 0) ++neg;
        }
        if (pos && neg) continue;
        vol += std::abs(cvmesh::dot(nrm, p[a] - centroid)) / 6.0;
      }
  return vol;
}

/// Newton iteration on the two pairwise power-equality equations
/// |x-c1|^2 - r1^2 = |x-c2|^2 - r2^2 = |x-c3|^2 - r3^2.
inline Vec2 newton_radical_center(std::array<Vec2, 3> c, std::array<double, 3> r, Vec2 x0) {
  Vec2 x = x0;
  for (int it = 0; it < 50; ++it) {
    auto pw = [&](int l) { return cvmesh::norm2(x - c[l]) - r[l] * r[l]; };
    const double f1 = pw(0) - pw(1), f2 = pw(0) - pw(2);
    // d/dx (|x-c0|^2 - |x-cl|^2) = 2 (cl - c0)
    const double j11 = 2 * (c[1].x - c[0].x), j12 = 2 * (c[1].y - c[0].y);
    const double j21 = 2 * (c[2].x - c[0].x), j22 = 2 * (c[2].y - c[0].y);
    const double det = j11 * j22 - j12 * j21;
    const double dx = (f1 * j22 - f2 * j12) / det;
    const double dy = (j11 * f2 - j21 * f1) / det;
    x = {x.x - dx, x.y - dy};
    if (std::hypot(dx, dy) < 1e-16) break;
  }
  return x;
}

/// Brute-force cell vertices of {x : w.(x) <= 0 for all half-planes} where each
/// half-plane is (normal, offset) with normal . x <= offset. Vertices come from
/// intersecting every pair of boundary lines.
struct HalfPlane {
  Vec2 n;
  double d;
};

inline std::vector<Vec2> halfplane_vertices(const std::vector<HalfPlane>& hp, double tol) {
  std::vector<Vec2> out;
  const int m = static_cast<int>(hp.size());
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      const double det = hp[a].n.x * hp[b].n.y - hp[a].n.y * hp[b].n.x;
      if (std::abs(det) < 1e-14) continue;
      const Vec2 x{(hp[a].d * hp[b].n.y - hp[a].n.y * hp[b].d) / det,
                   (hp[a].n.x * hp[b].d - hp[a].d * hp[b].n.x) / det};
      bool ok = true;
      for (int c = 0; c < m && ok; ++c) {
        if (cvmesh::dot(hp[c].n, x) > hp[c].d + tol) ok = false;
      }
      if (ok) out.push_back(x);
    }
  return out;
}

struct HalfSpace {
  Vec3 n;
  double d;
};

inline std::vector<Vec3> halfspace_vertices(const std::vector<HalfSpace>& hs, double tol) {
  std::vector<Vec3> out;
  const int m = static_cast<int>(hs.size());
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = b + 1; c < m; ++c) {
        auto x = gauss_solve({{hs[a].n.x, hs[a].n.y, hs[a].n.z},
                              {hs[b].n.x, hs[b].n.y, hs[b].n.z},
                              {hs[c].n.x, hs[c].n.y, hs[c].n.z}},
                             {hs[a].d, hs[b].d, hs[c].d});
        if (!x) continue;
        const Vec3 v{(*x)[0], (*x)[1], (*x)[2]};
        if (!cvmesh::is_finite(v)) continue;
        const double det = cvmesh::dot(hs[a].n, cvmesh::cross(hs[b].n, hs[c].n));
        if (std::abs(det) < 1e-12) continue;
        bool ok = true;
        for (int e = 0; e < m && ok; ++e) {
          if (cvmesh::dot(hs[e].n, v) > hs[e].d + tol) ok = false;
        }
        if (ok) out.push_back(v);
      }
  return out;
}

/// Voronoi cell of site i clipped to the box [lo, hi], as a vertex set.
inline std::vector<Vec2> voronoi_cell(const std::vector<Vec2>& pts, int i, Vec2 lo, Vec2 hi,
                                      double tol) {
  std::vector<HalfPlane> hp{{{1, 0}, hi.x}, {{-1, 0}, -lo.x}, {{0, 1}, hi.y}, {{0, -1}, -lo.y}};
  for (int j = 0; j < static_cast<int>(pts.size()); ++j) {
    if (j == i) continue;
    // |x-pi|^2 <= |x-pj|^2  <=>  2 (pj - pi) . x <= |pj|^2 - |pi|^2
    hp.push_back({2.0 * (pts[j] - pts[i]), cvmesh::norm2(pts[j]) - cvmesh::norm2(pts[i])});
  }
  return halfplane_vertices(hp, tol);
}

inline std::vector<Vec3> voronoi_cell(const std::vector<Vec3>& pts, int i, Vec3 lo, Vec3 hi,
                                      double tol) {
  std::vector<HalfSpace> hs{{{1, 0, 0}, hi.x},  {{-1, 0, 0}, -lo.x}, {{0, 1, 0}, hi.y},
                            {{0, -1, 0}, -lo.y}, {{0, 0, 1}, hi.z},  {{0, 0, -1}, -lo.z}};
  for (int j = 0; j < static_cast<int>(pts.size()); ++j) {
    if (j == i) continue;
    hs.push_back({2.0 * (pts[j] - pts[i]), cvmesh::norm2(pts[j]) - cvmesh::norm2(pts[i])});
  }
  return halfspace_vertices(hs, tol);
}

/// Largest distance from any point of one set to the nearest point of the other.
template <typename V>
double hausdorff(const std::vector<V>& a, const std::vector<V>& b) {
  auto one_side = [](const std::vector<V>& p, const std::vector<V>& q) {
    double worst = 0.0;
    for (const auto& u : p) {
      double best = INFINITY;
      for (const auto& v : q) best = std::min(best, cvmesh::norm(u - v));
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (a.empty() || b.empty()) return INFINITY;
  return std::max(one_side(a, b), one_side(b, a));
}

}  // namespace oracle
