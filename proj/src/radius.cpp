#include "cvmesh/radius.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <type_traits>

#include "cvmesh/error.hpp"
#include "cvmesh/geometry.hpp"
#include "cvmesh/parallel.hpp"

namespace cvmesh {

namespace {

constexpr std::size_t kBlock = 256;

// Radical center in coordinates relative to c1; no degeneracy check.
Vec2 radical_center2(Vec2 c1, Vec2 c2, Vec2 c3, double r1, double r2, double r3) {
  const double a2 = c2.x - c1.x, b2 = c2.y - c1.y;
  const double a3 = c3.x - c1.x, b3 = c3.y - c1.y;
  const double s2 = a2 * a2 + b2 * b2, s3 = a3 * a3 + b3 * b3;
  const double q1 = r1 * r1, q2 = r2 * r2, q3 = r3 * r3;
  // With a1 = b1 = 0 the denominator reduces to a3 b2 - a2 b3.
  const double den = 2.0 * (a3 * b2 - a2 * b3);
  const double x = ((b2 - b3) * q1 + b3 * q2 - b2 * q3 - s2 * b3 + s3 * b2) / den;
  const double y = ((a3 - a2) * q1 - a3 * q2 + a2 * q3 + s2 * a3 - s3 * a2) / den;
  return {c1.x + x, c1.y + y};
}

Vec3 radical_center3(const CramerDeterminants& d, Vec3 c1) {
  return {c1.x + d.wx / d.w, c1.y + d.wy / d.w, c1.z + d.wz / d.w};
}

double det3(Vec3 r0, Vec3 r1, Vec3 r2) { return dot(r0, cross(r1, r2)); }

double longest_edge2(Vec2 a, Vec2 b, Vec2 c) {
  return std::max({norm(b - a), norm(c - b), norm(a - c)});
}

double longest_edge3(const std::array<Vec3, 4>& c) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) m = std::max(m, norm(c[b] - c[a]));
  return m;
}

}  // namespace

double power(Vec2 q, Vec2 center, double radius) { return norm2(q - center) - radius * radius; }
double power(Vec3 q, Vec3 center, double radius) { return norm2(q - center) - radius * radius; }

CandidateVertex2 vertex2(Vec2 c1, Vec2 c2, Vec2 c3, double r1, double r2, double r3) {
  const double longest = longest_edge2(c1, c2, c3);
  if (!(geom::triangle_area(c1, c2, c3) > geom::kEpsArea * longest * longest))
    throw Error(ErrorKind::DegenerateTriangle, "radical center of collinear centers");
  CandidateVertex2 v;
  v.position = radical_center2(c1, c2, c3, r1, r2, r3);
  v.residual = std::abs(power(v.position, c1, r1));
  return v;
}

CramerDeterminants cramer_determinants(const std::array<Vec3, 4>& c, const std::array<double, 4>& r) {
  // Rows 2 (c1 - cl) with c1 moved to the origin; right-hand side
  // delta = |c1|^2 - |cl|^2 + rl^2 - r1^2.
  Vec3 row[3];
  double delta[3];
  for (int l = 1; l < 4; ++l) {
    const Vec3 d = c[l] - c[0];
    row[l - 1] = Vec3{-2.0 * d.x, -2.0 * d.y, -2.0 * d.z};
    delta[l - 1] = r[l] * r[l] - r[0] * r[0] - norm2(d);
  }
  CramerDeterminants out;
  out.delta1 = delta[0];
  out.delta2 = delta[1];
  out.delta3 = delta[2];
  // Determinants of the column-replaced matrices.
  const Vec3 col_x{row[0].x, row[1].x, row[2].x}, col_y{row[0].y, row[1].y, row[2].y},
      col_z{row[0].z, row[1].z, row[2].z}, rhs{delta[0], delta[1], delta[2]};
  out.w = det3(col_x, col_y, col_z);
  out.wx = det3(rhs, col_y, col_z);
  out.wy = det3(col_x, rhs, col_z);
  out.wz = det3(col_x, col_y, rhs);
  return out;
}

CandidateVertex3 vertex3(const std::array<Vec3, 4>& c, const std::array<double, 4>& r) {
  const double longest = longest_edge3(c);
  if (!(geom::tetra_volume(c[0], c[1], c[2], c[3]) > geom::kEpsVolume * longest * longest * longest))
    throw Error(ErrorKind::DegenerateTetrahedron, "radical center of coplanar centers");
  CandidateVertex3 v;
  v.position = radical_center3(cramer_determinants(c, r), c[0]);
  v.residual = std::abs(power(v.position, c[0], r[0]));
  return v;
}

std::vector<CandidateVertex2> candidate_vertices(const Triangulation2& tri, std::span<const double> r) {
  std::vector<CandidateVertex2> out(tri.triangles.size());
  for (std::size_t s = 0; s < out.size(); ++s) {
    const auto& t = tri.triangles[s];
    try {
      out[s] = vertex2(tri.points[t[0]], tri.points[t[1]], tri.points[t[2]], r[t[0]], r[t[1]], r[t[2]]);
    } catch (const Error& e) {
      throw Error(e.kind(), "triangle " + std::to_string(s), {t[0], t[1], t[2]});
    }
    out[s].simplex = static_cast<int>(s);
  }
  return out;
}

std::vector<CandidateVertex3> candidate_vertices(const Triangulation3& tet, std::span<const double> r) {
  std::vector<CandidateVertex3> out(tet.tetrahedra.size());
  for (std::size_t s = 0; s < out.size(); ++s) {
    const auto& t = tet.tetrahedra[s];
    try {
      out[s] = vertex3({tet.points[t[0]], tet.points[t[1]], tet.points[t[2]], tet.points[t[3]]},
                       {r[t[0]], r[t[1]], r[t[2]], r[t[3]]});
    } catch (const Error& e) {
      throw Error(e.kind(), "tetrahedron " + std::to_string(s), {t[0], t[1], t[2], t[3]});
    }
    out[s].simplex = static_cast<int>(s);
  }
  return out;
}

std::vector<double> max_radii(const NeighborMap2& nm, std::span<const Vec2> pts) {
  std::vector<double> rmax(pts.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& ring = nm.ring[i];
    const int m = nm.size(static_cast<int>(i));
    for (std::size_t k = 0; k < nm.fan[i].size(); ++k) {
      const double h = geom::neighbor_height2(pts[i], pts[ring[k]], pts[ring[(k + 1) % m]]).value;
      rmax[i] = std::min(rmax[i], h);
    }
  }
  return rmax;
}

std::vector<double> max_radii(const NeighborMap3& nm, std::span<const Vec3> pts) {
  std::vector<double> rmax(pts.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (const auto& s : nm.stars[i]) {
      const double h = geom::tetra_height(pts[i], pts[s.j[0]], pts[s.j[1]], pts[s.j[2]]).value;
      rmax[i] = std::min(rmax[i], h);
    }
  }
  return rmax;
}

namespace {

void require_interval(int i, const RadiusBounds& b) {
  if (b.empty()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "point %d: lower bound %.17g >= upper bound %.17g", i, b.lo, b.hi);
    std::vector<int> idx{i};
    if (b.blocking >= 0) idx.push_back(b.blocking);
    throw Error(ErrorKind::EmptyInterval, buf, std::move(idx));
  }
}

template <typename NM, typename V, typename F>
std::vector<RadiusBounds> collect_bounds(const NM& nm, std::span<const V> pts, BoundsPolicy policy,
                                         F&& bounds_of) {
  const auto rmax = max_radii(nm, pts);
  std::vector<RadiusBounds> out(pts.size());
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    try {
      out[i] = bounds_of(i, rmax);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyInterval || policy == BoundsPolicy::Strict) throw;
      out[i] = RadiusBounds{0.0, rmax[i], e.indices().size() > 1 ? e.indices()[1] : -1, true};
    }
  }
  return out;
}

}  // namespace

RadiusBounds radius_bounds2(int i, const NeighborMap2& nm, std::span<const Vec2> pts,
                            std::span<const double> rmax) {
  RadiusBounds b;
  b.hi = rmax[i];
  for (int j : nm.ring[i]) {
    const double lo = geom::distance2(pts[i], pts[j]) - rmax[j];
    if (lo > b.lo) {
      b.lo = lo;
      b.blocking = j;
    }
  }
  require_interval(i, b);
  return b;
}

RadiusBounds radius_bounds3(int i, const NeighborMap3& nm, std::span<const Vec3> pts,
                            std::span<const double> rmax) {
  RadiusBounds b;
  b.hi = rmax[i];
  for (const auto& s : nm.stars[i]) {
    for (int l = 0; l < 3; ++l) {
      const int j = s.j[l], j1 = s.j[(l + 1) % 3];
      const double lo = geom::neighbor_height3(pts[i], pts[j], pts[j1]).value - rmax[j];
      if (lo > b.lo) {
        b.lo = lo;
        b.blocking = j;
      }
    }
  }
  require_interval(i, b);
  return b;
}

std::vector<RadiusBounds> all_radius_bounds(const NeighborMap2& nm, std::span<const Vec2> pts,
                                            BoundsPolicy policy) {
  return collect_bounds(nm, pts, policy,
                        [&](int i, const std::vector<double>& rmax) { return radius_bounds2(i, nm, pts, rmax); });
}

std::vector<RadiusBounds> all_radius_bounds(const NeighborMap3& nm, std::span<const Vec3> pts,
                                            BoundsPolicy policy) {
  return collect_bounds(nm, pts, policy,
                        [&](int i, const std::vector<double>& rmax) { return radius_bounds3(i, nm, pts, rmax); });
}

RadiusObjective::RadiusObjective(const Triangulation2& tri) : dim_(2) {
  for (const auto& p : tri.points) points_.push_back(lift(p));
  for (const auto& t : tri.triangles) {
    simplices_.push_back({t[0], t[1], t[2], -1});
    const Vec2 a = tri.points[t[0]], b = tri.points[t[1]], c = tri.points[t[2]];
    const double mean = (norm(b - a) + norm(c - b) + norm(a - c)) / 3.0;
    weight_.push_back(1.0 / (mean * mean * mean * mean));
  }
}

RadiusObjective::RadiusObjective(const Triangulation3& tet) : dim_(3), points_(tet.points) {
  for (const auto& t : tet.tetrahedra) {
    simplices_.push_back(t);
    double sum = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) sum += norm(tet.points[t[b]] - tet.points[t[a]]);
    const double mean = sum / 6.0;
    weight_.push_back(1.0 / (mean * mean * mean * mean));
  }
}

double RadiusObjective::term(std::size_t s, std::span<const double> r) const {
  const auto& t = simplices_[s];
  double p;
  if (dim_ == 2) {
    const Vec2 c1 = drop(points_[t[0]]);
    const Vec2 q = radical_center2(c1, drop(points_[t[1]]), drop(points_[t[2]]), r[t[0]], r[t[1]], r[t[2]]);
    p = power(q, c1, r[t[0]]);
  } else {
    const std::array<Vec3, 4> c{points_[t[0]], points_[t[1]], points_[t[2]], points_[t[3]]};
    const Vec3 q = radical_center3(cramer_determinants(c, {r[t[0]], r[t[1]], r[t[2]], r[t[3]]}), c[0]);
    p = power(q, c[0], r[t[0]]);
  }
  return weight_[s] * p * p;
}

double RadiusObjective::evaluate(std::span<const double> r, bool parallel) const {
  const std::size_t n = weight_.size();
  const int blocks = static_cast<int>((n + kBlock - 1) / kBlock);
  std::vector<double> partial(blocks, 0.0);
  auto run = [&](int b) {
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    double sum = 0.0;
    for (std::size_t s = b * kBlock; s < end; ++s) sum += term(s, r);
    partial[b] = sum;
  };
  if (parallel) {
    parallel_for(blocks, run);
  } else {
    for (int b = 0; b < blocks; ++b) run(b);
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

double RadiusObjective::operator()(std::span<const double> r) const { return evaluate(r, false); }

double RadiusObjective::max_residual(std::span<const double> r) const {
  double worst = 0.0;
  for (std::size_t s = 0; s < weight_.size(); ++s) worst = std::max(worst, std::sqrt(term(s, r)));
  return worst;
}

double objective(std::span<const double> r, const Triangulation2& tri) {
  candidate_vertices(tri, r);  // reports degenerate simplices
  return RadiusObjective(tri)(r);
}

double objective(std::span<const double> r, const Triangulation3& tet) {
  candidate_vertices(tet, r);
  return RadiusObjective(tet)(r);
}

OverlapKind classify_pair(double distance, double ri, double rj) {
  return distance - (ri + rj) <= 0.0 ? OverlapKind::Overlapping : OverlapKind::NonOverlapping;
}

namespace {

template <typename V>
std::vector<PairOverlap> label_pairs(std::span<const double> r, std::span<const V> pts,
                                     const std::vector<std::vector<int>>& adj) {
  std::vector<PairOverlap> out;
  for (int i = 0; i < static_cast<int>(adj.size()); ++i) {
    std::vector<int> js = adj[i];
    std::sort(js.begin(), js.end());
    js.erase(std::unique(js.begin(), js.end()), js.end());
    for (int j : js) {
      if (j <= i) continue;
      const double len = norm(pts[j] - pts[i]);
      out.push_back({i, j, len - (r[i] + r[j]), classify_pair(len, r[i], r[j])});
    }
  }
  return out;
}

}  // namespace

std::vector<PairOverlap> classify_overlap(std::span<const double> r, const NeighborMap2& nm,
                                          std::span<const Vec2> pts) {
  return label_pairs(r, pts, nm.ring);
}

std::vector<PairOverlap> classify_overlap(std::span<const double> r, const NeighborMap3& nm,
                                          std::span<const Vec3> pts) {
  return label_pairs(r, pts, nm.neighbors);
}

namespace {

template <typename Tri, typename NM>
RadiusSolution solve(const Tri& tri, const NM& nm, const SolveOptions& opts) {
  using V = std::decay_t<decltype(tri.points[0])>;
  const std::span<const V> pts(tri.points);
  const std::size_t n = pts.size();

  RadiusSolution sol;
  sol.mode = opts.mode;
  sol.equal_radii = opts.equal_radii;
  // The override only reads the upper limits, which do not depend on the policy.
  sol.bounds = all_radius_bounds(nm, pts, opts.equal_radii ? BoundsPolicy::Relaxed : opts.bounds);
  for (std::size_t i = 0; i < n; ++i)
    if (sol.bounds[i].relaxed) sol.relaxed.push_back(static_cast<int>(i));

  const RadiusObjective f(tri);
  if (opts.equal_radii) {
    double r = 0.0;
    if (opts.equal_radius) {
      r = *opts.equal_radius;
    } else {
      r = std::numeric_limits<double>::infinity();
      for (const auto& b : sol.bounds) r = std::min(r, b.hi);
      r *= 0.5;
    }
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidInput, "equal radius must be positive");
    sol.r.assign(n, r);
  } else if (opts.mode == SolveMode::RadicalCenter) {
    sol.r.resize(n);
    for (std::size_t i = 0; i < n; ++i) sol.r[i] = 0.5 * (sol.bounds[i].lo + sol.bounds[i].hi);
  } else {
    opt::Box box;
    for (const auto& b : sol.bounds) {
      box.lo.push_back(b.lo);
      box.hi.push_back(b.hi);
    }
    std::vector<double> start(n);
    if (opts.initial) {
      if (opts.initial->size() != n)
        throw Error(ErrorKind::DimensionMismatch, "initial radius vector has the wrong length");
      for (std::size_t i = 0; i < n; ++i) {
        // Pull the guess strictly inside its interval.
        const double pad = 1e-9 * (box.hi[i] - box.lo[i]);
        start[i] = std::clamp((*opts.initial)[i], box.lo[i] + pad, box.hi[i] - pad);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        start[i] = box.lo[i] + opts.init_fraction * (box.hi[i] - box.lo[i]);
    }
    const auto res = opt::soft_selection_minimize(f, box, opts.seed, opts.search, start);
    sol.r = res.x;
    sol.converged = res.converged;
    sol.evaluations = res.evaluations;
    sol.trace = res.trace;
  }
  sol.objective = f(sol.r);
  sol.max_residual = f.max_residual(sol.r);
  return sol;
}

}  // namespace

RadiusSolution solve_radii(const Triangulation2& tri, const NeighborMap2& nm, const SolveOptions& opts) {
  return solve(tri, nm, opts);
}

RadiusSolution solve_radii(const Triangulation3& tet, const NeighborMap3& nm, const SolveOptions& opts) {
  return solve(tet, nm, opts);
}

}  // namespace cvmesh
