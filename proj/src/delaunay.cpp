#include "cvmesh/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "cvmesh/error.hpp"
#include "cvmesh/geometry.hpp"

namespace cvmesh {

namespace {

constexpr int kGhost = -1;
constexpr double kEpsPredicate = 1e-10;  // on scale-normalized determinants

double max_abs(Vec2 v) { return std::max(std::abs(v.x), std::abs(v.y)); }
double max_abs(Vec3 v) { return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)}); }

// Orientation of a (D+1)-tuple divided by (local scale)^D.
double orient_normalized(const std::array<Vec2, 3>& p) {
  const double scale = std::max(max_abs(p[1] - p[0]), max_abs(p[2] - p[0]));
  if (scale == 0.0) return 0.0;
  return geom::orient2(p[0], p[1], p[2]) / (scale * scale);
}

double orient_normalized(const std::array<Vec3, 4>& p) {
  const double scale =
      std::max({max_abs(p[1] - p[0]), max_abs(p[2] - p[0]), max_abs(p[3] - p[0])});
  if (scale == 0.0) return 0.0;
  return geom::orient3(p[0], p[1], p[2], p[3]) / (scale * scale * scale);
}

// Lifted in-circle / in-sphere determinant, normalized by (local scale)^(D+2)
// and signed so that > 0 means q is inside the circumsphere of a positively
// oriented simplex.
double insphere_normalized(const std::array<Vec2, 3>& p, Vec2 q) {
  const Vec2 a = p[0] - q, b = p[1] - q, c = p[2] - q;
  const double scale = std::max({max_abs(a), max_abs(b), max_abs(c)});
  if (scale == 0.0) return 0.0;
  const double s = 1.0 / scale;
  const Vec2 an = s * a, bn = s * b, cn = s * c;
  const double al = norm2(an), bl = norm2(bn), cl = norm2(cn);
  return an.x * (bn.y * cl - bl * cn.y) - an.y * (bn.x * cl - bl * cn.x) +
         al * (bn.x * cn.y - bn.y * cn.x);
}

double insphere_normalized(const std::array<Vec3, 4>& p, Vec3 q) {
  std::array<Vec3, 4> r{};
  double scale = 0.0;
  for (int k = 0; k < 4; ++k) {
    r[k] = p[k] - q;
    scale = std::max(scale, max_abs(r[k]));
  }
  if (scale == 0.0) return 0.0;
  std::array<std::array<double, 4>, 4> m{};
  for (int k = 0; k < 4; ++k) {
    const Vec3 v = (1.0 / scale) * r[k];
    m[k] = {v.x, v.y, v.z, norm2(v)};
  }
  auto det3 = [&](int c0, int c1, int c2, int r0, int r1, int r2) {
    return m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) -
           m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0]) +
           m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0]);
  };
  // Laplace expansion along the lifted column.
  const double det = -m[0][3] * det3(0, 1, 2, 1, 2, 3) + m[1][3] * det3(0, 1, 2, 0, 2, 3) -
                     m[2][3] * det3(0, 1, 2, 0, 1, 3) + m[3][3] * det3(0, 1, 2, 0, 1, 2);
  // For positive orient3 the lifted determinant is negative inside.
  return -det;
}

template <typename V>
struct DimTraits;

template <>
struct DimTraits<Vec2> {
  static constexpr int D = 2;
  static constexpr ErrorKind flat = ErrorKind::AllCollinear;
  static constexpr const char* flat_what = "all points are collinear";
};

template <>
struct DimTraits<Vec3> {
  static constexpr int D = 3;
  static constexpr ErrorKind flat = ErrorKind::AllCoplanar;
  static constexpr const char* flat_what = "all points are coplanar";
};

template <typename V>
class BowyerWatson {
 public:
  static constexpr int D = DimTraits<V>::D;
  static constexpr int K = D + 1;
  using Index = std::array<int, K>;

  explicit BowyerWatson(std::span<const V> pts) : pts_(pts.begin(), pts.end()) {}

  void run() {
    check_input();
    const Index seed = initial_simplex();
    std::vector<bool> used(pts_.size(), false);
    for (int v : seed) used[v] = true;
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      if (!used[i]) insert(i);
    }
  }

  // Real simplices, compacted, with hull adjacency -1.
  void extract(std::vector<Index>& simplices, std::vector<Index>& adjacency,
               std::vector<bool>& on_hull) const {
    std::vector<int> remap(cells_.size(), -1);
    int count = 0;
    for (std::size_t s = 0; s < cells_.size(); ++s) {
      if (cells_[s].alive && !is_ghost(cells_[s].v)) remap[s] = count++;
    }
    simplices.clear();
    adjacency.clear();
    on_hull.assign(pts_.size(), false);
    for (std::size_t s = 0; s < cells_.size(); ++s) {
      const Cell& c = cells_[s];
      if (!c.alive) continue;
      if (is_ghost(c.v)) {
        for (int v : c.v) {
          if (v != kGhost) on_hull[v] = true;
        }
        continue;
      }
      simplices.push_back(c.v);
      Index nb{};
      for (int k = 0; k < K; ++k) nb[k] = remap[c.nb[k]];
      adjacency.push_back(nb);
    }
  }

 private:
  struct Cell {
    Index v{};
    Index nb{};
    bool alive = true;
  };

  static bool is_ghost(const Index& v) {
    return std::find(v.begin(), v.end(), kGhost) != v.end();
  }

  std::array<V, K> coords(const Index& v) const {
    std::array<V, K> out{};
    for (int k = 0; k < K; ++k) out[k] = pts_[v[k]];
    return out;
  }

  double diameter() const {
    V lo = pts_[0], hi = pts_[0];
    for (const V& p : pts_) {
      lo.x = std::min(lo.x, p.x);
      hi.x = std::max(hi.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.y = std::max(hi.y, p.y);
      if constexpr (D == 3) {
        lo.z = std::min(lo.z, p.z);
        hi.z = std::max(hi.z, p.z);
      }
    }
    return norm(hi - lo);
  }

  void check_input() const {
    const int n = static_cast<int>(pts_.size());
    if (n < K) {
      throw Error(ErrorKind::TooFewPoints,
                  "need at least " + std::to_string(K) + " points, got " + std::to_string(n));
    }
    for (int i = 0; i < n; ++i) {
      if (!is_finite(pts_[i])) throw Error(ErrorKind::InvalidInput, "non-finite point", {i});
    }
    const double tol = geom::kEpsLength * diameter();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (pts_[a].x != pts_[b].x) return pts_[a].x < pts_[b].x;
      return a < b;
    });
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n && pts_[order[b]].x - pts_[order[a]].x <= tol; ++b) {
        if (norm(pts_[order[a]] - pts_[order[b]]) <= tol) {
          const int i = std::min(order[a], order[b]);
          const int j = std::max(order[a], order[b]);
          throw Error(ErrorKind::DuplicatePoints,
                      "points " + std::to_string(i) + " and " + std::to_string(j) + " coincide",
                      {i, j});
        }
      }
    }
  }

  Index initial_simplex() {
    const int n = static_cast<int>(pts_.size());
    const double diam = diameter();
    Index v{};
    v[0] = 0;
    int found = 1;
    for (int i = 1; i < n && found < K; ++i) {
      bool independent = false;
      if (found == 1) {
        independent = norm(pts_[i] - pts_[v[0]]) > geom::kEpsLength * diam;
      } else if (found == 2) {
        if constexpr (D == 2) {
          independent = std::abs(geom::orient2(pts_[v[0]], pts_[v[1]], pts_[i])) >
                        geom::kEpsArea * diam * diam;
        } else {
          independent = norm(cross(pts_[v[1]] - pts_[v[0]], pts_[i] - pts_[v[0]])) >
                        geom::kEpsArea * diam * diam;
        }
      } else if constexpr (D == 3) {
        independent = std::abs(geom::orient3(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[i])) >
                      geom::kEpsVolume * diam * diam * diam;
      }
      if (independent) v[found++] = i;
    }
    if (found < K) throw Error(DimTraits<V>::flat, DimTraits<V>::flat_what);
    if (orient_normalized(coords(v)) < 0.0) std::swap(v[0], v[1]);

    cells_.push_back({v, {}, true});
    for (int k = 0; k < K; ++k) {
      Index g = v;
      g[k] = kGhost;
      std::swap(g[(k + 1) % K], g[(k + 2) % K]);
      cells_.push_back({g, {}, true});
    }
    std::vector<int> all(cells_.size());
    std::iota(all.begin(), all.end(), 0);
    link_new(all, -1);
    last_ = 0;
    return v;
  }

  // Facet opposite corner k, as a sorted key.
  static std::array<int, D> facet_key(const Index& v, int k) {
    std::array<int, D> key{};
    int m = 0;
    for (int q = 0; q < K; ++q) {
      if (q != k) key[m++] = v[q];
    }
    std::sort(key.begin(), key.end());
    return key;
  }

  // Pairs up facets among `ids`. When skip_vertex >= 0 only facets that
  // contain it are matched (the others are already linked).
  void link_new(const std::vector<int>& ids, int skip_vertex) {
    std::map<std::array<int, D>, std::pair<int, int>> open;
    for (int s : ids) {
      for (int k = 0; k < K; ++k) {
        if (skip_vertex >= 0 && cells_[s].v[k] == skip_vertex) continue;
        const auto key = facet_key(cells_[s].v, k);
        auto it = open.find(key);
        if (it == open.end()) {
          open.emplace(key, std::make_pair(s, k));
        } else {
          cells_[s].nb[k] = it->second.first;
          cells_[it->second.first].nb[it->second.second] = s;
          open.erase(it);
        }
      }
    }
    if (!open.empty()) {
      throw Error(ErrorKind::InvalidInput, "internal: unmatched facets during triangulation");
    }
  }

  bool in_sphere(int s, int p) const {
    const Cell& c = cells_[s];
    const V q = pts_[p];
    int ghost_at = -1;
    for (int k = 0; k < K; ++k) {
      if (c.v[k] == kGhost) ghost_at = k;
    }
    if (ghost_at < 0) return insphere_normalized(coords(c.v), q) > kEpsPredicate;

    std::array<V, K> probe{};
    for (int k = 0; k < K; ++k) probe[k] = (k == ghost_at) ? q : pts_[c.v[k]];
    const double o = orient_normalized(probe);
    if (o > kEpsPredicate) return true;
    if (o < -kEpsPredicate) return false;
    // On the hull facet's plane: inside iff inside the real neighbour's sphere.
    const int real = c.nb[ghost_at];
    return insphere_normalized(coords(cells_[real].v), q) > kEpsPredicate;
  }

  int locate(int p) const {
    const V q = pts_[p];
    int s = last_;
    if (!cells_[s].alive || is_ghost(cells_[s].v)) s = -1;
    const int max_steps = 4 * static_cast<int>(cells_.size()) + 16;
    for (int step = 0; s >= 0 && step < max_steps; ++step) {
      const Cell& c = cells_[s];
      int next = -1;
      for (int t = 0; t < K; ++t) {
        const int k = (t + step) % K;
        std::array<V, K> probe = coords(c.v);
        probe[k] = q;
        if (orient_normalized(probe) < 0.0) {
          next = c.nb[k];
          break;
        }
      }
      if (next < 0) break;
      if (is_ghost(cells_[next].v)) {
        s = next;
        break;
      }
      s = next;
    }
    if (s >= 0 && in_sphere(s, p)) return s;
    for (std::size_t t = 0; t < cells_.size(); ++t) {
      if (cells_[t].alive && in_sphere(static_cast<int>(t), p)) return static_cast<int>(t);
    }
    throw Error(ErrorKind::InvalidInput,
                "internal: no simplex conflicts with point " + std::to_string(p), {p});
  }

  // True when the simplex s with corner k replaced by p is well formed.
  bool valid_replacement(int s, int k, int p) const {
    Index v = cells_[s].v;
    v[k] = p;
    if (!is_ghost(v)) return orient_normalized(coords(v)) > 1e-13;
    // Ghost: the D real corners must be affinely independent.
    std::array<V, D> real{};
    int m = 0;
    for (int q = 0; q < K; ++q) {
      if (v[q] != kGhost) real[m++] = pts_[v[q]];
    }
    if constexpr (D == 2) {
      return norm(real[1] - real[0]) > 0.0;
    } else {
      const double e = std::max({norm(real[1] - real[0]), norm(real[2] - real[0]),
                                 norm(real[2] - real[1])});
      return norm(cross(real[1] - real[0], real[2] - real[0])) > 1e-13 * e * e;
    }
  }

  void insert(int p) {
    const int seed = locate(p);
    ++stamp_;
    mark_.resize(cells_.size(), 0);
    auto in_cavity = [&](int s) { return mark_[s] == stamp_; };
    std::vector<int> cavity{seed};
    mark_[seed] = stamp_;
    for (std::size_t q = 0; q < cavity.size(); ++q) {
      for (int nb : cells_[cavity[q]].nb) {
        if (!in_cavity(nb) && in_sphere(nb, p)) {
          mark_[nb] = stamp_;
          cavity.push_back(nb);
        }
      }
    }

    // Grow the cavity until it is star-shaped from p.
    for (int guard = 0;; ++guard) {
      bool grown = false;
      for (std::size_t q = 0; q < cavity.size(); ++q) {
        const int s = cavity[q];
        for (int k = 0; k < K; ++k) {
          const int nb = cells_[s].nb[k];
          if (in_cavity(nb) || valid_replacement(s, k, p)) continue;
          mark_[nb] = stamp_;
          cavity.push_back(nb);
          grown = true;
        }
      }
      if (!grown) break;
      if (guard > 64) {
        throw Error(ErrorKind::InvalidInput,
                    "internal: cavity repair did not converge at point " + std::to_string(p),
                    {p});
      }
    }

    std::vector<int> created;
    for (int s : cavity) {
      for (int k = 0; k < K; ++k) {
        const int nb = cells_[s].nb[k];
        if (in_cavity(nb)) continue;
        Cell fresh;
        fresh.v = cells_[s].v;
        fresh.v[k] = p;
        fresh.nb.fill(-1);
        fresh.nb[k] = nb;
        const int id = allocate(fresh);
        for (int q = 0; q < K; ++q) {
          if (cells_[nb].nb[q] == s) cells_[nb].nb[q] = id;
        }
        created.push_back(id);
      }
    }
    for (int s : cavity) cells_[s].alive = false;
    link_new(created, p);
    for (int id : created) {
      if (!is_ghost(cells_[id].v)) {
        last_ = id;
        break;
      }
    }
  }

  int allocate(const Cell& c) {
    cells_.push_back(c);
    return static_cast<int>(cells_.size()) - 1;
  }

  std::vector<V> pts_;
  std::vector<Cell> cells_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int last_ = 0;
};

}  // namespace

Triangulation2 triangulate2(std::span<const Vec2> points) {
  BowyerWatson<Vec2> bw(points);
  bw.run();
  Triangulation2 out;
  out.points.assign(points.begin(), points.end());
  bw.extract(out.triangles, out.adjacency, out.on_hull);
  return out;
}

Triangulation3 tetrahedralize3(std::span<const Vec3> points) {
  BowyerWatson<Vec3> bw(points);
  bw.run();
  Triangulation3 out;
  out.points.assign(points.begin(), points.end());
  bw.extract(out.tetrahedra, out.adjacency, out.on_hull);
  return out;
}

NeighborMap2 neighbor_map(const Triangulation2& tri) {
  const int n = static_cast<int>(tri.points.size());
  NeighborMap2 nm;
  nm.ring.resize(n);
  nm.fan.resize(n);
  nm.boundary.assign(n, false);

  // Counter-clockwise triangle (i, u, v) contributes the link edge u -> v.
  std::vector<std::vector<std::array<int, 3>>> link(n);
  for (int t = 0; t < static_cast<int>(tri.triangles.size()); ++t) {
    const auto& c = tri.triangles[t];
    for (int k = 0; k < 3; ++k) link[c[k]].push_back({c[(k + 1) % 3], c[(k + 2) % 3], t});
  }

  for (int i = 0; i < n; ++i) {
    auto& edges = link[i];
    if (edges.empty()) continue;
    std::map<int, int> by_start;
    std::map<int, int> ends;
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
      by_start[edges[e][0]] = e;
      ends[edges[e][1]] = e;
    }
    // An open fan starts at the one link vertex that no edge ends at.
    int start = -1;
    for (const auto& [u, e] : by_start) {
      if (!ends.contains(u)) {
        start = e;
        break;
      }
    }
    const bool open = start >= 0;
    if (!open) {
      // Closed ring: begin with the smallest neighbour index for determinism.
      start = by_start.begin()->second;
    }
    nm.boundary[i] = open;
    int e = start;
    for (std::size_t step = 0; step < edges.size(); ++step) {
      nm.ring[i].push_back(edges[e][0]);
      nm.fan[i].push_back(edges[e][2]);
      auto it = by_start.find(edges[e][1]);
      if (it == by_start.end()) {
        nm.ring[i].push_back(edges[e][1]);
        break;
      }
      e = it->second;
    }
  }
  return nm;
}

NeighborMap3 neighbor_map(const Triangulation3& tet) {
  const int n = static_cast<int>(tet.points.size());
  NeighborMap3 nm;
  nm.stars.resize(n);
  nm.neighbors.resize(n);
  nm.boundary = tet.on_hull;
  // Even permutations of (0,1,2,3) starting at each corner keep orientation.
  static constexpr std::array<std::array<int, 4>, 4> kRot{{
      {0, 1, 2, 3},
      {1, 0, 3, 2},
      {2, 0, 1, 3},
      {3, 0, 2, 1},
  }};
  for (int t = 0; t < static_cast<int>(tet.tetrahedra.size()); ++t) {
    const auto& c = tet.tetrahedra[t];
    for (const auto& r : kRot) {
      const int i = c[r[0]];
      nm.stars[i].push_back({t, {c[r[1]], c[r[2]], c[r[3]]}});
      for (int q = 1; q < 4; ++q) nm.neighbors[i].push_back(c[r[q]]);
    }
  }
  for (auto& nb : nm.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return nm;
}

}  // namespace cvmesh
