#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <map>
#include <numeric>
#include <optional>

#include "cvmesh/geometry.hpp"
#include "cvmesh/mesh.hpp"
#include "cvmesh/parallel.hpp"
#include "cvmesh/radius.hpp"

namespace cvmesh {

namespace {

// Plane ids inside one cell: j >= 0 is the radical line / plane between the
// owner and point j, domain_tag(e) is domain edge / plane e and ids at or
// below kBoot belong to the temporary box used to build the 3D domain.
constexpr int kBoot = -1000000;
constexpr double kConvexTol = 1e-9;
constexpr double kFaceTol = 1e-6;

using Key = std::vector<int>;  // sorted points, -1, sorted domain indices; empty = anonymous

Key make_key(int dim, int owner, const std::vector<int>& planes) {
  std::vector<int> pts, dom;
  for (int p : planes) {
    if (p <= kBoot) return {};
    if (p >= 0) pts.push_back(p); else dom.push_back(-1 - p);
  }
  if (static_cast<int>(dom.size()) < dim && owner >= 0) pts.push_back(owner);
  else pts.clear();
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::sort(dom.begin(), dom.end());
  dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
  Key key = std::move(pts);
  key.push_back(-1);
  key.insert(key.end(), dom.begin(), dom.end());
  return key;
}

struct Equation {
  Vec3 a;
  double b;  // a . (x - origin) = b
};

double det2(Vec3 a, Vec3 b) { return a.x * b.y - a.y * b.x; }
double det3(Vec3 a, Vec3 b, Vec3 c) { return dot(a, cross(b, c)); }

// Positions from plane labels. Every cell that meets the same vertex computes
// it from the same label in the same way, so neighbours agree bit for bit.
class Resolver {
 public:
  Resolver(int dim, std::span<const Vec3> pts, std::span<const double> r, std::vector<Plane> domain,
           std::map<Key, int> simplex_of, std::vector<Vec3> q)
      : dim_(dim), pts_(pts), r_(r), domain_(std::move(domain)), simplex_of_(std::move(simplex_of)),
        q_(std::move(q)) {}

  int simplex(const Key& key) const {
    if (key.empty() || static_cast<int>(key.size()) != dim_ + 2 || key.back() != -1) return -1;
    auto it = simplex_of_.find(Key(key.begin(), key.end() - 1));
    return it == simplex_of_.end() ? -1 : it->second;
  }

  std::optional<Vec3> position(const Key& key) const {
    if (key.empty()) return std::nullopt;
    if (const int s = simplex(key); s >= 0) return q_[s];
    const auto sep = std::find(key.begin(), key.end(), -1);
    const std::vector<int> pts(key.begin(), sep), dom(sep + 1, key.end());
    const Vec3 origin = pts.empty() ? Vec3{} : pts_[pts[0]];
    std::vector<Equation> eq;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      const Vec3 d = pts_[pts[k]] - origin;
      const double r0 = r_[pts[0]], rk = r_[pts[k]];
      eq.push_back({2.0 * d, norm2(d) - rk * rk + r0 * r0});
    }
    for (int e : dom) eq.push_back({domain_[e].n, domain_[e].c - dot(domain_[e].n, origin)});
    if (static_cast<int>(eq.size()) < dim_) return std::nullopt;

    // Best-conditioned subset of dim equations (only matters for degenerate labels).
    std::vector<int> best;
    double best_det = 0.0;
    const int m = static_cast<int>(eq.size());
    auto consider = [&](std::vector<int> idx) {
      Vec3 u[3];
      for (int k = 0; k < dim_; ++k) u[k] = eq[idx[k]].a * (1.0 / norm(eq[idx[k]].a));
      const double d = std::abs(dim_ == 2 ? det2(u[0], u[1]) : det3(u[0], u[1], u[2]));
      if (d > best_det) {
        best_det = d;
        best = idx;
      }
    };
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        if (dim_ == 2) {
          consider({a, b});
        } else {
          for (int c = b + 1; c < m; ++c) consider({a, b, c});
        }
      }
    if (best_det < 1e-12) return std::nullopt;
    if (dim_ == 2) {
      const Equation &e0 = eq[best[0]], &e1 = eq[best[1]];
      const double det = det2(e0.a, e1.a);
      return Vec3{origin.x + (e0.b * e1.a.y - e1.b * e0.a.y) / det,
                  origin.y + (e0.a.x * e1.b - e1.a.x * e0.b) / det, 0.0};
    }
    const Equation &e0 = eq[best[0]], &e1 = eq[best[1]], &e2 = eq[best[2]];
    const Vec3 cx{e0.a.x, e1.a.x, e2.a.x}, cy{e0.a.y, e1.a.y, e2.a.y}, cz{e0.a.z, e1.a.z, e2.a.z},
        rhs{e0.b, e1.b, e2.b};
    const double det = det3(cx, cy, cz);
    return origin + Vec3{det3(rhs, cy, cz) / det, det3(cx, rhs, cz) / det, det3(cx, cy, rhs) / det};
  }

  const std::vector<Vec3>& candidates() const { return q_; }
  int dim() const { return dim_; }

 private:
  int dim_;
  std::span<const Vec3> pts_;
  std::span<const double> r_;
  std::vector<Plane> domain_;
  std::map<Key, int> simplex_of_;
  std::vector<Vec3> q_;
};

struct Diag {
  ErrorKind kind;
  std::string detail;
};

// Signed distance to a half-space, positive outside.
struct Cut {
  int id;
  Vec3 n;  // unit
  double c;
  Vec3 origin;
  double operator()(Vec3 x) const { return dot(n, x - origin) - c; }
};

Cut domain_cut(const std::vector<Plane>& dom, int e) {
  return {domain_tag(e), dom[e].n, dom[e].c, Vec3{}};
}

Cut power_cut(int owner, int j, std::span<const Vec3> pts, std::span<const double> r) {
  // |x - pi|^2 - ri^2 <= |x - pj|^2 - rj^2  <=>  2 (pj - pi) . (x - pi) <= |pj - pi|^2 - rj^2 + ri^2
  const Vec3 d = pts[j] - pts[owner];
  const double len = norm(d);
  return {j, d * (1.0 / len), (norm2(d) - r[j] * r[j] + r[owner] * r[owner]) / (2.0 * len), pts[owner]};
}

// Vertex created on segment a-b by a cut: canonical position when the label
// pins it down and agrees with the segment, interpolated otherwise.
Vec3 crossing_position(const Resolver& res, Key& key, Vec3 a, Vec3 b, double da, double db, double scale) {
  const Vec3 lerp = a + (da / (da - db)) * (b - a);
  if (auto p = res.position(key); p && norm(*p - lerp) <= 1e-6 * scale) return *p;
  key.clear();
  return lerp;
}

// ---------------------------------------------------------------- 2D cells

struct Poly2 {
  std::vector<Vec3> pos;
  std::vector<Key> key;
  std::vector<int> tag;  // edge k -> k+1
  std::size_t size() const { return pos.size(); }
};

void clip2(Poly2& poly, const Cut& cut, int owner, const Resolver& res, double tol, double scale) {
  const std::size_t n = poly.size();
  if (n == 0) return;
  std::vector<double> d(n);
  bool any_out = false;
  for (std::size_t k = 0; k < n; ++k) {
    d[k] = cut(poly.pos[k]);
    any_out |= d[k] > tol;
  }
  if (!any_out) return;
  Poly2 out;
  auto push = [&](Vec3 p, Key key, int tag) {
    out.pos.push_back(p);
    out.key.push_back(std::move(key));
    out.tag.push_back(tag);
  };
  auto crossing = [&](std::size_t a, std::size_t b, int t) {
    Key key = make_key(2, owner, {t, cut.id});
    const Vec3 p = crossing_position(res, key, poly.pos[a], poly.pos[b], d[a], d[b], scale);
    return std::pair{p, key};
  };
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t b = (a + 1) % n;
    const int t = poly.tag[a];
    const bool ain = d[a] <= tol, bin = d[b] <= tol;
    if (ain) {
      push(poly.pos[a], poly.key[a], t);
      if (!bin) {
        if (d[a] < -tol) {
          auto [p, key] = crossing(a, b, t);
          push(p, std::move(key), cut.id);
        } else {
          out.tag.back() = cut.id;
        }
      }
    } else if (bin && d[b] < -tol) {
      auto [p, key] = crossing(a, b, t);
      push(p, std::move(key), t);
    }
  }
  if (out.size() < 3) out = Poly2{};
  poly = std::move(out);
}

double signed_area(const Poly2& p) {
  double a = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Vec3 u = p.pos[k], v = p.pos[(k + 1) % p.size()];
    a += u.x * v.y - u.y * v.x;
  }
  return 0.5 * a;
}

std::optional<std::string> convexity_defect2(const Poly2& p, double scale) {
  const std::size_t n = p.size();
  if (n < 3) return "fewer than three vertices";
  if (!(signed_area(p) > 0.0)) return "clockwise or zero-area polygon";
  // Skip zero-length edges when looking at corners.
  std::vector<Vec3> v;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 a = p.pos[k];
    if (v.empty() || norm(a - v.back()) > 1e-12 * scale) v.push_back(a);
  }
  while (v.size() > 1 && norm(v.front() - v.back()) <= 1e-12 * scale) v.pop_back();
  if (v.size() < 3) return "collapsed polygon";
  double turning = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Vec3 e0 = v[k] - v[(k + v.size() - 1) % v.size()], e1 = v[(k + 1) % v.size()] - v[k];
    const double cr = e0.x * e1.y - e0.y * e1.x;
    if (cr < -kConvexTol * norm(e0) * norm(e1)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "reflex corner at local vertex %zu", k);
      return std::string(buf);
    }
    turning += std::atan2(cr, e0.x * e1.x + e0.y * e1.y);
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) return "self-intersecting polygon";
  return std::nullopt;
}

// ---------------------------------------------------------------- 3D cells

struct Poly3 {
  struct Face {
    int plane;
    std::vector<int> loop;
  };
  std::vector<Vec3> pos;
  std::vector<std::vector<int>> planes;  // sorted
  std::vector<Key> key;
  std::vector<Face> faces;
  bool empty() const { return faces.empty(); }
};

std::pair<Vec3, Vec3> basis_around(Vec3 n) {
  const Vec3 axis = std::abs(n.x) <= std::abs(n.y) && std::abs(n.x) <= std::abs(n.z) ? Vec3{1, 0, 0}
                    : std::abs(n.y) <= std::abs(n.z)                               ? Vec3{0, 1, 0}
                                                                                   : Vec3{0, 0, 1};
  const Vec3 u = normalized(cross(n, axis));
  return {u, cross(n, u)};
}

// Orders points counter-clockwise about the unit normal n.
std::vector<int> order_about(const std::vector<int>& ids, const std::vector<Vec3>& pos, Vec3 n) {
  Vec3 c{};
  for (int id : ids) c = c + pos[id];
  c = c * (1.0 / ids.size());
  const auto [u, v] = basis_around(n);
  std::vector<std::pair<double, int>> ang;
  for (int id : ids) ang.push_back({std::atan2(dot(pos[id] - c, v), dot(pos[id] - c, u)), id});
  std::sort(ang.begin(), ang.end());
  std::vector<int> out;
  for (auto& [a, id] : ang) out.push_back(id);
  return out;
}

void clip3(Poly3& poly, const Cut& cut, int owner, const Resolver& res, double tol, double scale) {
  const int n = static_cast<int>(poly.pos.size());
  if (poly.empty()) return;
  std::vector<double> d(n);
  bool any_out = false, any_in = false;
  for (int k = 0; k < n; ++k) {
    d[k] = cut(poly.pos[k]);
    any_out |= d[k] > tol;
    any_in |= d[k] < -tol;
  }
  if (!any_out) return;
  if (!any_in) {
    poly = Poly3{};
    return;
  }
  Poly3 out;
  std::vector<int> remap(n, -1);
  std::vector<char> on_cut;
  auto add = [&](Vec3 p, std::vector<int> planes, Key key, bool on) {
    out.pos.push_back(p);
    out.planes.push_back(std::move(planes));
    out.key.push_back(std::move(key));
    on_cut.push_back(on);
    return static_cast<int>(out.pos.size()) - 1;
  };
  for (int k = 0; k < n; ++k) {
    if (d[k] > tol) continue;
    auto planes = poly.planes[k];
    const bool on = d[k] >= -tol;
    if (on && !std::binary_search(planes.begin(), planes.end(), cut.id)) {
      planes.insert(std::upper_bound(planes.begin(), planes.end(), cut.id), cut.id);
    }
    remap[k] = add(poly.pos[k], std::move(planes), poly.key[k], on);
  }
  std::map<std::pair<int, int>, int> cache;
  auto crossing = [&](int a, int b) {
    const std::pair<int, int> e{std::min(a, b), std::max(a, b)};
    if (auto it = cache.find(e); it != cache.end()) return it->second;
    std::vector<int> planes;
    std::set_intersection(poly.planes[a].begin(), poly.planes[a].end(), poly.planes[b].begin(),
                          poly.planes[b].end(), std::back_inserter(planes));
    planes.insert(std::upper_bound(planes.begin(), planes.end(), cut.id), cut.id);
    Key key = make_key(3, owner, planes);
    // Interpolate from the lower id so both faces get the same numbers.
    const Vec3 p = crossing_position(res, key, poly.pos[e.first], poly.pos[e.second], d[e.first],
                                     d[e.second], scale);
    const int id = add(p, std::move(planes), std::move(key), true);
    cache[e] = id;
    return id;
  };
  for (const auto& f : poly.faces) {
    std::vector<int> loop;
    const std::size_t m = f.loop.size();
    for (std::size_t k = 0; k < m; ++k) {
      const int a = f.loop[k], b = f.loop[(k + 1) % m];
      if (d[a] <= tol) loop.push_back(remap[a]);
      if ((d[a] < -tol && d[b] > tol) || (d[a] > tol && d[b] < -tol)) loop.push_back(crossing(a, b));
    }
    loop.erase(std::unique(loop.begin(), loop.end()), loop.end());
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    if (loop.size() >= 3) out.faces.push_back({f.plane, std::move(loop)});
  }
  std::vector<int> cap;
  for (const auto& f : out.faces)
    for (int v : f.loop)
      if (on_cut[v]) cap.push_back(v);
  std::sort(cap.begin(), cap.end());
  cap.erase(std::unique(cap.begin(), cap.end()), cap.end());
  if (cap.size() >= 3) out.faces.push_back({cut.id, order_about(cap, out.pos, cut.n)});

  // Drop vertices no face uses.
  std::vector<int> used(out.pos.size(), -1);
  Poly3 packed;
  for (auto& f : out.faces) {
    for (int& v : f.loop) {
      if (used[v] < 0) {
        used[v] = static_cast<int>(packed.pos.size());
        packed.pos.push_back(out.pos[v]);
        packed.planes.push_back(out.planes[v]);
        packed.key.push_back(out.key[v]);
      }
      v = used[v];
    }
  }
  packed.faces = std::move(out.faces);
  if (packed.faces.size() < 4) packed = Poly3{};
  poly = std::move(packed);
}

Vec3 newell_normal(const std::vector<int>& loop, const std::vector<Vec3>& pos) {
  Vec3 n{};
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const Vec3 a = pos[loop[k]], b = pos[loop[(k + 1) % loop.size()]];
    n.x += (a.y - b.y) * (a.z + b.z);
    n.y += (a.z - b.z) * (a.x + b.x);
    n.z += (a.x - b.x) * (a.y + b.y);
  }
  return 0.5 * n;
}

Vec3 loop_centroid(const std::vector<int>& loop, const std::vector<Vec3>& pos) {
  Vec3 c{};
  for (int v : loop) c = c + pos[v];
  return c * (1.0 / loop.size());
}

std::optional<Diag> polyhedron_defect(const Poly3& p, int owner, std::span<const Vec3> pts, double scale) {
  if (p.faces.size() < 4) return Diag{ErrorKind::NonConvexCell, "fewer than four faces"};
  for (const auto& f : p.faces) {
    const Vec3 nn = newell_normal(f.loop, p.pos);
    const double area = norm(nn);
    if (area <= 1e-14 * scale * scale) continue;
    const Vec3 n = nn * (1.0 / area);
    const Vec3 c = loop_centroid(f.loop, p.pos);
    const double edge = f.plane >= 0 ? norm(pts[f.plane] - pts[owner]) : scale;
    for (int v : f.loop) {
      if (std::abs(dot(n, p.pos[v] - c)) > kFaceTol * edge) {
        return Diag{ErrorKind::NonPlanarFace, "face toward " + std::to_string(f.plane) + " is not planar"};
      }
    }
    for (std::size_t v = 0; v < p.pos.size(); ++v) {
      if (dot(n, p.pos[v] - c) > kConvexTol * scale) {
        return Diag{ErrorKind::NonConvexCell,
                    "vertex outside the plane of face toward " + std::to_string(f.plane)};
      }
    }
  }
  return std::nullopt;
}

Poly3 bootstrap_box(Vec3 lo, Vec3 hi) {
  Poly3 p;
  for (int k = 0; k < 8; ++k) {
    p.pos.push_back({(k & 1) ? hi.x : lo.x, (k & 2) ? hi.y : lo.y, (k & 4) ? hi.z : lo.z});
    // Planes: -x, +x, -y, +y, -z, +z as kBoot - 0..5.
    std::vector<int> planes{kBoot - ((k & 1) ? 1 : 0), kBoot - ((k & 2) ? 3 : 2), kBoot - ((k & 4) ? 5 : 4)};
    std::sort(planes.begin(), planes.end());
    p.planes.push_back(planes);
    p.key.push_back({});
  }
  // Outward counter-clockwise loops.
  p.faces = {{kBoot - 0, {0, 4, 6, 2}}, {kBoot - 1, {1, 3, 7, 5}}, {kBoot - 2, {0, 1, 5, 4}},
             {kBoot - 3, {2, 6, 7, 3}}, {kBoot - 4, {0, 2, 3, 1}}, {kBoot - 5, {4, 5, 7, 6}}};
  return p;
}

double poly3_volume(const Poly3& p) {
  if (p.empty()) return 0.0;
  const Vec3 o = p.pos[0];
  double v = 0.0;
  for (const auto& f : p.faces)
    for (std::size_t k = 1; k + 1 < f.loop.size(); ++k)
      v += dot(p.pos[f.loop[0]] - o, cross(p.pos[f.loop[k]] - o, p.pos[f.loop[k + 1]] - o));
  return v / 6.0;
}

// ---------------------------------------------------------------- assembly

struct LocalCell {
  std::vector<Vec3> pos;
  std::vector<Key> key;
  std::vector<int> tags;                     // 2D
  std::vector<Poly3::Face> faces;            // 3D
  std::vector<Diag> diags;
};

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

void report(ControlVolumeMesh& mesh, BuildMode mode, int owner, const Diag& d) {
  if (mode == BuildMode::Strict) {
    std::vector<int> idx;
    if (owner >= 0) idx.push_back(owner);
    throw Error(d.kind, (owner >= 0 ? "cell " + std::to_string(owner) + ": " : std::string()) + d.detail, idx);
  }
  mesh.diagnostics.push_back({owner, d.kind, d.detail});
}

// Maps labels to global vertex ids, merges coincident vertices and rewrites
// the cells with compact ids.
void assemble(ControlVolumeMesh& mesh, std::vector<LocalCell>& cells, const Resolver& res, double scale,
              std::vector<char>& simplex_used) {
  std::map<Key, int> ids;
  std::vector<Vec3> pos;
  std::vector<int> simplex;
  std::vector<std::vector<int>> local_ids(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& cell = cells[c];
    for (std::size_t k = 0; k < cell.pos.size(); ++k) {
      int id;
      const Key& key = cell.key[k];
      auto it = key.empty() ? ids.end() : ids.find(key);
      if (it != ids.end()) {
        id = it->second;
      } else {
        id = static_cast<int>(pos.size());
        pos.push_back(cell.pos[k]);
        const int s = res.simplex(key);
        simplex.push_back(s);
        if (s >= 0) simplex_used[s] = 1;
        if (!key.empty()) ids.emplace(key, id);
      }
      local_ids[c].push_back(id);
    }
  }

  // Coincident vertices (cocircular / cospherical configurations).
  const int nv = static_cast<int>(pos.size());
  UnionFind uf(nv);
  std::vector<int> order(nv);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return pos[a].x < pos[b].x; });
  const double merge_tol = 1e-12 * scale;
  for (int a = 0; a < nv; ++a) {
    for (int b = a + 1; b < nv && pos[order[b]].x - pos[order[a]].x <= merge_tol; ++b) {
      if (norm(pos[order[b]] - pos[order[a]]) <= merge_tol) uf.unite(order[a], order[b]);
    }
  }

  std::vector<int> compact(nv, -1);
  auto global = [&](int id) {
    const int root = uf.find(id);
    if (compact[root] < 0) {
      compact[root] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(pos[root]);
      mesh.vertex_simplex.push_back(simplex[root]);
    }
    return compact[root];
  };

  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& cell = cells[c];
    auto& vol = mesh.volumes[c];
    vol.owner = static_cast<int>(c);
    if (mesh.dim == 2) {
      std::vector<int> loop, tags;
      for (std::size_t k = 0; k < cell.pos.size(); ++k) {
        loop.push_back(global(local_ids[c][k]));
        tags.push_back(cell.tags[k]);
      }
      // A zero-length edge k -> k+1 disappears together with vertex k.
      for (bool changed = true; changed && loop.size() > 1;) {
        changed = false;
        for (std::size_t k = 0; k < loop.size(); ++k) {
          if (loop[k] == loop[(k + 1) % loop.size()]) {
            loop.erase(loop.begin() + k);
            tags.erase(tags.begin() + k);
            changed = true;
            break;
          }
        }
      }
      if (loop.size() < 3) {
        loop.clear();
        tags.clear();
      }
      vol.vertices = std::move(loop);
      vol.edge_tags = std::move(tags);
    } else {
      std::vector<int> all;
      for (const auto& f : cell.faces) {
        std::vector<int> loop;
        for (int v : f.loop) loop.push_back(global(local_ids[c][v]));
        loop.erase(std::unique(loop.begin(), loop.end()), loop.end());
        while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
        if (loop.size() < 3) continue;
        all.insert(all.end(), loop.begin(), loop.end());
        vol.faces.push_back({f.plane, std::move(loop)});
      }
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      vol.vertices = std::move(all);
    }
    vol.closed = !vol.vertices.empty();
  }
  mesh.shared = shared_faces(mesh, 0);
}

template <typename V>
double bbox_diameter(std::span<const V> pts, const std::vector<Vec3>& extra) {
  Vec3 lo{INFINITY, INFINITY, INFINITY}, hi{-INFINITY, -INFINITY, -INFINITY};
  auto grow = [&](Vec3 p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  };
  for (const auto& p : pts) {
    if constexpr (std::is_same_v<V, Vec2>) grow(lift(p)); else grow(p);
  }
  for (const auto& p : extra) grow(p);
  return norm(hi - lo);
}

void check_radii(std::size_t n, std::span<const double> radii) {
  if (radii.size() != n) throw Error(ErrorKind::DimensionMismatch, "one radius per point required");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(radii[i]) || radii[i] < 0.0)
      throw Error(ErrorKind::InvalidInput, "radius must be finite and non-negative", {static_cast<int>(i)});
  }
}

}  // namespace

Domain2 Domain2::box(Vec2 lo, Vec2 hi) { return {{lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}}; }

double Domain2::area() const {
  double a = 0.0;
  for (std::size_t k = 0; k < polygon.size(); ++k) a += cross(polygon[k], polygon[(k + 1) % polygon.size()]);
  return 0.5 * a;
}

Domain3 Domain3::box(Vec3 lo, Vec3 hi) {
  return {{{{-1, 0, 0}, -lo.x}, {{1, 0, 0}, hi.x}, {{0, -1, 0}, -lo.y},
           {{0, 1, 0}, hi.y}, {{0, 0, -1}, -lo.z}, {{0, 0, 1}, hi.z}}};
}

Domain2 default_domain(std::span<const Vec2> pts) {
  Vec2 lo{INFINITY, INFINITY}, hi{-INFINITY, -INFINITY};
  for (auto p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const Vec2 pad = 0.05 * (hi - lo);
  return Domain2::box(lo - pad, hi + pad);
}

Domain3 default_domain(std::span<const Vec3> pts) {
  Vec3 lo{INFINITY, INFINITY, INFINITY}, hi{-INFINITY, -INFINITY, -INFINITY};
  for (auto p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const Vec3 pad = 0.05 * (hi - lo);
  return Domain3::box(lo - pad, hi + pad);
}

ControlVolumeMesh build_volumes2(const Triangulation2& tri, const NeighborMap2& nm,
                                 std::span<const double> radii, const Domain2& domain, BuildMode mode) {
  const std::size_t n = tri.points.size();
  check_radii(n, radii);
  const auto& poly = domain.polygon;
  const int ne = static_cast<int>(poly.size());
  if (ne < 3) throw Error(ErrorKind::InvalidInput, "domain polygon needs at least three vertices");
  std::vector<Plane> planes;
  for (int e = 0; e < ne; ++e) {
    const Vec2 a = poly[e], b = poly[(e + 1) % ne], c = poly[(e + 2) % ne];
    if (!(geom::orient2(a, b, c) > 0.0))
      throw Error(ErrorKind::InvalidInput, "domain polygon must be convex and counter-clockwise", {e});
    const Vec2 nrm = normalized(perp_cw(b - a));
    planes.push_back({lift(nrm), dot(nrm, a)});
  }

  ControlVolumeMesh mesh;
  mesh.dim = 2;
  for (auto p : tri.points) mesh.points.push_back(lift(p));
  mesh.radii.assign(radii.begin(), radii.end());
  for (const auto& t : tri.triangles) mesh.simplices.push_back({t[0], t[1], t[2], -1});
  mesh.domain2 = domain;
  mesh.domain_measure = domain.area();
  mesh.domain_lo = {INFINITY, INFINITY, 0};
  mesh.domain_hi = {-INFINITY, -INFINITY, 0};
  for (auto p : poly) {
    mesh.domain_lo = {std::min(mesh.domain_lo.x, p.x), std::min(mesh.domain_lo.y, p.y), 0};
    mesh.domain_hi = {std::max(mesh.domain_hi.x, p.x), std::max(mesh.domain_hi.y, p.y), 0};
  }

  const auto cand = candidate_vertices(tri, radii);
  std::vector<Vec3> q;
  for (const auto& c : cand) q.push_back(lift(c.position));
  std::map<Key, int> simplex_of;
  for (std::size_t s = 0; s < tri.triangles.size(); ++s) {
    Key k(tri.triangles[s].begin(), tri.triangles[s].end());
    std::sort(k.begin(), k.end());
    simplex_of.emplace(k, static_cast<int>(s));
  }
  std::vector<Vec3> poly3;
  for (auto p : poly) poly3.push_back(lift(p));
  const double scale = bbox_diameter(std::span<const Vec2>(tri.points), poly3);
  const double tol = 1e-12 * scale;
  const std::span<const Vec3> pts(mesh.points);
  const Resolver res(2, pts, radii, planes, std::move(simplex_of), q);

  Poly2 dom;
  for (int e = 0; e < ne; ++e) {
    dom.key.push_back(make_key(2, -1, {domain_tag((e + ne - 1) % ne), domain_tag(e)}));
    dom.pos.push_back(poly3[e]);
    dom.tag.push_back(domain_tag(e));
  }

  std::vector<LocalCell> cells(n);
  parallel_for(static_cast<int>(n), [&](int i) {
    LocalCell& out = cells[i];
    Poly2 cell;
    if (!nm.boundary[i]) {
      const auto& ring = nm.ring[i];
      const int m = nm.size(i);
      for (int k = 0; k < m; ++k) {
        const int s = nm.fan[i][k];
        cell.pos.push_back(q[s]);
        cell.key.push_back(make_key(2, i, {ring[k], ring[(k + 1) % m]}));
        cell.tag.push_back(ring[(k + 1) % m]);
      }
      if (auto defect = convexity_defect2(cell, scale))
        out.diags.push_back({ErrorKind::NonConvexCell, "candidate vertices: " + *defect});
      for (int e = 0; e < ne; ++e) clip2(cell, domain_cut(planes, e), i, res, tol, scale);
    } else {
      cell = dom;
      for (int j : nm.ring[i]) clip2(cell, power_cut(i, j, pts, radii), i, res, tol, scale);
    }
    if (cell.size() == 0) {
      out.diags.push_back({ErrorKind::NonConvexCell, "cell is empty inside the domain"});
    } else if (out.diags.empty()) {
      if (auto defect = convexity_defect2(cell, scale)) out.diags.push_back({ErrorKind::NonConvexCell, *defect});
    }
    out.pos = std::move(cell.pos);
    out.key = std::move(cell.key);
    out.tags = std::move(cell.tag);
  });

  for (std::size_t i = 0; i < n; ++i)
    for (const auto& d : cells[i].diags) report(mesh, mode, static_cast<int>(i), d);

  mesh.volumes.resize(n);
  std::vector<char> used(q.size(), 0);
  assemble(mesh, cells, res, scale, used);
  for (std::size_t s = 0; s < q.size(); ++s) {
    bool inside = true;
    for (const auto& p : planes) inside &= dot(p.n, q[s]) - p.c < -tol;
    if (inside && !used[s]) report(mesh, mode, -1, {ErrorKind::OrphanVertex, "candidate vertex of triangle " +
                                                                                 std::to_string(s) + " is in no cell"});
  }
  return mesh;
}

ControlVolumeMesh build_volumes2(const Triangulation2& tri, const NeighborMap2& nm,
                                 std::span<const double> radii, BuildMode mode) {
  return build_volumes2(tri, nm, radii, default_domain(std::span<const Vec2>(tri.points)), mode);
}

ControlVolumeMesh build_volumes3(const Triangulation3& tet, const NeighborMap3& nm,
                                 std::span<const double> radii, const Domain3& domain, BuildMode mode) {
  const std::size_t n = tet.points.size();
  check_radii(n, radii);
  if (domain.planes.size() < 4) throw Error(ErrorKind::InvalidInput, "domain needs at least four planes");
  std::vector<Plane> planes;
  for (const auto& p : domain.planes) {
    const double len = norm(p.n);
    if (!(len > 0.0)) throw Error(ErrorKind::InvalidInput, "domain plane with zero normal");
    planes.push_back({p.n * (1.0 / len), p.c / len});
  }

  ControlVolumeMesh mesh;
  mesh.dim = 3;
  mesh.points = tet.points;
  mesh.radii.assign(radii.begin(), radii.end());
  mesh.simplices = tet.tetrahedra;
  mesh.domain3 = Domain3{planes};

  const auto cand = candidate_vertices(tet, radii);
  std::vector<Vec3> q;
  for (const auto& c : cand) q.push_back(c.position);
  std::map<Key, int> simplex_of;
  for (std::size_t s = 0; s < tet.tetrahedra.size(); ++s) {
    Key k(tet.tetrahedra[s].begin(), tet.tetrahedra[s].end());
    std::sort(k.begin(), k.end());
    simplex_of.emplace(k, static_cast<int>(s));
  }
  const std::span<const Vec3> pts(mesh.points);

  // Domain polyhedron: a large box cut down by the domain planes.
  const double pscale = bbox_diameter(pts, {});
  Vec3 centre{};
  for (auto p : tet.points) centre = centre + p;
  centre = centre * (1.0 / n);
  double reach = pscale;
  for (const auto& p : planes) reach = std::max(reach, std::abs(p.c - dot(p.n, centre)));
  const Vec3 big{1e3 * reach, 1e3 * reach, 1e3 * reach};
  const Resolver res(3, pts, radii, planes, std::move(simplex_of), q);
  Poly3 dom = bootstrap_box(centre - big, centre + big);
  for (int e = 0; e < static_cast<int>(planes.size()); ++e)
    clip3(dom, domain_cut(planes, e), -1, res, 1e-12 * reach, reach);
  if (dom.empty()) throw Error(ErrorKind::InvalidInput, "domain is empty");
  for (std::size_t v = 0; v < dom.pos.size(); ++v) {
    if (dom.planes[v].front() <= kBoot) throw Error(ErrorKind::InvalidInput, "domain is unbounded");
    dom.key[v] = make_key(3, -1, dom.planes[v]);
    if (auto p = res.position(dom.key[v])) dom.pos[v] = *p;
  }
  mesh.domain_measure = poly3_volume(dom);
  mesh.domain_lo = {INFINITY, INFINITY, INFINITY};
  mesh.domain_hi = {-INFINITY, -INFINITY, -INFINITY};
  for (auto p : dom.pos) {
    mesh.domain_lo = {std::min(mesh.domain_lo.x, p.x), std::min(mesh.domain_lo.y, p.y), std::min(mesh.domain_lo.z, p.z)};
    mesh.domain_hi = {std::max(mesh.domain_hi.x, p.x), std::max(mesh.domain_hi.y, p.y), std::max(mesh.domain_hi.z, p.z)};
  }
  const double scale = bbox_diameter(pts, dom.pos);
  const double tol = 1e-12 * scale;

  std::vector<LocalCell> cells(n);
  parallel_for(static_cast<int>(n), [&](int i) {
    LocalCell& out = cells[i];
    Poly3 cell;
    if (!nm.boundary[i]) {
      std::map<int, int> local;  // tetrahedron -> local vertex
      auto vertex_of = [&](const NeighborMap3::Star& s) {
        auto [it, fresh] = local.emplace(s.tet, static_cast<int>(cell.pos.size()));
        if (fresh) {
          std::vector<int> pl(s.j.begin(), s.j.end());
          std::sort(pl.begin(), pl.end());
          cell.pos.push_back(q[s.tet]);
          cell.key.push_back(make_key(3, i, pl));
          cell.planes.push_back(std::move(pl));
        }
        return it->second;
      };
      for (int j : nm.neighbors[i]) {
        const Vec3 d = normalized(pts[j] - pts[i]);
        const auto [u, v] = basis_around(d);
        // Angles are taken about the centroid of the face: the segment
        // pi-pj need not pierce its face (non-Gabriel edges).
        std::vector<const NeighborMap3::Star*> ring;
        Vec3 c{};
        for (const auto& s : nm.stars[i]) {
          if (std::find(s.j.begin(), s.j.end(), j) == s.j.end()) continue;
          ring.push_back(&s);
          c = c + q[s.tet];
        }
        c = c * (1.0 / ring.size());
        std::vector<std::pair<std::pair<double, int>, int>> around;
        for (const auto* s : ring) {
          const Vec3 w = q[s->tet] - c;
          around.push_back({{std::atan2(dot(w, v), dot(w, u)), s->tet}, vertex_of(*s)});
        }
        std::sort(around.begin(), around.end());
        std::vector<int> loop;
        for (const auto& a : around) loop.push_back(a.second);
        cell.faces.push_back({j, std::move(loop)});
      }
      if (auto defect = polyhedron_defect(cell, i, pts, scale)) out.diags.push_back(*defect);
      for (int e = 0; e < static_cast<int>(planes.size()); ++e)
        clip3(cell, domain_cut(planes, e), i, res, tol, scale);
    } else {
      cell = dom;
      for (int j : nm.neighbors[i]) clip3(cell, power_cut(i, j, pts, radii), i, res, tol, scale);
    }
    if (cell.empty()) {
      out.diags.push_back({ErrorKind::NonConvexCell, "cell is empty inside the domain"});
    } else if (out.diags.empty()) {
      if (auto defect = polyhedron_defect(cell, i, pts, scale)) out.diags.push_back(*defect);
    }
    out.pos = std::move(cell.pos);
    out.key = std::move(cell.key);
    out.faces = std::move(cell.faces);
  });

  for (std::size_t i = 0; i < n; ++i)
    for (const auto& d : cells[i].diags) report(mesh, mode, static_cast<int>(i), d);

  mesh.volumes.resize(n);
  std::vector<char> used(q.size(), 0);
  assemble(mesh, cells, res, scale, used);
  for (std::size_t s = 0; s < q.size(); ++s) {
    bool inside = true;
    for (const auto& p : planes) inside &= dot(p.n, q[s]) - p.c < -tol;
    if (inside && !used[s]) report(mesh, mode, -1, {ErrorKind::OrphanVertex, "candidate vertex of tetrahedron " +
                                                                                 std::to_string(s) + " is in no cell"});
  }
  return mesh;
}

ControlVolumeMesh build_volumes3(const Triangulation3& tet, const NeighborMap3& nm,
                                 std::span<const double> radii, BuildMode mode) {
  return build_volumes3(tet, nm, radii, default_domain(std::span<const Vec3>(tet.points)), mode);
}

}  // namespace cvmesh
