#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "cvmesh/mesh.hpp"
#include "cvmesh/optimize.hpp"
#include "cvmesh/parallel.hpp"

namespace cvmesh {

namespace {

// Edges / faces shorter than this fraction of the domain diameter carry no
// usable direction.
constexpr double kDegenerate = 1e-7;

double domain_diameter(const ControlVolumeMesh& mesh) { return norm(mesh.domain_hi - mesh.domain_lo); }

double segment_distance(Vec3 x, Vec3 a, Vec3 b) {
  const Vec3 ab = b - a;
  const double len2 = norm2(ab);
  const double t = len2 > 0.0 ? std::clamp(dot(x - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(x - (a + t * ab));
}

Vec3 face_normal(const ControlVolumeMesh& mesh, const std::vector<int>& loop) {
  Vec3 n{};
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const Vec3 a = mesh.vertices[loop[k]], b = mesh.vertices[loop[(k + 1) % loop.size()]];
    n.x += (a.y - b.y) * (a.z + b.z);
    n.y += (a.z - b.z) * (a.x + b.x);
    n.z += (a.x - b.x) * (a.y + b.y);
  }
  return 0.5 * n;
}

// Distance from x to the cell boundary (to the face planes in 3D).
double boundary_distance(const ControlVolumeMesh& mesh, int cell, Vec3 x) {
  const auto& vol = mesh.volumes[cell];
  double best = INFINITY;
  if (mesh.dim == 2) {
    const auto& v = vol.vertices;
    for (std::size_t k = 0; k < v.size(); ++k)
      best = std::min(best, segment_distance(x, mesh.vertices[v[k]], mesh.vertices[v[(k + 1) % v.size()]]));
  } else {
    for (const auto& f : vol.faces) {
      const Vec3 n = face_normal(mesh, f.loop);
      const double len = norm(n);
      if (len == 0.0) continue;
      best = std::min(best, std::abs(dot(n, x - mesh.vertices[f.loop[0]])) / len);
    }
  }
  return best;
}

struct Bounds {
  Vec3 lo{INFINITY, INFINITY, INFINITY}, hi{-INFINITY, -INFINITY, -INFINITY};
  bool contains(Vec3 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }
};

std::vector<Bounds> cell_bounds(const ControlVolumeMesh& mesh) {
  std::vector<Bounds> out(mesh.volumes.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (int v : mesh.volumes[c].vertices) {
      const Vec3 p = mesh.vertices[v];
      out[c].lo = {std::min(out[c].lo.x, p.x), std::min(out[c].lo.y, p.y), std::min(out[c].lo.z, p.z)};
      out[c].hi = {std::max(out[c].hi.x, p.x), std::max(out[c].hi.y, p.y), std::max(out[c].hi.z, p.z)};
    }
  }
  return out;
}

bool inside_domain(const ControlVolumeMesh& mesh, Vec3 x) {
  if (mesh.dim == 2) {
    const auto& p = mesh.domain2.polygon;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (cross(p[(k + 1) % p.size()] - p[k], drop(x) - p[k]) < 0.0) return false;
    }
    return true;
  }
  for (const auto& pl : mesh.domain3.planes)
    if (dot(pl.n, x) > pl.c) return false;
  return true;
}

bool strictly_inside(const ControlVolumeMesh& mesh, int cell, Vec3 x, double tol) {
  return cell_winding(mesh, cell, x) > 0.5 && boundary_distance(mesh, cell, x) > tol;
}

}  // namespace

double cell_measure(const ControlVolumeMesh& mesh, int cell) {
  const auto& vol = mesh.volumes[cell];
  if (vol.vertices.empty()) return 0.0;
  if (mesh.dim == 2) {
    const auto& v = vol.vertices;
    const Vec3 o = mesh.vertices[v[0]];
    double a = 0.0;
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
      const Vec3 p = mesh.vertices[v[k]] - o, q = mesh.vertices[v[k + 1]] - o;
      a += p.x * q.y - p.y * q.x;
    }
    return 0.5 * a;
  }
  const Vec3 o = mesh.vertices[vol.vertices[0]];
  double s = 0.0;
  for (const auto& f : vol.faces)
    for (std::size_t k = 1; k + 1 < f.loop.size(); ++k)
      s += dot(mesh.vertices[f.loop[0]] - o,
               cross(mesh.vertices[f.loop[k]] - o, mesh.vertices[f.loop[k + 1]] - o));
  return s / 6.0;
}

double cell_winding(const ControlVolumeMesh& mesh, int cell, Vec3 x) {
  const auto& vol = mesh.volumes[cell];
  if (mesh.dim == 2) {
    const auto& v = vol.vertices;
    double total = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Vec3 a = mesh.vertices[v[k]] - x, b = mesh.vertices[v[(k + 1) % v.size()]] - x;
      total += std::atan2(a.x * b.y - a.y * b.x, a.x * b.x + a.y * b.y);
    }
    return total / (2.0 * std::numbers::pi);
  }
  double total = 0.0;
  for (const auto& f : vol.faces) {
    const Vec3 a = mesh.vertices[f.loop[0]] - x;
    const double la = norm(a);
    for (std::size_t k = 1; k + 1 < f.loop.size(); ++k) {
      const Vec3 b = mesh.vertices[f.loop[k]] - x, c = mesh.vertices[f.loop[k + 1]] - x;
      const double lb = norm(b), lc = norm(c);
      const double num = dot(a, cross(b, c));
      const double den = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
      total += 2.0 * std::atan2(num, den);
    }
  }
  return total / (4.0 * std::numbers::pi);
}

std::map<std::pair<int, int>, std::vector<int>> shared_faces(const ControlVolumeMesh& mesh, int side) {
  std::map<std::pair<int, int>, std::vector<int>> out;
  for (std::size_t c = 0; c < mesh.volumes.size(); ++c) {
    const int i = static_cast<int>(c);
    const auto& vol = mesh.volumes[c];
    auto take = [&](int j) { return j >= 0 && ((side == 0) == (i < j)); };
    if (mesh.dim == 2) {
      const auto& v = vol.vertices;
      for (std::size_t k = 0; k < v.size(); ++k) {
        const int j = vol.edge_tags[k];
        if (!take(j)) continue;
        auto& ids = out[{std::min(i, j), std::max(i, j)}];
        ids.push_back(v[k]);
        ids.push_back(v[(k + 1) % v.size()]);
      }
    } else {
      for (const auto& f : vol.faces) {
        if (!take(f.neighbor)) continue;
        auto& ids = out[{std::min(i, f.neighbor), std::max(i, f.neighbor)}];
        ids.insert(ids.end(), f.loop.begin(), f.loop.end());
      }
    }
  }
  for (auto& [k, ids] : out) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return out;
}

PerpendicularityReport validate_perpendicularity(const ControlVolumeMesh& mesh, double tol) {
  PerpendicularityReport rep;
  const double min_len = kDegenerate * domain_diameter(mesh);
  auto check = [&](int i, int j, double deviation) {
    ++rep.checked;
    rep.max_deviation = std::max(rep.max_deviation, deviation);
    if (deviation > tol) rep.violations.push_back({i, j, deviation});
  };
  for (std::size_t c = 0; c < mesh.volumes.size(); ++c) {
    const int i = static_cast<int>(c);
    const auto& vol = mesh.volumes[c];
    if (mesh.dim == 2) {
      const auto& v = vol.vertices;
      for (std::size_t k = 0; k < v.size(); ++k) {
        const int j = vol.edge_tags[k];
        if (j < 0) continue;
        const Vec3 e = mesh.vertices[v[(k + 1) % v.size()]] - mesh.vertices[v[k]];
        const Vec3 d = mesh.points[j] - mesh.points[i];
        if (norm(e) <= min_len) {
          ++rep.skipped;
          continue;
        }
        check(i, j, std::asin(std::min(1.0, std::abs(dot(e, d)) / (norm(e) * norm(d)))));
      }
    } else {
      for (const auto& f : vol.faces) {
        if (f.neighbor < 0) continue;
        const Vec3 n = face_normal(mesh, f.loop);
        const Vec3 d = mesh.points[f.neighbor] - mesh.points[i];
        if (norm(n) <= min_len * min_len) {
          ++rep.skipped;
          continue;
        }
        check(i, f.neighbor, std::atan2(norm(cross(n, d)), std::abs(dot(n, d))));
      }
    }
  }
  return rep;
}

GlobalReport validate_global(const ControlVolumeMesh& mesh, const GlobalOptions& options) {
  GlobalReport rep;
  const int n = static_cast<int>(mesh.volumes.size());
  const double diam = domain_diameter(mesh);
  const double tol = 1e-12 * diam;

  // (a) both owners list the same vertices for every common edge / face.
  const auto lo = shared_faces(mesh, 0), hi = shared_faces(mesh, 1);
  std::set<std::pair<int, int>> pairs;
  for (const auto& [k, v] : lo) pairs.insert(k);
  for (const auto& [k, v] : hi) pairs.insert(k);
  for (const auto& k : pairs) {
    auto a = lo.find(k), b = hi.find(k);
    if (a == lo.end() || b == hi.end() || a->second != b->second) rep.shared_mismatch.push_back(k);
  }

  const auto boxes = cell_bounds(mesh);

  // (b) sampled interior disjointness.
  opt::Rng rng(options.seed);
  std::vector<Vec3> probes;
  for (int p = 0; p < options.probes; ++p) {
    Vec3 x{rng.uniform(mesh.domain_lo.x, mesh.domain_hi.x), rng.uniform(mesh.domain_lo.y, mesh.domain_hi.y), 0.0};
    if (mesh.dim == 3) x.z = rng.uniform(mesh.domain_lo.z, mesh.domain_hi.z);
    probes.push_back(x);
  }
  std::vector<std::vector<int>> owners(probes.size());
  std::vector<char> in_domain(probes.size(), 0);
  parallel_for(static_cast<int>(probes.size()), [&](int p) {
    in_domain[p] = inside_domain(mesh, probes[p]);
    for (int c = 0; c < n; ++c) {
      if (!boxes[c].contains(probes[p])) continue;
      if (cell_winding(mesh, c, probes[p]) > 0.5) owners[p].push_back(c);
    }
  });
  rep.probes = static_cast<int>(probes.size());
  std::set<std::pair<int, int>> overlap;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    if (owners[p].size() > 1) {
      ++rep.overlapping_probes;
      for (std::size_t a = 0; a < owners[p].size(); ++a)
        for (std::size_t b = a + 1; b < owners[p].size(); ++b) overlap.insert({owners[p][a], owners[p][b]});
    } else if (owners[p].empty() && in_domain[p]) {
      ++rep.uncovered_probes;
    }
  }
  rep.overlapping_cells.assign(overlap.begin(), overlap.end());

  // (c) owners inside their cells, (d) no foreign generator inside a cell.
  std::vector<char> outside(n, 0);
  std::vector<std::vector<int>> foreign(n);
  parallel_for(n, [&](int c) {
    if (mesh.volumes[c].vertices.empty() || !strictly_inside(mesh, c, mesh.points[c], tol)) outside[c] = 1;
    for (int p = 0; p < n; ++p) {
      if (p == c || !boxes[c].contains(mesh.points[p])) continue;
      if (strictly_inside(mesh, c, mesh.points[p], tol)) foreign[c].push_back(p);
    }
  });
  for (int c = 0; c < n; ++c) {
    if (outside[c]) rep.owner_outside.push_back(c);
    for (int p : foreign[c]) rep.foreign_points.push_back({c, p});
  }

  for (int c = 0; c < n; ++c) rep.measure_sum += cell_measure(mesh, c);
  rep.domain_measure = mesh.domain_measure;
  rep.measure_rel_error = std::abs(rep.measure_sum - rep.domain_measure) / rep.domain_measure;
  return rep;
}

}  // namespace cvmesh
