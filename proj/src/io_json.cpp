#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cvmesh/io.hpp"
#include "json.hpp"

namespace cvmesh {

using nlohmann::json;

namespace {

constexpr ErrorKind kAllKinds[] = {
    ErrorKind::DegenerateTriangle, ErrorKind::DegenerateSegment, ErrorKind::DegenerateTetrahedron,
    ErrorKind::TooFewPoints,       ErrorKind::AllCollinear,      ErrorKind::AllCoplanar,
    ErrorKind::DuplicatePoints,    ErrorKind::EmptyInterval,     ErrorKind::NonConvexCell,
    ErrorKind::NonPlanarFace,      ErrorKind::OrphanVertex,      ErrorKind::DimensionMismatch,
    ErrorKind::UnsupportedFormat,  ErrorKind::IoFailure,         ErrorKind::RejectionBudgetExceeded,
    ErrorKind::InvalidInput,
};

ErrorKind kind_from_string(const std::string& s) {
  for (auto k : kAllKinds)
    if (to_string(k) == s) return k;
  throw Error(ErrorKind::UnsupportedFormat, "unknown diagnostic kind '" + s + "'");
}

json vec(Vec3 p, int dim) {
  if (dim == 2) return json::array({p.x, p.y});
  return json::array({p.x, p.y, p.z});
}

Vec3 vec_from(const json& a, int dim) {
  if (!a.is_array() || static_cast<int>(a.size()) != dim)
    throw Error(ErrorKind::InvalidInput, "expected a coordinate array of length " + std::to_string(dim));
  return {a[0].get<double>(), a[1].get<double>(), dim == 3 ? a[2].get<double>() : 0.0};
}

json header(std::string_view schema, int dim) {
  json j;
  j["schema"] = schema;
  j["version"] = kSchemaVersion;
  j["dimension"] = dim;
  return j;
}

json parse_document(std::string_view text, std::string_view schema) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema") || j["schema"] != schema)
    throw Error(ErrorKind::UnsupportedFormat, "expected a '" + std::string(schema) + "' document");
  const auto version = j.value("version", std::string());
  const auto dot = version.find('.');
  if (version.substr(0, dot) != kSchemaVersion.substr(0, kSchemaVersion.find('.')))
    throw Error(ErrorKind::UnsupportedFormat, "unsupported " + std::string(schema) + " version '" + version + "'");
  const int dim = j.value("dimension", 0);
  if (dim != 2 && dim != 3) throw Error(ErrorKind::DimensionMismatch, "dimension must be 2 or 3");
  return j;
}

json points_json(const PointSet& set) {
  json a = json::array();
  for (auto p : set.points) a.push_back(vec(p, set.dim));
  return a;
}

std::vector<Vec3> points_from(const json& a, int dim) {
  std::vector<Vec3> out;
  for (const auto& p : a) out.push_back(vec_from(p, dim));
  return out;
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

// Wraps schema violations (missing keys, wrong types) as input errors.
template <typename F>
auto guarded(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": " + e.what());
  }
}

std::string_view mode_name(SolveMode m) {
  return m == SolveMode::ExactIntersection ? "exact-intersection" : "radical-center";
}

SolveMode mode_from(const std::string& s) {
  if (s == "exact-intersection") return SolveMode::ExactIntersection;
  if (s == "radical-center") return SolveMode::RadicalCenter;
  throw Error(ErrorKind::InvalidInput, "unknown solve mode '" + s + "'");
}

json pairs(const std::vector<std::pair<int, int>>& v) {
  json a = json::array();
  for (auto [i, j] : v) a.push_back(json::array({i, j}));
  return a;
}

}  // namespace

MeshFormat parse_format(std::string_view name) {
  if (name == "json") return MeshFormat::Json;
  if (name == "vtk") return MeshFormat::Vtk;
  throw Error(ErrorKind::UnsupportedFormat, "unknown mesh format '" + std::string(name) + "' (json, vtk)");
}

std::string_view extension(MeshFormat format) { return format == MeshFormat::Json ? "json" : "vtk"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path + "': " + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoFailure, "read error on '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot create '" + path + "': " + std::strerror(errno));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error(ErrorKind::IoFailure, "write error on '" + path + "'");
}

std::string points_to_json(const PointSet& set) {
  auto j = header("cvmesh.points", set.dim);
  j["points"] = points_json(set);
  return dump(j);
}

PointSet points_from_json(std::string_view text) {
  const auto j = parse_document(text, "cvmesh.points");
  return guarded("points file", [&] {
    PointSet s;
    s.dim = j["dimension"].get<int>();
    s.points = points_from(j.at("points"), s.dim);
    return s;
  });
}

std::string simplices_to_json(const PointSet& set, std::span<const std::array<int, 4>> simplices) {
  auto j = header("cvmesh.triangulation", set.dim);
  j["points"] = points_json(set);
  json a = json::array();
  for (const auto& s : simplices) {
    json t = json::array();
    for (int k = 0; k <= set.dim; ++k) t.push_back(s[k]);
    a.push_back(t);
  }
  j["simplices"] = a;
  return dump(j);
}

std::string radii_to_json(const RadiiFile& file) {
  const auto& s = file.solution;
  auto j = header("cvmesh.radii", file.points.dim);
  j["points"] = points_json(file.points);
  j["radii"] = s.r;
  j["mode"] = mode_name(s.mode);
  j["equal_radii"] = s.equal_radii;
  json b = json::array();
  for (const auto& x : s.bounds) b.push_back({{"lo", x.lo}, {"hi", x.hi}, {"blocking", x.blocking}, {"relaxed", x.relaxed}});
  j["bounds"] = b;
  j["relaxed"] = s.relaxed;
  j["objective"] = s.objective;
  j["max_residual"] = s.max_residual;
  j["converged"] = s.converged;
  j["evaluations"] = s.evaluations;
  return dump(j);
}

RadiiFile radii_from_json(std::string_view text) {
  const auto j = parse_document(text, "cvmesh.radii");
  return guarded("radii file", [&] {
    RadiiFile f;
    f.points.dim = j["dimension"].get<int>();
    f.points.points = points_from(j.at("points"), f.points.dim);
    auto& s = f.solution;
    s.r = j.at("radii").get<std::vector<double>>();
    if (s.r.size() != f.points.points.size())
      throw Error(ErrorKind::InvalidInput, "radii file: radius count differs from point count");
    s.mode = mode_from(j.at("mode").get<std::string>());
    s.equal_radii = j.value("equal_radii", false);
    for (const auto& b : j.value("bounds", json::array()))
      s.bounds.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(), b.at("blocking").get<int>(),
                          b.at("relaxed").get<bool>()});
    s.relaxed = j.value("relaxed", std::vector<int>{});
    s.objective = j.value("objective", 0.0);
    s.max_residual = j.value("max_residual", 0.0);
    s.converged = j.value("converged", true);
    s.evaluations = j.value("evaluations", 0L);
    return f;
  });
}

ValidationResult validate_mesh(const ControlVolumeMesh& mesh, double tol_perp, const GlobalOptions& options) {
  ValidationResult v;
  v.tol_perp = tol_perp;
  v.perpendicularity = validate_perpendicularity(mesh, tol_perp);
  v.global = validate_global(mesh, options);
  v.diagnostics = mesh.diagnostics;
  return v;
}

namespace {

json validation_json(const ValidationResult& v) {
  const auto& p = v.perpendicularity;
  const auto& g = v.global;
  json viol = json::array();
  for (const auto& x : p.violations) viol.push_back({{"i", x.i}, {"j", x.j}, {"deviation", x.deviation}});
  json diag = json::array();
  for (const auto& d : v.diagnostics) diag.push_back({{"cell", d.owner}, {"kind", to_string(d.kind)}, {"detail", d.detail}});
  json foreign = json::array();
  for (auto [c, i] : g.foreign_points) foreign.push_back({{"cell", c}, {"point", i}});
  return {
      {"ok", v.ok()},
      {"perpendicularity",
       {{"tol", v.tol_perp},
        {"checked", p.checked},
        {"skipped", p.skipped},
        {"max_deviation", p.max_deviation},
        {"violation_count", p.violations.size()},
        {"violations", viol}}},
      {"global",
       {{"ok", g.ok()},
        {"shared_mismatch", pairs(g.shared_mismatch)},
        {"probes", g.probes},
        {"overlapping_probes", g.overlapping_probes},
        {"overlapping_cells", pairs(g.overlapping_cells)},
        {"uncovered_probes", g.uncovered_probes},
        {"owner_outside", g.owner_outside},
        {"foreign_points", foreign},
        {"measure_sum", g.measure_sum},
        {"domain_measure", g.domain_measure},
        {"measure_rel_error", g.measure_rel_error}}},
      {"diagnostics", diag},
  };
}

}  // namespace

std::string validation_to_json(const ValidationResult& result) {
  auto j = validation_json(result);
  j["schema"] = "cvmesh.validation";
  j["version"] = kSchemaVersion;
  return dump(j);
}

std::string mesh_to_json(const ControlVolumeMesh& mesh, const ValidationResult* report) {
  const int d = mesh.dim;
  auto j = header("cvmesh.mesh", d);
  j["points"] = points_json({d, mesh.points});
  j["radii"] = mesh.radii;
  json simp = json::array();
  for (const auto& s : mesh.simplices) {
    json t = json::array();
    for (int k = 0; k <= d; ++k) t.push_back(s[k]);
    simp.push_back(t);
  }
  j["simplices"] = simp;

  json dom;
  if (d == 2) {
    json poly = json::array();
    for (auto p : mesh.domain2.polygon) poly.push_back(json::array({p.x, p.y}));
    dom["polygon"] = poly;
  } else {
    json planes = json::array();
    for (const auto& pl : mesh.domain3.planes) planes.push_back(json::array({pl.n.x, pl.n.y, pl.n.z, pl.c}));
    dom["planes"] = planes;
  }
  dom["measure"] = mesh.domain_measure;
  dom["lo"] = vec(mesh.domain_lo, d);
  dom["hi"] = vec(mesh.domain_hi, d);
  j["domain"] = dom;

  j["vertices"] = points_json({d, mesh.vertices});
  j["vertex_simplex"] = mesh.vertex_simplex;

  json cells = json::array();
  for (const auto& v : mesh.volumes) {
    json c = {{"owner", v.owner}, {"closed", v.closed}};
    if (d == 2) {
      c["loop"] = v.vertices;
      c["edge_tags"] = v.edge_tags;
    } else {
      c["vertices"] = v.vertices;
      json faces = json::array();
      for (const auto& f : v.faces) faces.push_back({{"neighbor", f.neighbor}, {"loop", f.loop}});
      c["faces"] = faces;
    }
    cells.push_back(c);
  }
  j["cells"] = cells;

  json shared = json::array();
  for (const auto& [k, ids] : mesh.shared) shared.push_back({{"cells", json::array({k.first, k.second})}, {"vertices", ids}});
  j["shared"] = shared;

  json diag = json::array();
  for (const auto& x : mesh.diagnostics) diag.push_back({{"cell", x.owner}, {"kind", to_string(x.kind)}, {"detail", x.detail}});
  j["diagnostics"] = diag;

  if (report) j["validation"] = validation_json(*report);
  return dump(j);
}

ControlVolumeMesh mesh_from_json(std::string_view text) {
  const auto j = parse_document(text, "cvmesh.mesh");
  return guarded("mesh file", [&] {
    ControlVolumeMesh m;
    const int d = m.dim = j["dimension"].get<int>();
    m.points = points_from(j.at("points"), d);
    m.radii = j.at("radii").get<std::vector<double>>();
    for (const auto& s : j.at("simplices")) {
      std::array<int, 4> t{-1, -1, -1, -1};
      if (static_cast<int>(s.size()) != d + 1) throw Error(ErrorKind::InvalidInput, "mesh file: bad simplex arity");
      for (int k = 0; k <= d; ++k) t[k] = s[k].get<int>();
      m.simplices.push_back(t);
    }
    const auto& dom = j.at("domain");
    if (d == 2) {
      for (const auto& p : dom.at("polygon")) m.domain2.polygon.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    } else {
      for (const auto& p : dom.at("planes"))
        m.domain3.planes.push_back({{p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()}, p.at(3).get<double>()});
    }
    m.domain_measure = dom.at("measure").get<double>();
    m.domain_lo = vec_from(dom.at("lo"), d);
    m.domain_hi = vec_from(dom.at("hi"), d);

    m.vertices = points_from(j.at("vertices"), d);
    m.vertex_simplex = j.at("vertex_simplex").get<std::vector<int>>();
    if (m.vertex_simplex.size() != m.vertices.size())
      throw Error(ErrorKind::InvalidInput, "mesh file: vertex_simplex length differs from vertex count");

    const int nv = static_cast<int>(m.vertices.size());
    auto check_ids = [&](const std::vector<int>& ids) {
      for (int v : ids)
        if (v < 0 || v >= nv) throw Error(ErrorKind::InvalidInput, "mesh file: vertex index out of range", {v});
    };
    for (const auto& c : j.at("cells")) {
      ControlVolume v;
      v.owner = c.at("owner").get<int>();
      v.closed = c.at("closed").get<bool>();
      if (d == 2) {
        v.vertices = c.at("loop").get<std::vector<int>>();
        v.edge_tags = c.at("edge_tags").get<std::vector<int>>();
      } else {
        v.vertices = c.at("vertices").get<std::vector<int>>();
        for (const auto& f : c.at("faces")) {
          v.faces.push_back({f.at("neighbor").get<int>(), f.at("loop").get<std::vector<int>>()});
          check_ids(v.faces.back().loop);
        }
      }
      check_ids(v.vertices);
      m.volumes.push_back(std::move(v));
    }
    for (const auto& s : j.at("shared")) {
      const auto& c = s.at("cells");
      m.shared[{c.at(0).get<int>(), c.at(1).get<int>()}] = s.at("vertices").get<std::vector<int>>();
    }
    for (const auto& x : j.at("diagnostics"))
      m.diagnostics.push_back({x.at("cell").get<int>(), kind_from_string(x.at("kind").get<std::string>()),
                               x.at("detail").get<std::string>()});
    return m;
  });
}

namespace {

bool has_cells(const ControlVolumeMesh& mesh) {
  for (const auto& v : mesh.volumes)
    if (!v.vertices.empty()) return true;
  return false;
}

}  // namespace

void export_mesh(const ControlVolumeMesh& mesh, MeshFormat format, const std::string& path, const ValidationResult* report) {
  if (mesh.vertices.empty() || !has_cells(mesh)) throw Error(ErrorKind::InvalidInput, "refusing to export an empty mesh");
  write_file(path, format == MeshFormat::Json ? mesh_to_json(mesh, report) : mesh_to_vtk(mesh));
}

ControlVolumeMesh import_mesh(const std::string& path) { return mesh_from_json(read_file(path)); }

}  // namespace cvmesh
