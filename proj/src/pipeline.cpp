#include "cvmesh/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>

#include "json.hpp"

namespace cvmesh {

using nlohmann::json;

void RunConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidInput, "config: " + what); };
  if (dim != 2 && dim != 3) bad("dimension must be 2 or 3");
  if (!points_path && n < 1) bad("point count must be positive");
  for (int k = 0; k < dim; ++k) {
    const double a = k == 0 ? lo.x : k == 1 ? lo.y : lo.z;
    const double b = k == 0 ? hi.x : k == 1 ? hi.y : hi.z;
    if (!(std::isfinite(a) && std::isfinite(b) && a < b)) bad("domain box must have lo < hi on every axis");
  }
  if (!(min_sep_factor >= 0)) bad("min_sep_factor must be non-negative");
  if (!(tol_perp > 0)) bad("tol_perp must be positive");
  if (!(residual_threshold > 0)) bad("residual threshold must be positive");
  if (probes < 1) bad("probe count must be positive");
  if (search.mu < 1 || search.lambda < search.mu || search.generations < 0 || !(search.sigma > 0))
    bad("optimizer needs mu >= 1, lambda >= mu, generations >= 0, sigma > 0");
  if (out_dir.empty()) bad("output directory is empty");
}

std::vector<Vec3> generate_points(const RunConfig& config) {
  config.validate();
  const int d = config.dim;
  const Vec3 ext = config.hi - config.lo;
  const double side = d == 2 ? std::min(ext.x, ext.y) : std::min({ext.x, ext.y, ext.z});
  const double sep = config.min_sep_factor * side / std::pow(static_cast<double>(config.n), 1.0 / d);
  const double sep2 = sep * sep;

  opt::Rng rng(config.seed);
  std::vector<Vec3> pts;
  const long budget = 1000L * config.n;
  long draws = 0;
  while (static_cast<int>(pts.size()) < config.n) {
    if (++draws > budget)
      throw Error(ErrorKind::RejectionBudgetExceeded,
                  "placed " + std::to_string(pts.size()) + " of " + std::to_string(config.n) +
                      " points before the draw budget ran out");
    Vec3 p{rng.uniform(config.lo.x, config.hi.x), rng.uniform(config.lo.y, config.hi.y), 0.0};
    if (d == 3) p.z = rng.uniform(config.lo.z, config.hi.z);
    bool ok = true;
    for (const auto& q : pts)
      if (norm2(p - q) < sep2) {
        ok = false;
        break;
      }
    if (ok) pts.push_back(p);
  }
  return pts;
}

namespace {

std::string_view mode_name(SolveMode m) { return m == SolveMode::ExactIntersection ? "exact" : "radical"; }

json config_json(const RunConfig& c) {
  json j = {
      {"dimension", c.dim},
      {"seed", c.seed},
      {"lo", json::array({c.lo.x, c.lo.y, c.lo.z})},
      {"hi", json::array({c.hi.x, c.hi.y, c.hi.z})},
      {"mode", mode_name(c.mode)},
      {"equal_radii", c.equal_radii},
      {"bounds", c.bounds == BoundsPolicy::Strict ? "strict" : "relaxed"},
      {"min_sep_factor", c.min_sep_factor},
      {"tol_perp", c.tol_perp},
      {"residual_threshold", c.residual_threshold},
      {"probes", c.probes},
      {"optimizer",
       {{"mu", c.search.mu},
        {"lambda", c.search.lambda},
        {"generations", c.search.generations},
        {"sigma", c.search.sigma},
        {"sigma_decay", c.search.sigma_decay}}},
  };
  if (c.points_path) j["points_path"] = *c.points_path;
  else j["n"] = c.n;
  return j;
}

std::string indices_text(const std::vector<int>& idx) {
  std::string s;
  for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? ", " : "") + std::to_string(idx[k]);
  return s;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
  PipelineResult res;
  json summary = {{"schema", "cvmesh.summary"}, {"version", kSchemaVersion}, {"config", config_json(config)}};
  json timings = json::object();
  std::string stage = "config";
  namespace fs = std::filesystem;
  using clock = std::chrono::steady_clock;

  auto run = [&](const std::string& name, const std::function<void()>& fn) {
    stage = name;
    const auto t0 = clock::now();
    fn();
    timings[name] = std::chrono::duration<double>(clock::now() - t0).count();
  };

  try {
    config.validate();
    run("prepare", [&] {
      std::error_code ec;
      fs::create_directories(config.out_dir, ec);
      if (ec) throw Error(ErrorKind::IoFailure, "cannot create '" + config.out_dir + "': " + ec.message());
    });
    auto out = [&](const std::string& file) { return (fs::path(config.out_dir) / file).string(); };

    PointSet points{config.dim, {}};
    if (config.points_path) {
      run("load", [&] {
        points = points_from_json(read_file(*config.points_path));
        if (points.dim != config.dim)
          throw Error(ErrorKind::DimensionMismatch, "points file is " + std::to_string(points.dim) + "D, config is " +
                                                        std::to_string(config.dim) + "D");
      });
    } else {
      run("generate", [&] {
        points.points = generate_points(config);
        write_file(out("points.json"), points_to_json(points));
        res.artifacts.push_back(out("points.json"));
      });
    }
    summary["points"] = points.points.size();

    SolveOptions so;
    so.mode = config.mode;
    so.seed = config.seed;
    so.bounds = config.bounds;
    so.equal_radii = config.equal_radii;
    so.search = config.search;

    ControlVolumeMesh mesh;
    RadiusSolution sol;
    if (config.dim == 2) {
      std::vector<Vec2> p2;
      for (auto p : points.points) p2.push_back(drop(p));
      Triangulation2 tri;
      NeighborMap2 nm;
      run("triangulate", [&] {
        tri = triangulate2(p2);
        nm = neighbor_map(tri);
      });
      summary["simplices"] = tri.triangles.size();
      run("bounds", [&] { all_radius_bounds(nm, std::span<const Vec2>(p2), config.equal_radii ? BoundsPolicy::Relaxed : config.bounds); });
      run("solve", [&] { sol = solve_radii(tri, nm, so); });
      run("build", [&] {
        mesh = config.points_path ? build_volumes2(tri, nm, sol.r, BuildMode::Collect)
                                  : build_volumes2(tri, nm, sol.r, Domain2::box(drop(config.lo), drop(config.hi)), BuildMode::Collect);
      });
    } else {
      Triangulation3 tet;
      NeighborMap3 nm;
      run("triangulate", [&] {
        tet = tetrahedralize3(points.points);
        nm = neighbor_map(tet);
      });
      summary["simplices"] = tet.tetrahedra.size();
      run("bounds", [&] { all_radius_bounds(nm, std::span<const Vec3>(points.points), config.equal_radii ? BoundsPolicy::Relaxed : config.bounds); });
      run("solve", [&] { sol = solve_radii(tet, nm, so); });
      run("build", [&] {
        mesh = config.points_path ? build_volumes3(tet, nm, sol.r, BuildMode::Collect)
                                  : build_volumes3(tet, nm, sol.r, Domain3::box(config.lo, config.hi), BuildMode::Collect);
      });
    }
    summary["solver"] = {
        {"mode", mode_name(sol.mode)},     {"equal_radii", sol.equal_radii},
        {"relaxed_points", sol.relaxed},   {"objective", sol.objective},
        {"max_residual", sol.max_residual}, {"converged", sol.converged},
        {"evaluations", sol.evaluations},
    };
    summary["residual"] = sol.objective;
    res.solution = sol;

    ValidationResult val;
    run("validate", [&] { val = validate_mesh(mesh, config.tol_perp, {config.probes, config.seed}); });
    summary["violations"] = {
        {"perpendicularity", val.perpendicularity.violations.size()},
        {"max_deviation", val.perpendicularity.max_deviation},
        {"cell_diagnostics", val.diagnostics.size()},
        {"shared_mismatch", val.global.shared_mismatch.size()},
        {"overlapping_probes", val.global.overlapping_probes},
        {"uncovered_probes", val.global.uncovered_probes},
        {"owner_outside", val.global.owner_outside.size()},
        {"foreign_points", val.global.foreign_points.size()},
        {"measure_rel_error", val.global.measure_rel_error},
    };
    summary["valid"] = val.ok();

    run("export", [&] {
      for (auto f : config.formats) {
        const auto path = out("mesh." + std::string(extension(f)));
        export_mesh(mesh, f, path, &val);
        res.artifacts.push_back(path);
      }
    });
    if (config.render) {
      run("render", [&] {
        auto opts = config.svg;
        opts.residual = sol.max_residual;
        write_file(out("mesh.svg"), render_svg(mesh, opts));
        res.artifacts.push_back(out("mesh.svg"));
      });
    }

    const bool solved = config.mode != SolveMode::ExactIntersection || config.equal_radii ||
                        sol.objective < config.residual_threshold;
    char buf[160];
    std::snprintf(buf, sizeof buf, "objective %.3e, max residual %.3e, %zu perpendicularity violations", sol.objective,
                  sol.max_residual, val.perpendicularity.violations.size());
    res.message = buf;
    if (!solved) {
      res.exit_code = kExitNotConverged;
      res.message += "; objective above threshold";
    } else if (!val.ok()) {
      res.message += "; validation failed";
      if (!config.allow_invalid) res.exit_code = kExitInvalid;
    }
    stage.clear();
    res.mesh = std::move(mesh);
    res.validation = std::move(val);
  } catch (const Error& e) {
    res.exit_code = kExitInputError;
    res.stage = stage;
    res.message = "stage " + stage + ": " + e.what();
    if (!e.indices().empty()) res.message += " (indices: " + indices_text(e.indices()) + ")";
    summary["error"] = {{"stage", stage}, {"kind", to_string(e.kind())}, {"message", e.what()}, {"indices", e.indices()}};
  } catch (const std::exception& e) {
    res.exit_code = kExitInputError;
    res.stage = stage;
    res.message = "stage " + stage + ": " + e.what();
    summary["error"] = {{"stage", stage}, {"kind", "Internal"}, {"message", e.what()}, {"indices", json::array()}};
  }

  summary["exit_code"] = res.exit_code;
  summary["timings"] = timings;
  summary["artifacts"] = res.artifacts;
  res.summary = summary.dump(1) + "\n";
  if (res.stage != "config" && res.stage != "prepare") {
    try {
      write_file((fs::path(config.out_dir) / "summary.json").string(), res.summary);
    } catch (const Error& e) {
      if (res.exit_code == kExitOk) {
        res.exit_code = kExitInputError;
        res.stage = "summary";
        res.message = std::string("stage summary: ") + e.what();
      }
    }
  }
  return res;
}

}  // namespace cvmesh
