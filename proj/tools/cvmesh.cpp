// Command-line driver: one subcommand per pipeline stage plus `run`.

#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvmesh/pipeline.hpp"

using namespace cvmesh;

namespace {

const std::map<std::string, SolveMode> kModes{{"exact", SolveMode::ExactIntersection},
                                              {"radical", SolveMode::RadicalCenter}};
const std::map<std::string, BoundsPolicy> kBounds{{"strict", BoundsPolicy::Strict}, {"relaxed", BoundsPolicy::Relaxed}};

struct Args {
  RunConfig cfg;
  std::vector<double> lo, hi;
  std::vector<std::string> formats{"json", "vtk"};
  std::string layers = "all";
  std::string in, out;
  std::string mode = "radical";
  std::string bounds = "relaxed";
};

void box_options(CLI::App* app, Args& a) {
  app->add_option("--lo", a.lo, "Domain box lower corner (d values)")->expected(2, 3);
  app->add_option("--hi", a.hi, "Domain box upper corner (d values)")->expected(2, 3);
}

void point_options(CLI::App* app, Args& a) {
  app->add_option("--dim", a.cfg.dim, "Dimension")->check(CLI::IsMember({2, 3}));
  app->add_option("--n", a.cfg.n, "Number of points")->check(CLI::PositiveNumber);
  app->add_option("--seed", a.cfg.seed, "Random seed");
  box_options(app, a);
}

void solver_options(CLI::App* app, Args& a) {
  app->add_option("--mode", a.mode, "Radius solver")->check(CLI::IsMember({"exact", "radical"}));
  app->add_flag("--equal-radii", a.cfg.equal_radii, "Give every point the same radius (Voronoi mesh)");
  app->add_option("--bounds", a.bounds, "Empty radius interval: strict fails, relaxed uses (0, r_max)")
      ->check(CLI::IsMember({"strict", "relaxed"}));
  app->add_option("--residual-threshold", a.cfg.residual_threshold, "Exact mode succeeds below this objective");
  app->add_option("--mu", a.cfg.search.mu, "Soft selection parents");
  app->add_option("--lambda", a.cfg.search.lambda, "Soft selection offspring");
  app->add_option("--generations", a.cfg.search.generations, "Soft selection generations");
  app->add_option("--sigma", a.cfg.search.sigma, "Initial mutation width (fraction of interval)");
}

void validation_options(CLI::App* app, Args& a) {
  app->add_option("--tol-perp", a.cfg.tol_perp, "Perpendicularity tolerance in radians");
  app->add_option("--probes", a.cfg.probes, "Overlap probes");
  app->add_flag("--allow-invalid", a.cfg.allow_invalid, "Exit 0 even when validation fails");
}

// Copies the string-valued options into the config.
void finish(Args& a) {
  a.cfg.mode = kModes.at(a.mode);
  a.cfg.bounds = kBounds.at(a.bounds);
  auto corner = [&](const std::vector<double>& v, Vec3& c, const char* name) {
    if (v.empty()) return;
    if (static_cast<int>(v.size()) != a.cfg.dim)
      throw Error(ErrorKind::DimensionMismatch, std::string(name) + " needs " + std::to_string(a.cfg.dim) + " values");
    c = {v[0], v[1], v.size() > 2 ? v[2] : 0.0};
  };
  corner(a.lo, a.cfg.lo, "--lo");
  corner(a.hi, a.cfg.hi, "--hi");
  a.cfg.formats.clear();
  for (const auto& f : a.formats) a.cfg.formats.push_back(parse_format(f));
  a.cfg.svg = parse_layers(a.layers);
}

int fail(const std::string& stage, const Error& e) {
  std::fprintf(stderr, "error: stage %s: %s", stage.c_str(), e.what());
  if (!e.indices().empty()) {
    std::fprintf(stderr, " (indices:");
    for (std::size_t k = 0; k < e.indices().size(); ++k) std::fprintf(stderr, "%s %d", k ? "," : "", e.indices()[k]);
    std::fprintf(stderr, ")");
  }
  std::fprintf(stderr, "\n");
  return kExitInputError;
}

template <typename Tri>
Tri triangulate(const PointSet& s);

template <>
Triangulation2 triangulate(const PointSet& s) {
  std::vector<Vec2> p;
  for (auto q : s.points) p.push_back(drop(q));
  return triangulate2(p);
}

template <>
Triangulation3 triangulate(const PointSet& s) {
  return tetrahedralize3(s.points);
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.mode = c.mode;
  o.seed = c.seed;
  o.bounds = c.bounds;
  o.equal_radii = c.equal_radii;
  o.search = c.search;
  return o;
}

void print_solution(const RadiusSolution& s) {
  std::printf("objective %.6e  max residual %.6e  relaxed points %zu  evaluations %ld\n", s.objective, s.max_residual,
              s.relaxed.size(), s.evaluations);
}

int report_validation(const ValidationResult& v, bool allow_invalid) {
  const auto& g = v.global;
  std::printf(
      "perpendicularity violations %zu (max deviation %.3e rad)  cell diagnostics %zu  overlapping probes %ld  "
      "shared mismatches %zu  measure rel. error %.3e\n",
      v.perpendicularity.violations.size(), v.perpendicularity.max_deviation, v.diagnostics.size(), g.overlapping_probes,
      g.shared_mismatch.size(), g.measure_rel_error);
  if (v.ok()) return kExitOk;
  std::printf("validation failed\n");
  return allow_invalid ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Control-volume mesh generator: points, Delaunay, radii, cells"};
  app.set_config("--config", "", "TOML/INI file with option values (flags given on the command line win)");
  app.require_subcommand(1);
  Args a;
  std::function<int()> action;

  auto* gen = app.add_subcommand("gen", "Generate a seeded point cloud");
  point_options(gen, a);
  gen->add_option("--out", a.out, "Points file")->default_val("points.json");
  gen->callback([&] {
    action = [&] {
      finish(a);
      const auto pts = generate_points(a.cfg);
      write_file(a.out, points_to_json({a.cfg.dim, pts}));
      std::printf("%zu points -> %s\n", pts.size(), a.out.c_str());
      return kExitOk;
    };
  });

  auto* tri = app.add_subcommand("tri", "Delaunay triangulation of a points file");
  tri->add_option("--in", a.in, "Points file")->required();
  tri->add_option("--out", a.out, "Triangulation file")->default_val("tri.json");
  tri->callback([&] {
    action = [&] {
      const auto s = points_from_json(read_file(a.in));
      std::vector<std::array<int, 4>> simp;
      if (s.dim == 2) {
        for (const auto& t : triangulate<Triangulation2>(s).triangles) simp.push_back({t[0], t[1], t[2], -1});
      } else {
        simp = triangulate<Triangulation3>(s).tetrahedra;
      }
      write_file(a.out, simplices_to_json(s, simp));
      std::printf("%zu simplices -> %s\n", simp.size(), a.out.c_str());
      return kExitOk;
    };
  });

  auto* solve = app.add_subcommand("solve", "Solve the radii for a points file");
  solve->add_option("--in", a.in, "Points file")->required();
  solve->add_option("--out", a.out, "Radii file")->default_val("radii.json");
  solve->add_option("--seed", a.cfg.seed, "Optimizer seed");
  solver_options(solve, a);
  solve->callback([&] {
    action = [&] {
      finish(a);
      const auto s = points_from_json(read_file(a.in));
      RadiiFile f{s, {}};
      if (s.dim == 2) {
        const auto t = triangulate<Triangulation2>(s);
        f.solution = solve_radii(t, neighbor_map(t), solve_options(a.cfg));
      } else {
        const auto t = triangulate<Triangulation3>(s);
        f.solution = solve_radii(t, neighbor_map(t), solve_options(a.cfg));
      }
      write_file(a.out, radii_to_json(f));
      print_solution(f.solution);
      const bool exact = a.cfg.mode == SolveMode::ExactIntersection && !a.cfg.equal_radii;
      return exact && !(f.solution.objective < a.cfg.residual_threshold) ? kExitNotConverged : kExitOk;
    };
  });

  auto* build = app.add_subcommand("build", "Build control volumes from a radii file");
  build->add_option("--in", a.in, "Radii file")->required();
  build->add_option("--out", a.out, "Mesh file (JSON)")->default_val("mesh.json");
  box_options(build, a);
  build->callback([&] {
    action = [&] {
      const auto f = radii_from_json(read_file(a.in));
      a.cfg.dim = f.points.dim;
      finish(a);
      const bool box = !a.lo.empty() || !a.hi.empty();
      ControlVolumeMesh m;
      if (f.points.dim == 2) {
        const auto t = triangulate<Triangulation2>(f.points);
        m = box ? build_volumes2(t, neighbor_map(t), f.solution.r, Domain2::box(drop(a.cfg.lo), drop(a.cfg.hi)),
                                 BuildMode::Collect)
                : build_volumes2(t, neighbor_map(t), f.solution.r, BuildMode::Collect);
      } else {
        const auto t = triangulate<Triangulation3>(f.points);
        m = box ? build_volumes3(t, neighbor_map(t), f.solution.r, Domain3::box(a.cfg.lo, a.cfg.hi), BuildMode::Collect)
                : build_volumes3(t, neighbor_map(t), f.solution.r, BuildMode::Collect);
      }
      export_mesh(m, MeshFormat::Json, a.out);
      std::printf("%zu cells, %zu vertices, %zu cell diagnostics -> %s\n", m.volumes.size(), m.vertices.size(),
                  m.diagnostics.size(), a.out.c_str());
      return kExitOk;
    };
  });

  auto* validate = app.add_subcommand("validate", "Check perpendicularity, overlap and conservation");
  validate->add_option("--in", a.in, "Mesh file")->required();
  validate->add_option("--out", a.out, "Report file (optional)");
  validate->add_option("--seed", a.cfg.seed, "Probe seed");
  validation_options(validate, a);
  validate->callback([&] {
    action = [&] {
      const auto m = import_mesh(a.in);
      const auto v = validate_mesh(m, a.cfg.tol_perp, {a.cfg.probes, a.cfg.seed});
      if (!a.out.empty()) write_file(a.out, validation_to_json(v));
      return report_validation(v, a.cfg.allow_invalid);
    };
  });

  auto* exp = app.add_subcommand("export", "Convert a mesh file");
  exp->add_option("--in", a.in, "Mesh file")->required();
  exp->add_option("--out", a.out, "Output file")->required();
  std::string format = "vtk";
  exp->add_option("--format", format, "json or vtk");
  exp->callback([&] {
    action = [&] {
      export_mesh(import_mesh(a.in), parse_format(format), a.out);
      std::printf("-> %s\n", a.out.c_str());
      return kExitOk;
    };
  });

  auto* render = app.add_subcommand("render", "Draw a 2D mesh as SVG");
  render->add_option("--in", a.in, "Mesh file")->required();
  render->add_option("--out", a.out, "SVG file")->default_val("mesh.svg");
  render->add_option("--layers", a.layers, "Comma-separated: points,edges,circles,cells (or all)");
  render->callback([&] {
    action = [&] {
      const auto m = import_mesh(a.in);
      write_file(a.out, render_svg(m, parse_layers(a.layers)));
      std::printf("-> %s\n", a.out.c_str());
      return kExitOk;
    };
  });

  auto* run = app.add_subcommand("run", "Whole pipeline: generate, solve, build, validate, export");
  point_options(run, a);
  solver_options(run, a);
  validation_options(run, a);
  run->add_option("--points", a.in, "Use this points file instead of generating");
  run->add_option("--out", a.cfg.out_dir, "Output directory")->default_val("out");
  run->add_option("--format", a.formats, "Mesh formats to write (json, vtk)")->delimiter(',');
  run->add_flag("--render", a.cfg.render, "Also write mesh.svg (2D)");
  run->add_option("--layers", a.layers, "SVG layers for --render");
  run->callback([&] {
    action = [&] {
      finish(a);
      if (!a.in.empty()) a.cfg.points_path = a.in;
      const auto res = run_pipeline(a.cfg);
      if (res.exit_code == kExitInputError) {
        std::fprintf(stderr, "error: %s\n", res.message.c_str());
        return res.exit_code;
      }
      if (res.solution) std::printf("max per-simplex residual %.6e\n", res.solution->max_residual);
      std::printf("%s\n", res.message.c_str());
      for (const auto& p : res.artifacts) std::printf("wrote %s\n", p.c_str());
      return res.exit_code;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }
  std::string stage = app.get_subcommands().front()->get_name();
  try {
    return action();
  } catch (const Error& e) {
    return fail(stage, e);
  }
}
