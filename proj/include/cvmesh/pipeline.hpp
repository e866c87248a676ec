#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvmesh/io.hpp"

namespace cvmesh {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;         // validation failed
inline constexpr int kExitNotConverged = 3;    // exact solve above the residual threshold
inline constexpr int kExitInputError = 4;      // any stage raised an error

struct RunConfig {
  int dim = 2;
  int n = 50;
  std::uint64_t seed = 1;
  Vec3 lo{0, 0, 0};  // point box, also the meshing domain
  Vec3 hi{1, 1, 1};
  std::optional<std::string> points_path;  // load instead of generating
  double min_sep_factor = 0.2;              // see generate_points

  SolveMode mode = SolveMode::RadicalCenter;
  bool equal_radii = false;
  BoundsPolicy bounds = BoundsPolicy::Relaxed;
  opt::SoftSelectionParams search;

  double tol_perp = 1e-6;
  double residual_threshold = 1e-8;
  int probes = 10000;

  std::string out_dir = "out";
  std::vector<MeshFormat> formats{MeshFormat::Json, MeshFormat::Vtk};
  bool render = false;
  SvgOptions svg;
  bool allow_invalid = false;

  /// Raises InvalidInput naming the first bad field.
  void validate() const;
};

/// N points uniform in the box, drawn coordinate by coordinate from the
/// seeded generator. A candidate closer than min_sep_factor * side / N^(1/d) to an
/// accepted point is redrawn (side = shortest box side); more than 1000 * N
/// draws raise RejectionBudgetExceeded.
std::vector<Vec3> generate_points(const RunConfig& config);

struct PipelineResult {
  int exit_code = kExitOk;
  std::string stage;    // failing stage, empty when every stage ran
  std::string message;  // one-line status
  std::vector<std::string> artifacts;
  std::string summary;  // summary.json contents
  std::optional<RadiusSolution> solution;
  std::optional<ControlVolumeMesh> mesh;
  std::optional<ValidationResult> validation;
};

/// generate/load -> triangulate -> bounds -> solve -> build -> validate ->
/// export [-> render]. Artifacts and summary.json go to config.out_dir.
/// Errors do not escape: they end the run with kExitInputError and the
/// result names the stage, the error and its indices.
PipelineResult run_pipeline(const RunConfig& config);

}  // namespace cvmesh
