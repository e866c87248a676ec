#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvmesh/mesh.hpp"
#include "cvmesh/radius.hpp"

namespace cvmesh {

enum class MeshFormat { Json, Vtk };

/// "json" or "vtk"; anything else raises UnsupportedFormat.
MeshFormat parse_format(std::string_view name);
std::string_view extension(MeshFormat format);

/// Whole-file helpers; failures raise IoFailure with the path in the message.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Every JSON document carries "schema" and "version" ("major.minor").
// Readers reject other schemas and other major versions with UnsupportedFormat.
inline constexpr std::string_view kSchemaVersion = "1.0";

struct PointSet {
  int dim = 2;
  std::vector<Vec3> points;  // z = 0 in 2D
};

std::string points_to_json(const PointSet& set);
PointSet points_from_json(std::string_view text);

/// Triangulation of a point set, kept for inspection.
std::string simplices_to_json(const PointSet& set, std::span<const std::array<int, 4>> simplices);

struct RadiiFile {
  PointSet points;
  RadiusSolution solution;
};

std::string radii_to_json(const RadiiFile& file);
RadiiFile radii_from_json(std::string_view text);

struct ValidationResult {
  double tol_perp = 1e-6;
  PerpendicularityReport perpendicularity;
  GlobalReport global;
  std::vector<CellDiagnostic> diagnostics;

  bool ok() const { return perpendicularity.ok() && global.ok() && diagnostics.empty(); }
};

ValidationResult validate_mesh(const ControlVolumeMesh& mesh, double tol_perp, const GlobalOptions& options = {});
std::string validation_to_json(const ValidationResult& result);

/// JSON round-trips bit-exactly through mesh_from_json. The optional report
/// is written under "validation" and ignored on import.
std::string mesh_to_json(const ControlVolumeMesh& mesh, const ValidationResult* report = nullptr);
ControlVolumeMesh mesh_from_json(std::string_view text);

/// Legacy ASCII VTK: POLYDATA polygons in 2D, POLYHEDRON cells (type 42)
/// of an UNSTRUCTURED_GRID in 3D. Cells without vertices are skipped; the
/// owner cell-data array says which point each written cell belongs to.
std::string mesh_to_vtk(const ControlVolumeMesh& mesh);

/// Serializes and writes in one step. An empty mesh raises InvalidInput and
/// nothing is written.
void export_mesh(const ControlVolumeMesh& mesh, MeshFormat format, const std::string& path,
                 const ValidationResult* report = nullptr);
ControlVolumeMesh import_mesh(const std::string& path);

struct SvgOptions {
  bool points = true;
  bool edges = true;    // Delaunay triangulation
  bool circles = true;  // radius r_i around every point
  bool cells = true;    // control-volume polygons
  int width = 800;
  std::optional<double> residual;  // printed as a caption when set
};

/// Comma-separated subset of "points,edges,circles,cells" ("all" for every layer).
SvgOptions parse_layers(std::string_view layers);

/// 2D meshes only (DimensionMismatch otherwise). Output depends only on the
/// mesh and the options.
std::string render_svg(const ControlVolumeMesh& mesh, const SvgOptions& options = {});

}  // namespace cvmesh
