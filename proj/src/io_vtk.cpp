#include <cstdio>
#include <string>

#include "cvmesh/io.hpp"

namespace cvmesh {

namespace {

void append(std::string& out, const char* fmt, auto... args) {
  char buf[128];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  out.append(buf, static_cast<std::size_t>(n));
}

void cell_data(std::string& out, const ControlVolumeMesh& mesh, const std::vector<int>& written) {
  append(out, "CELL_DATA %zu\nSCALARS owner int 1\nLOOKUP_TABLE default\n", written.size());
  for (int c : written) append(out, "%d\n", mesh.volumes[c].owner);
  out += "SCALARS radius double 1\nLOOKUP_TABLE default\n";
  for (int c : written) {
    const int o = mesh.volumes[c].owner;
    append(out, "%.17g\n", o >= 0 && o < static_cast<int>(mesh.radii.size()) ? mesh.radii[o] : 0.0);
  }
}

}  // namespace

std::string mesh_to_vtk(const ControlVolumeMesh& mesh) {
  std::string out = "# vtk DataFile Version 3.0\ncvmesh control volumes\nASCII\n";
  out += mesh.dim == 2 ? "DATASET POLYDATA\n" : "DATASET UNSTRUCTURED_GRID\n";
  append(out, "POINTS %zu double\n", mesh.vertices.size());
  for (auto p : mesh.vertices) append(out, "%.17g %.17g %.17g\n", p.x, p.y, p.z);

  std::vector<int> written;
  for (std::size_t c = 0; c < mesh.volumes.size(); ++c)
    if (!mesh.volumes[c].vertices.empty() && (mesh.dim == 2 || !mesh.volumes[c].faces.empty()))
      written.push_back(static_cast<int>(c));

  if (mesh.dim == 2) {
    std::size_t size = 0;
    for (int c : written) size += 1 + mesh.volumes[c].vertices.size();
    append(out, "POLYGONS %zu %zu\n", written.size(), size);
    for (int c : written) {
      const auto& vs = mesh.volumes[c].vertices;
      append(out, "%zu", vs.size());
      for (int v : vs) append(out, " %d", v);
      out += '\n';
    }
  } else {
    // Polyhedron entries are face streams: nfaces, then (npts, ids...) per face.
    std::size_t size = 0;
    for (int c : written) {
      size += 2;
      for (const auto& f : mesh.volumes[c].faces) size += 1 + f.loop.size();
    }
    append(out, "CELLS %zu %zu\n", written.size(), size);
    for (int c : written) {
      const auto& faces = mesh.volumes[c].faces;
      std::size_t n = 1;
      for (const auto& f : faces) n += 1 + f.loop.size();
      append(out, "%zu %zu", n, faces.size());
      for (const auto& f : faces) {
        append(out, " %zu", f.loop.size());
        for (int v : f.loop) append(out, " %d", v);
      }
      out += '\n';
    }
    append(out, "CELL_TYPES %zu\n", written.size());
    for (std::size_t k = 0; k < written.size(); ++k) out += "42\n";
  }
  cell_data(out, mesh, written);
  return out;
}

}  // namespace cvmesh
