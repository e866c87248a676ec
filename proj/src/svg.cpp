#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "cvmesh/io.hpp"

namespace cvmesh {

namespace {

void append(std::string& out, const char* fmt, auto... args) {
  char buf[256];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  out.append(buf, static_cast<std::size_t>(n));
}

struct Frame {
  double x0 = 0, y1 = 0, scale = 1, margin = 20;

  double x(double v) const { return margin + (v - x0) * scale; }
  double y(double v) const { return margin + (y1 - v) * scale; }  // SVG y runs downwards
};

}  // namespace

SvgOptions parse_layers(std::string_view layers) {
  SvgOptions o;
  if (layers == "all") return o;
  o.points = o.edges = o.circles = o.cells = false;
  std::size_t start = 0;
  while (start <= layers.size()) {
    const auto end = std::min(layers.find(',', start), layers.size());
    const auto name = layers.substr(start, end - start);
    if (name == "points") o.points = true;
    else if (name == "edges") o.edges = true;
    else if (name == "circles") o.circles = true;
    else if (name == "cells") o.cells = true;
    else if (!name.empty()) throw Error(ErrorKind::InvalidInput, "unknown SVG layer '" + std::string(name) + "'");
    start = end + 1;
  }
  return o;
}

std::string render_svg(const ControlVolumeMesh& mesh, const SvgOptions& options) {
  if (mesh.dim != 2) throw Error(ErrorKind::DimensionMismatch, "SVG rendering needs a 2D mesh; export 3D meshes to VTK");
  const Vec3 lo = mesh.domain_lo, hi = mesh.domain_hi;
  const double dx = hi.x - lo.x, dy = hi.y - lo.y;
  if (!(dx > 0 && dy > 0)) throw Error(ErrorKind::InvalidInput, "mesh has an empty domain");

  Frame f;
  f.x0 = lo.x;
  f.y1 = hi.y;
  f.scale = (options.width - 2 * f.margin) / std::max(dx, dy);
  const double width = 2 * f.margin + dx * f.scale;
  const double height = 2 * f.margin + dy * f.scale + (options.residual ? 20 : 0);

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  append(out,
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.0f\" height=\"%.0f\" "
         "viewBox=\"0 0 %.3f %.3f\">\n",
         std::ceil(width), std::ceil(height), width, height);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (options.cells) {
    out += "<g id=\"cells\" fill=\"#dce9f5\" fill-opacity=\"0.6\" stroke=\"#1f4e79\" stroke-width=\"1.2\">\n";
    out += "<path fill=\"none\" stroke=\"#888888\" d=\"";
    for (std::size_t k = 0; k < mesh.domain2.polygon.size(); ++k) {
      const auto p = mesh.domain2.polygon[k];
      append(out, "%s%.3f %.3f ", k == 0 ? "M" : "L", f.x(p.x), f.y(p.y));
    }
    out += "Z\"/>\n";
    for (const auto& v : mesh.volumes) {
      if (v.vertices.size() < 3) continue;
      append(out, "<polygon data-owner=\"%d\" points=\"", v.owner);
      for (std::size_t k = 0; k < v.vertices.size(); ++k) {
        const auto p = mesh.vertices[v.vertices[k]];
        append(out, "%s%.3f,%.3f", k == 0 ? "" : " ", f.x(p.x), f.y(p.y));
      }
      out += "\"/>\n";
    }
    out += "</g>\n";
  }

  if (options.edges) {
    std::set<std::pair<int, int>> edges;
    for (const auto& s : mesh.simplices)
      for (int k = 0; k < 3; ++k) edges.insert(std::minmax(s[k], s[(k + 1) % 3]));
    out += "<g id=\"edges\" stroke=\"#333333\" stroke-width=\"0.8\" stroke-dasharray=\"4 2\">\n";
    for (auto [i, j] : edges) {
      const auto a = mesh.points[i], b = mesh.points[j];
      append(out, "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\"/>\n", f.x(a.x), f.y(a.y), f.x(b.x), f.y(b.y));
    }
    out += "</g>\n";
  }

  if (options.circles) {
    out += "<g id=\"circles\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"0.8\">\n";
    for (std::size_t i = 0; i < mesh.points.size() && i < mesh.radii.size(); ++i) {
      const auto p = mesh.points[i];
      append(out, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\"/>\n", f.x(p.x), f.y(p.y), mesh.radii[i] * f.scale);
    }
    out += "</g>\n";
  }

  if (options.points) {
    out += "<g id=\"points\" fill=\"black\">\n";
    for (const auto& p : mesh.points) append(out, "<rect x=\"%.3f\" y=\"%.3f\" width=\"4\" height=\"4\"/>\n", f.x(p.x) - 2, f.y(p.y) - 2);
    out += "</g>\n";
  }

  if (options.residual)
    append(out, "<text x=\"%.3f\" y=\"%.3f\" font-family=\"monospace\" font-size=\"12\">max residual %.3e</text>\n",
           f.margin, height - 8, *options.residual);
  out += "</svg>\n";
  return out;
}

}  // namespace cvmesh
