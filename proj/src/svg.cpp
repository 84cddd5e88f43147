#include <cstdio>
#include <fstream>

#include "xfield/layout.hpp"

namespace xf {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void path_element(std::ofstream& out, const std::vector<Point2>& pts, bool closed,
                  const std::string& stroke, double width) {
  if (pts.size() < 2) return;
  out << "<path d=\"M " << fmt(pts[0].x) << " " << fmt(pts[0].y);
  for (size_t i = 1; i < pts.size(); ++i) out << " L " << fmt(pts[i].x) << " " << fmt(pts[i].y);
  if (closed) out << " Z";
  out << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(width) << "\"/>\n";
}

}  // namespace

void export_svg(const TriMesh& mesh, const ComplexField* u, const QuadLayout* layout,
                const std::vector<Singularity>& singularities, const std::string& path,
                const SvgOptions& options) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write svg file: " + path);

  Vec2 span = mesh.bbox_max - mesh.bbox_min;
  double pad = 0.05 * std::max(span.x, span.y);
  double w = span.x + 2 * pad, h = span.y + 2 * pad;
  double thin = 0.0015 * std::max(w, h);
  double marker = 0.008 * std::max(w, h);

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(mesh.bbox_min.x - pad)
      << " " << fmt(-(mesh.bbox_max.y + pad)) << " " << fmt(w) << " " << fmt(h) << "\">\n";
  // flip y so the domain reads with y up; 1 user unit = 1 domain unit
  out << "<g transform=\"scale(1,-1)\">\n";

  if (options.draw_mesh) {
    for (const auto& t : mesh.triangles) {
      std::vector<Point2> tri = {mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
      path_element(out, tri, true, "#dddddd", thin * 0.5);
    }
  }

  if (options.draw_streamlines && u != nullptr) {
    PointLocator locator(mesh);
    TraceParams params = TraceParams::defaults(mesh);
    params.max_length = 4.0 * mesh.diameter();
    int stride = std::max(1, mesh.face_count() / std::max(1, options.streamline_seeds));
    for (int f = 0; f < mesh.face_count(); f += stride) {
      Point2 seed = mesh.triangle_barycenter(f);
      for (double base : {0.0, kPi / 2.0}) {
        try {
          CrossSample cs = sample_cross(locator, *u, seed);
          Vec2 d = dir_of(cs.directions[0] + base);
          Streamline fwd = trace_streamline(locator, *u, seed, d, params, singularities);
          path_element(out, fwd.points, false, "#c9d6e8", thin);
          Streamline bwd = trace_streamline(locator, *u, seed, -d, params, singularities);
          path_element(out, bwd.points, false, "#c9d6e8", thin);
        } catch (const Error&) {
          // seed too close to a singularity or outside; skip
        }
      }
    }
  }

  // domain boundary
  for (const auto& loop : mesh.boundary_loops) {
    std::vector<Point2> pts;
    for (int v : loop.vertex_ids) pts.push_back(mesh.vertices[v]);
    path_element(out, pts, true, "#000000", thin * 2.0);
  }

  if (options.draw_arcs && layout != nullptr) {
    for (const auto& arc : layout->arcs) {
      const char* color = "#1f4e9c";
      if (arc.source_kind == Curve::Kind::Boundary) continue;  // drawn above
      if (arc.source_kind == Curve::Kind::LimitCycle) color = "#d97706";
      path_element(out, arc.polyline, false, color, thin * 2.0);
    }
    for (const auto& t : layout->t_junctions) {
      if (t.node < 0) continue;
      Point2 p = layout->nodes[t.node].position;
      out << "<circle cx=\"" << fmt(p.x) << "\" cy=\"" << fmt(p.y) << "\" r=\"" << fmt(marker)
          << "\" fill=\"none\" stroke=\"#7b2d8b\" stroke-width=\"" << fmt(thin * 2.0)
          << "\"/>\n";
    }
    for (const auto& n : layout->nodes) {
      if (n.kind != NodeKind::Corner) continue;
      out << "<rect x=\"" << fmt(n.position.x - 0.6 * marker) << "\" y=\""
          << fmt(n.position.y - 0.6 * marker) << "\" width=\"" << fmt(1.2 * marker)
          << "\" height=\"" << fmt(1.2 * marker) << "\" fill=\"#000000\"/>\n";
    }
  }

  if (options.draw_singularities) {
    for (const auto& s : singularities) {
      const char* color = s.rep_degree > 0 ? "#00bcd4" : "#d62728";  // cyan +, red -
      out << "<circle cx=\"" << fmt(s.location.x) << "\" cy=\"" << fmt(s.location.y) << "\" r=\""
          << fmt(marker) << "\" fill=\"" << color << "\"/>\n";
    }
  }

  out << "</g>\n</svg>\n";
}

}  // namespace xf
