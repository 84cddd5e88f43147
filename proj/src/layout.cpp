#include "xfield/layout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>

#include "json.hpp"

namespace xf {

namespace {

using Json = nlohmann::json;

struct InputCurve {
  Curve::Kind kind;
  std::vector<Point2> points;
  bool closed = false;
  std::vector<double> cumlen;  // per point
  double length = 0.0;

  void finish() {
    cumlen.resize(points.size());
    cumlen[0] = 0.0;
    for (size_t i = 1; i < points.size(); ++i)
      cumlen[i] = cumlen[i - 1] + dist(points[i - 1], points[i]);
    length = cumlen.back();
    if (closed) length += dist(points.back(), points.front());
  }
  size_t segment_count() const { return closed ? points.size() : points.size() - 1; }
  Point2 seg_a(size_t i) const { return points[i]; }
  Point2 seg_b(size_t i) const { return points[(i + 1) % points.size()]; }
  double param(size_t seg, double s) const {
    double base = cumlen[seg];
    return base + s * dist(seg_a(seg), seg_b(seg));
  }
  Point2 point_at(double t) const {
    if (t <= 0.0) return points.front();
    size_t n = segment_count();
    for (size_t i = 0; i < n; ++i) {
      double a = cumlen[i];
      double b = (i + 1 < points.size()) ? cumlen[i + 1] : length;
      if (t <= b || i == n - 1) {
        double L = b - a;
        double s = L > 0 ? std::clamp((t - a) / L, 0.0, 1.0) : 0.0;
        return seg_a(i) + s * (seg_b(i) - seg_a(i));
      }
    }
    return points.back();
  }
};

struct NodePool {
  double eps;
  std::vector<Point2> pts;
  std::vector<NodeKind> kinds;

  int get(Point2 p) {
    for (size_t i = 0; i < pts.size(); ++i)
      if (dist(pts[i], p) <= eps) return static_cast<int>(i);
    pts.push_back(p);
    kinds.push_back(NodeKind::CurveIntersection);
    return static_cast<int>(pts.size()) - 1;
  }
};

struct HalfEdge {
  int arc = -1;
  bool forward = true;
  int src = -1, dst = -1;
  double depart = 0.0;
};

Vec2 polyline_departure(const std::vector<Point2>& pts, bool forward) {
  if (forward) {
    for (size_t i = 1; i < pts.size(); ++i) {
      Vec2 d = pts[i] - pts[0];
      if (norm(d) > 1e-14) return normalized(d);
    }
  } else {
    size_t n = pts.size();
    for (size_t i = 1; i < n; ++i) {
      Vec2 d = pts[n - 1 - i] - pts[n - 1];
      if (norm(d) > 1e-14) return normalized(d);
    }
  }
  return {1.0, 0.0};
}

double cycle_signed_area(const QuadLayout& layout, const std::vector<int>& signed_arcs) {
  double area = 0.0;
  for (int sid : signed_arcs) {
    const auto& arc = layout.arcs[std::abs(sid) - 1];
    const auto& pts = arc.polyline;
    if (sid > 0) {
      for (size_t i = 0; i + 1 < pts.size(); ++i) area += cross(pts[i], pts[i + 1]);
    } else {
      for (size_t i = pts.size(); i-- > 1;) area += cross(pts[i], pts[i - 1]);
    }
  }
  return 0.5 * area;
}

std::vector<Point2> cycle_polygon(const QuadLayout& layout, const std::vector<int>& signed_arcs) {
  std::vector<Point2> poly;
  for (int sid : signed_arcs) {
    const auto& arc = layout.arcs[std::abs(sid) - 1];
    const auto& pts = arc.polyline;
    if (sid > 0)
      for (size_t i = 0; i + 1 < pts.size(); ++i) poly.push_back(pts[i]);
    else
      for (size_t i = pts.size(); i-- > 1;) poly.push_back(pts[i]);
  }
  return poly;
}

bool point_in_polygon(Point2 p, const std::vector<Point2>& poly) {
  bool inside = false;
  size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((poly[i].y > p.y) != (poly[j].y > p.y)) {
      double x = poly[j].x + (p.y - poly[j].y) / (poly[i].y - poly[j].y) * (poly[i].x - poly[j].x);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

QuadLayout build_layout(const TriMesh& mesh, const PartitionResult& partition,
                        const std::vector<Corner>& corners,
                        const std::vector<Singularity>& singularities) {
  std::vector<InputCurve> curves;
  // Domain boundary loops first, then accepted curves.
  for (const auto& loop : mesh.boundary_loops) {
    InputCurve c;
    c.kind = Curve::Kind::Boundary;
    c.closed = true;
    for (int v : loop.vertex_ids) c.points.push_back(mesh.vertices[v]);
    c.finish();
    curves.push_back(std::move(c));
  }
  for (const auto& b : partition.B) {
    InputCurve c;
    c.kind = b.kind;
    c.closed = b.closed;
    c.points = b.points;
    if (c.points.size() < 2) continue;
    c.finish();
    curves.push_back(std::move(c));
  }

  const double node_eps = 1e-6 * mesh.diameter();

  // Split events per curve: (param, point).
  std::vector<std::vector<std::pair<double, Point2>>> events(curves.size());
  for (size_t ci = 0; ci < curves.size(); ++ci) {
    if (!curves[ci].closed) {
      events[ci].push_back({0.0, curves[ci].points.front()});
      events[ci].push_back({curves[ci].length, curves[ci].points.back()});
    }
  }
  // Domain corners always split the boundary.
  for (const auto& corner : corners) {
    Point2 p = mesh.vertices[corner.vertex_id];
    for (size_t ci = 0; ci < mesh.boundary_loops.size(); ++ci) {
      const auto& loop = mesh.boundary_loops[ci];
      auto it = std::find(loop.vertex_ids.begin(), loop.vertex_ids.end(), corner.vertex_id);
      if (it != loop.vertex_ids.end()) {
        size_t pos = static_cast<size_t>(it - loop.vertex_ids.begin());
        events[ci].push_back({curves[ci].cumlen[pos], p});
      }
    }
  }

  // Pairwise (and self) intersections.
  for (size_t ci = 0; ci < curves.size(); ++ci) {
    for (size_t cj = ci; cj < curves.size(); ++cj) {
      const auto& A = curves[ci];
      const auto& B = curves[cj];
      for (size_t i = 0; i < A.segment_count(); ++i) {
        size_t j0 = (ci == cj) ? i + 2 : 0;
        for (size_t j = j0; j < B.segment_count(); ++j) {
          if (ci == cj && A.closed && i == 0 && j == A.segment_count() - 1) continue;
          double s, t;
          Point2 q;
          if (!segment_intersect(A.seg_a(i), A.seg_b(i), B.seg_a(j), B.seg_b(j), s, t, q))
            continue;
          events[ci].push_back({A.param(i, s), q});
          events[cj].push_back({B.param(j, t), q});
        }
      }
    }
  }

  QuadLayout layout;
  NodePool pool{node_eps, {}, {}};

  // Build arcs by splitting each curve at its sorted events.
  for (size_t ci = 0; ci < curves.size(); ++ci) {
    auto& ev = events[ci];
    auto& curve = curves[ci];
    std::sort(ev.begin(), ev.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // dedupe by param
    std::vector<std::pair<double, Point2>> uniq;
    for (const auto& e : ev) {
      if (!uniq.empty() && e.first - uniq.back().first < node_eps) continue;
      uniq.push_back(e);
    }
    if (curve.closed && uniq.empty()) uniq.push_back({0.0, curve.points.front()});
    if (!curve.closed && uniq.size() < 2) continue;  // degenerate

    // spans (t0, t1); closed curves wrap the final span past curve.length
    std::vector<std::pair<double, double>> spans;
    for (size_t k = 0; k + 1 < uniq.size(); ++k)
      spans.emplace_back(uniq[k].first, uniq[k + 1].first);
    if (curve.closed) spans.emplace_back(uniq.back().first, uniq.front().first + curve.length);

    for (const auto& [t0, t1] : spans) {
      if (t1 - t0 < node_eps) continue;
      LayoutArc arc;
      arc.source_kind = curve.kind;
      arc.polyline.push_back(curve.point_at(std::fmod(t0, curve.length)));
      // interior vertices of the curve whose parameter (possibly shifted by
      // one period) falls strictly inside the span
      std::vector<std::pair<double, Point2>> inner;
      for (size_t pi = 0; pi < curve.points.size(); ++pi) {
        for (double tp : {curve.cumlen[pi], curve.cumlen[pi] + curve.length}) {
          if (tp > t0 + node_eps && tp < t1 - node_eps) inner.emplace_back(tp, curve.points[pi]);
          if (!curve.closed) break;
        }
      }
      std::sort(inner.begin(), inner.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [tp, p] : inner)
        if (dist(p, arc.polyline.back()) > node_eps) arc.polyline.push_back(p);
      Point2 endp = curve.point_at(t1 > curve.length ? t1 - curve.length : t1);
      if (dist(endp, arc.polyline.back()) > 1e-14) arc.polyline.push_back(endp);
      if (arc.polyline.size() < 2) continue;
      arc.src = pool.get(arc.polyline.front());
      arc.dst = pool.get(arc.polyline.back());
      arc.polyline.front() = pool.pts[arc.src];
      arc.polyline.back() = pool.pts[arc.dst];
      if (arc.src == arc.dst) {
        double len = 0.0;
        for (size_t i = 0; i + 1 < arc.polyline.size(); ++i)
          len += dist(arc.polyline[i], arc.polyline[i + 1]);
        if (len < 4.0 * node_eps) continue;  // numerical sliver
      }
      arc.id = static_cast<int>(layout.arcs.size());
      layout.arcs.push_back(std::move(arc));
    }
  }

  // Nodes.
  layout.nodes.resize(pool.pts.size());
  for (size_t i = 0; i < pool.pts.size(); ++i) {
    layout.nodes[i].id = static_cast<int>(i);
    layout.nodes[i].position = pool.pts[i];
  }
  double sing_eps = 1e-3 * mesh.diameter();
  for (auto& node : layout.nodes) {
    NodeKind kind = NodeKind::CurveIntersection;
    for (const auto& s : singularities)
      if (dist(node.position, s.location) < sing_eps) kind = NodeKind::Singularity;
    if (kind == NodeKind::CurveIntersection) {
      for (const auto& t : partition.t_junctions)
        if (dist(node.position, t.point) < node_eps * 4) kind = NodeKind::TJunction;
    }
    if (kind == NodeKind::CurveIntersection) {
      for (const auto& c : corners)
        if (dist(node.position, mesh.vertices[c.vertex_id]) < node_eps) kind = NodeKind::Corner;
    }
    if (kind == NodeKind::CurveIntersection) {
      for (const auto& loop : mesh.boundary_loops) {
        const auto& ids = loop.vertex_ids;
        for (size_t i = 0; i < ids.size(); ++i) {
          if (point_segment_distance(node.position, mesh.vertices[ids[i]],
                                     mesh.vertices[ids[(i + 1) % ids.size()]]) < node_eps) {
            kind = NodeKind::BoundaryExit;
            break;
          }
        }
        if (kind == NodeKind::BoundaryExit) break;
      }
    }
    node.kind = kind;
  }

  // T-junction records (node + incident arcs).
  for (const auto& t : partition.t_junctions) {
    TJunctionRecord rec;
    double best = std::numeric_limits<double>::max();
    for (const auto& node : layout.nodes) {
      double d = dist(node.position, t.point);
      if (d < best) {
        best = d;
        rec.node = node.id;
      }
    }
    for (const auto& arc : layout.arcs) {
      if (arc.dst == rec.node && arc.source_kind == Curve::Kind::Separatrix &&
          rec.cut_arc < 0)
        rec.cut_arc = arc.id;
    }
    for (const auto& arc : layout.arcs) {
      if (arc.id != rec.cut_arc && (arc.src == rec.node || arc.dst == rec.node)) {
        rec.host_arc = arc.id;
        break;
      }
    }
    layout.t_junctions.push_back(rec);
  }

  // Half-edge structure.
  std::vector<HalfEdge> hes(2 * layout.arcs.size());
  std::vector<std::vector<int>> outgoing(layout.nodes.size());
  for (const auto& arc : layout.arcs) {
    HalfEdge f, b;
    f.arc = b.arc = arc.id;
    f.forward = true;
    b.forward = false;
    f.src = arc.src;
    f.dst = arc.dst;
    b.src = arc.dst;
    b.dst = arc.src;
    f.depart = angle_of(polyline_departure(arc.polyline, true));
    b.depart = angle_of(polyline_departure(arc.polyline, false));
    hes[2 * arc.id] = f;
    hes[2 * arc.id + 1] = b;
    outgoing[f.src].push_back(2 * arc.id);
    outgoing[b.src].push_back(2 * arc.id + 1);
  }
  for (auto& out : outgoing)
    std::sort(out.begin(), out.end(), [&](int a, int b) {
      if (hes[a].depart != hes[b].depart) return hes[a].depart < hes[b].depart;
      return a < b;
    });

  auto next_he = [&](int h) {
    int twin = h ^ 1;
    const auto& out = outgoing[hes[h].dst];
    auto it = std::find(out.begin(), out.end(), twin);
    size_t pos = static_cast<size_t>(it - out.begin());
    return out[(pos + out.size() - 1) % out.size()];
  };

  // Face orbits.
  std::vector<char> used(hes.size(), 0);
  struct Cycle {
    std::vector<int> signed_arcs;
    double area = 0.0;
  };
  std::vector<Cycle> cycles;
  for (size_t h0 = 0; h0 < hes.size(); ++h0) {
    if (used[h0]) continue;
    Cycle cyc;
    int h = static_cast<int>(h0);
    do {
      used[h] = 1;
      cyc.signed_arcs.push_back(hes[h].forward ? (hes[h].arc + 1) : -(hes[h].arc + 1));
      h = next_he(h);
    } while (h != static_cast<int>(h0));
    cycles.push_back(std::move(cyc));
  }
  layout.cycle_count = static_cast<int>(cycles.size());

  // Connected components over nodes.
  {
    std::vector<int> parent(layout.nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& arc : layout.arcs) parent[find(arc.src)] = find(arc.dst);
    std::set<int> roots;
    for (size_t i = 0; i < layout.nodes.size(); ++i) roots.insert(find(static_cast<int>(i)));
    layout.component_count = static_cast<int>(roots.size());
  }

  PointLocator locator(mesh);
  for (auto& cyc : cycles) cyc.area = cycle_signed_area(layout, cyc.signed_arcs);

  // Positive cycles inside the mesh are domain faces.
  std::vector<int> pos_ids;
  for (size_t i = 0; i < cycles.size(); ++i) {
    if (cycles[i].area <= 0.0) continue;
    auto poly = cycle_polygon(layout, cycles[i].signed_arcs);
    // probe slightly inside: offset from an edge midpoint to the left
    bool in_mesh = false;
    for (size_t k = 0; k < poly.size() && !in_mesh; ++k) {
      Point2 a = poly[k], b = poly[(k + 1) % poly.size()];
      if (dist(a, b) < 4 * node_eps) continue;
      Point2 mid = (a + b) * 0.5;
      Vec2 left = rot90(normalized(b - a));
      for (double off : {0.25 * mesh.mean_edge_length, 0.05 * mesh.mean_edge_length}) {
        Point2 probe = mid + off * left;
        if (point_in_polygon(probe, poly) && locator.locate(probe) >= 0) {
          in_mesh = true;
          break;
        }
      }
    }
    if (!in_mesh) continue;
    LayoutFace face;
    face.id = static_cast<int>(layout.faces.size());
    face.arcs = cycles[i].signed_arcs;
    face.signed_area = cycles[i].area;
    layout.faces.push_back(std::move(face));
    pos_ids.push_back(static_cast<int>(i));
  }

  // Assign negative cycles (other than the global outer) as islands.
  int outer_cycle = -1;
  double most_negative = 0.0;
  for (size_t i = 0; i < cycles.size(); ++i)
    if (cycles[i].area < most_negative) {
      most_negative = cycles[i].area;
      outer_cycle = static_cast<int>(i);
    }
  for (size_t i = 0; i < cycles.size(); ++i) {
    if (static_cast<int>(i) == outer_cycle || cycles[i].area >= 0.0) continue;
    auto ipoly = cycle_polygon(layout, cycles[i].signed_arcs);
    if (ipoly.empty()) continue;
    Point2 probe = ipoly.front();
    double best_area = std::numeric_limits<double>::max();
    LayoutFace* best_face = nullptr;
    for (auto& face : layout.faces) {
      auto fpoly = cycle_polygon(layout, face.arcs);
      if (point_in_polygon(probe, fpoly) && face.signed_area < best_area) {
        best_area = face.signed_area;
        best_face = &face;
      }
    }
    if (best_face) best_face->islands.push_back(cycles[i].signed_arcs);
  }

  // Corner nodes and T-junction pass-through flags per face.
  auto arc_dir_at = [&](int sid, bool at_start) {
    const auto& arc = layout.arcs[std::abs(sid) - 1];
    bool fwd = sid > 0;
    // direction of travel at the given end of the traversed arc
    if (at_start) return polyline_departure(arc.polyline, fwd);
    Vec2 d = polyline_departure(arc.polyline, !fwd);
    return -d;
  };
  auto walk_corners = [&](const std::vector<int>& signed_arcs, LayoutFace& face) {
    size_t n = signed_arcs.size();
    for (size_t k = 0; k < n; ++k) {
      int prev = signed_arcs[(k + n - 1) % n];
      int cur = signed_arcs[k];
      const auto& curarc = layout.arcs[std::abs(cur) - 1];
      int node = cur > 0 ? curarc.src : curarc.dst;
      Vec2 arrive = arc_dir_at(prev, false);
      Vec2 depart = arc_dir_at(cur, true);
      double turn = std::abs(wrap_pi(angle_of(depart) - angle_of(arrive)));
      if (turn > kPi / 4.0)
        face.corner_nodes.push_back(node);
      else if (layout.nodes[node].kind == NodeKind::TJunction)
        face.has_t_junction = true;
    }
  };
  for (auto& face : layout.faces) {
    walk_corners(face.arcs, face);
    for (const auto& isl : face.islands) walk_corners(isl, face);
  }

  // sanity: dangling arcs would leave orbit bookkeeping inconsistent
  for (const auto& arc : layout.arcs)
    if (arc.src < 0 || arc.dst < 0) throw Error("layout: dangling arc");

  return layout;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

// Winding change of arg(u) along the circular arc of radius rho around
// `center` from angle a0 sweeping ccw by `sweep`.
bool field_arg_sweep(const PointLocator& locator, const ComplexField& u, Point2 center,
                     double rho, double a0, double sweep, double& delta) {
  const int K = 96;
  double prev = 0.0;
  delta = 0.0;
  int hint = -1;
  for (int k = 0; k <= K; ++k) {
    Point2 p = center + rho * dir_of(a0 + sweep * k / K);
    int f = locator.locate(p, hint);
    if (f < 0) return false;
    hint = f;
    const TriMesh& mesh = locator.mesh();
    auto b = mesh.barycentric(f, p);
    const auto& t = mesh.triangles[f];
    Complex val = b[0] * u[t[0]] + b[1] * u[t[1]] + b[2] * u[t[2]];
    if (std::abs(val) < 1e-12) return false;
    double a = std::arg(val);
    if (k > 0) delta += wrap_pi(a - prev);
    prev = a;
  }
  return true;
}

}  // namespace

ValidationReport validate_regions(const QuadLayout& layout, const PointLocator& locator,
                                  const ComplexField& u, double angle_tol) {
  const TriMesh& mesh = locator.mesh();
  ValidationReport report;

  for (const auto& face : layout.faces) {
    RegionReport rr;
    rr.face_id = face.id;
    rr.corner_count = static_cast<int>(face.corner_nodes.size());

    // sector index at each corner: interior angle corrected by the cross
    // field rotation must be a quarter turn
    size_t n = face.arcs.size();
    for (size_t k = 0; k < n; ++k) {
      int prev = face.arcs[(k + n - 1) % n];
      int cur = face.arcs[k];
      const auto& curarc = layout.arcs[std::abs(cur) - 1];
      int node = cur > 0 ? curarc.src : curarc.dst;
      if (std::find(face.corner_nodes.begin(), face.corner_nodes.end(), node) ==
          face.corner_nodes.end())
        continue;

      const auto& prevarc = layout.arcs[std::abs(prev) - 1];
      Vec2 arrive = (prev > 0) ? -polyline_departure(prevarc.polyline, false)
                               : -polyline_departure(prevarc.polyline, true);
      // arrive now points along travel; interior angle spans depart -> -arrive ccw
      Vec2 depart = (cur > 0) ? polyline_departure(curarc.polyline, true)
                              : polyline_departure(curarc.polyline, false);
      double theta_int = angle_of(-arrive) - angle_of(depart);
      while (theta_int <= 0.0) theta_int += 2.0 * kPi;
      while (theta_int > 2.0 * kPi) theta_int -= 2.0 * kPi;

      Point2 c = layout.nodes[node].position;
      double rho = 0.35 * mesh.mean_edge_length;
      double delta = 0.0;
      bool measured = false;
      for (int attempt = 0; attempt < 5 && !measured; ++attempt) {
        double margin = 0.12 * theta_int;
        measured = field_arg_sweep(locator, u, c, rho, angle_of(depart) + margin,
                                   theta_int - 2 * margin, delta);
        if (measured) {
          // extrapolate the trimmed margins linearly
          delta *= theta_int / (theta_int - 2 * margin);
        }
        rho *= 0.5;
      }
      if (!measured) {
        rr.violations.push_back("corner at node " + std::to_string(node) +
                                ": field sample failed");
        continue;
      }
      double corrected = theta_int + delta / 4.0;
      if (std::abs(corrected - kPi / 2.0) > angle_tol)
        rr.violations.push_back("corner at node " + std::to_string(node) +
                                ": sector is not a quarter turn in the cross field");
    }

    if (face.has_t_junction) {
      rr.kind = FaceKind::TJunctionRegion;
    } else if (rr.corner_count == 4 && face.islands.empty()) {
      rr.kind = FaceKind::Quad;
    } else if (rr.corner_count == 0 && face.islands.size() == 1) {
      rr.kind = FaceKind::Annulus;
    } else {
      rr.kind = FaceKind::Invalid;
      rr.violations.push_back("non-quad region (" + std::to_string(rr.corner_count) +
                              " corners, " + std::to_string(face.islands.size()) + " islands)");
    }
    report.violation_count += static_cast<int>(rr.violations.size());
    report.regions.push_back(std::move(rr));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Grids

namespace {

std::vector<Point2> side_polyline(const QuadLayout& layout, const std::vector<int>& arcs,
                                  size_t from, size_t to) {
  // concatenated traversed polyline of arcs[from..to) (cyclic)
  std::vector<Point2> pts;
  size_t n = arcs.size();
  for (size_t k = from; k != to; k = (k + 1) % n) {
    int sid = arcs[k];
    const auto& arc = layout.arcs[std::abs(sid) - 1];
    std::vector<Point2> p = arc.polyline;
    if (sid < 0) std::reverse(p.begin(), p.end());
    if (!pts.empty()) p.erase(p.begin());
    pts.insert(pts.end(), p.begin(), p.end());
  }
  return pts;
}

Point2 sample_polyline(const std::vector<Point2>& pts, double t) {
  std::vector<double> cum(pts.size(), 0.0);
  for (size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + dist(pts[i - 1], pts[i]);
  double target = t * cum.back();
  for (size_t i = 1; i < pts.size(); ++i) {
    if (target <= cum[i] || i == pts.size() - 1) {
      double L = cum[i] - cum[i - 1];
      double s = L > 0 ? (target - cum[i - 1]) / L : 0.0;
      return pts[i - 1] + s * (pts[i] - pts[i - 1]);
    }
  }
  return pts.back();
}

}  // namespace

RegionGrid map_grid_into_region(const QuadLayout& layout, int face_id, int m, int n) {
  if (face_id < 0 || face_id >= static_cast<int>(layout.faces.size()))
    throw Error("map_grid: no such face");
  const auto& face = layout.faces[face_id];
  if (face.has_t_junction)
    throw Error("map_grid: T-junction region requires additional irregular nodes");
  if (face.corner_nodes.size() != 4 || !face.islands.empty())
    throw Error("map_grid: face is not a quad");
  if (m < 1 || n < 1) throw Error("map_grid: grid resolution must be positive");

  // corner positions within the arc cycle
  std::vector<size_t> corner_pos;
  size_t na = face.arcs.size();
  for (size_t k = 0; k < na; ++k) {
    int sid = face.arcs[k];
    const auto& arc = layout.arcs[std::abs(sid) - 1];
    int node = sid > 0 ? arc.src : arc.dst;
    if (std::find(face.corner_nodes.begin(), face.corner_nodes.end(), node) !=
        face.corner_nodes.end())
      corner_pos.push_back(k);
  }
  if (corner_pos.size() != 4) throw Error("map_grid: corner walk failed");

  std::array<std::vector<Point2>, 4> sides;
  for (int s = 0; s < 4; ++s)
    sides[s] = side_polyline(layout, face.arcs, corner_pos[s], corner_pos[(s + 1) % 4]);

  Point2 c0 = sides[0].front(), c1 = sides[1].front(), c2 = sides[2].front(),
         c3 = sides[3].front();

  RegionGrid grid;
  grid.face_id = face_id;
  grid.m = m;
  grid.n = n;
  grid.points.resize(static_cast<size_t>(m + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    double v = static_cast<double>(j) / n;
    for (int i = 0; i <= m; ++i) {
      double uu = static_cast<double>(i) / m;
      Point2 bottom = sample_polyline(sides[0], uu);        // c0 -> c1
      Point2 right = sample_polyline(sides[1], v);          // c1 -> c2
      Point2 top = sample_polyline(sides[2], 1.0 - uu);     // c2 -> c3 reversed
      Point2 left = sample_polyline(sides[3], 1.0 - v);     // c3 -> c0 reversed
      Point2 p = (1.0 - v) * bottom + v * top + (1.0 - uu) * left + uu * right -
                 ((1.0 - uu) * (1.0 - v) * c0 + uu * (1.0 - v) * c1 + uu * v * c2 +
                  (1.0 - uu) * v * c3);
      grid.points[static_cast<size_t>(j) * (m + 1) + i] = p;
    }
  }
  return grid;
}

bool grid_cells_positive(const RegionGrid& g) {
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.m; ++i) {
      Point2 p00 = g.at(i, j), p10 = g.at(i + 1, j), p11 = g.at(i + 1, j + 1),
             p01 = g.at(i, j + 1);
      if (cross(p10 - p00, p01 - p00) <= 0) return false;
      if (cross(p11 - p10, p00 - p10) <= 0) return false;
      if (cross(p01 - p11, p10 - p11) <= 0) return false;
      if (cross(p00 - p01, p11 - p01) <= 0) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// JSON export / import

namespace {

std::string node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Singularity: return "singularity";
    case NodeKind::Corner: return "corner";
    case NodeKind::BoundaryExit: return "boundary_exit";
    case NodeKind::TJunction: return "t_junction";
    default: return "intersection";
  }
}

NodeKind node_kind_from(const std::string& s) {
  if (s == "singularity") return NodeKind::Singularity;
  if (s == "corner") return NodeKind::Corner;
  if (s == "boundary_exit") return NodeKind::BoundaryExit;
  if (s == "t_junction") return NodeKind::TJunction;
  return NodeKind::CurveIntersection;
}

std::string face_kind_name(FaceKind k) {
  switch (k) {
    case FaceKind::Quad: return "quad";
    case FaceKind::Annulus: return "annulus";
    case FaceKind::TJunctionRegion: return "t_junction_region";
    default: return "unclassified";
  }
}

FaceKind face_kind_from(const std::string& s) {
  if (s == "quad") return FaceKind::Quad;
  if (s == "annulus") return FaceKind::Annulus;
  if (s == "t_junction_region") return FaceKind::TJunctionRegion;
  return FaceKind::Invalid;
}

}  // namespace

void export_layout(const QuadLayout& layout, const std::string& path) {
  Json j;
  j["nodes"] = Json::array();
  for (const auto& n : layout.nodes)
    j["nodes"].push_back(
        {{"id", n.id}, {"kind", node_kind_name(n.kind)}, {"x", n.position.x}, {"y", n.position.y}});
  j["arcs"] = Json::array();
  for (const auto& a : layout.arcs) {
    Json poly = Json::array();
    for (const auto& p : a.polyline) poly.push_back({p.x, p.y});
    j["arcs"].push_back({{"id", a.id}, {"src", a.src}, {"dst", a.dst}, {"polyline", poly}});
  }
  j["faces"] = Json::array();
  for (const auto& f : layout.faces) {
    Json islands = Json::array();
    for (const auto& isl : f.islands) islands.push_back(isl);
    j["faces"].push_back(
        {{"id", f.id}, {"arcs", f.arcs}, {"kind", face_kind_name(f.kind)}, {"islands", islands}});
  }
  j["t_junctions"] = Json::array();
  for (const auto& t : layout.t_junctions)
    j["t_junctions"].push_back(
        {{"node", t.node}, {"cut_arc", t.cut_arc}, {"host_arc", t.host_arc}});

  std::ofstream out(path);
  if (!out) throw Error("cannot write layout file: " + path);
  out << j.dump(1) << "\n";
}

QuadLayout import_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open layout file: " + path);
  Json j;
  in >> j;
  QuadLayout layout;
  for (const auto& n : j.at("nodes")) {
    LayoutNode node;
    node.id = n.at("id");
    node.kind = node_kind_from(n.at("kind"));
    node.position = {n.at("x"), n.at("y")};
    layout.nodes.push_back(node);
  }
  for (const auto& a : j.at("arcs")) {
    LayoutArc arc;
    arc.id = a.at("id");
    arc.src = a.at("src");
    arc.dst = a.at("dst");
    for (const auto& p : a.at("polyline")) arc.polyline.push_back({p.at(0), p.at(1)});
    layout.arcs.push_back(std::move(arc));
  }
  for (const auto& f : j.at("faces")) {
    LayoutFace face;
    face.id = f.at("id");
    face.arcs = f.at("arcs").get<std::vector<int>>();
    face.kind = face_kind_from(f.at("kind"));
    if (f.contains("islands"))
      for (const auto& isl : f.at("islands"))
        face.islands.push_back(isl.get<std::vector<int>>());
    layout.faces.push_back(std::move(face));
  }
  if (j.contains("t_junctions"))
    for (const auto& t : j.at("t_junctions"))
      layout.t_junctions.push_back({t.at("node"), t.at("cut_arc"), t.at("host_arc")});
  return layout;
}

}  // namespace xf
