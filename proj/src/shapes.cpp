#include "xfield/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace xf {

namespace {

// Greedy stitch of two concentric closed rings (both counterclockwise,
// aligned at index 0). Produces nA + nB triangles.
void stitch_closed(const std::vector<int>& inner, const std::vector<int>& outer,
                   std::vector<std::array<int, 3>>& tris) {
  const size_t nA = inner.size(), nB = outer.size();
  size_t i = 0, j = 0;
  while (i < nA || j < nB) {
    double pa = static_cast<double>(i + 1) / nA;
    double pb = static_cast<double>(j + 1) / nB;
    if (j == nB || (i < nA && pa <= pb)) {
      tris.push_back({inner[i % nA], outer[j % nB], inner[(i + 1) % nA]});
      ++i;
    } else {
      tris.push_back({outer[j % nB], outer[(j + 1) % nB], inner[i % nA]});
      ++j;
    }
  }
}

// Open variant: rings are polylines sharing a common baseline; no wrap.
void stitch_open(const std::vector<int>& inner, const std::vector<int>& outer,
                 std::vector<std::array<int, 3>>& tris) {
  const size_t nA = inner.size(), nB = outer.size();
  size_t i = 0, j = 0;
  while (i + 1 < nA || j + 1 < nB) {
    double pa = (i + 1 < nA) ? static_cast<double>(i + 1) / (nA - 1) : 2.0;
    double pb = (j + 1 < nB) ? static_cast<double>(j + 1) / (nB - 1) : 2.0;
    if (pa <= pb) {
      tris.push_back({inner[i], outer[j], inner[i + 1]});
      ++i;
    } else {
      tris.push_back({outer[j], outer[j + 1], inner[i]});
      ++j;
    }
  }
}

TriMesh grid_mesh(double x0, double y0, double cell, int nx, int ny,
                  const std::function<bool(int, int)>& keep) {
  std::vector<int> vid(static_cast<size_t>(nx + 1) * (ny + 1), -1);
  std::vector<Point2> verts;
  std::vector<std::array<int, 3>> tris;
  auto vertex = [&](int i, int j) {
    int& id = vid[static_cast<size_t>(j) * (nx + 1) + i];
    if (id < 0) {
      id = static_cast<int>(verts.size());
      verts.push_back({x0 + cell * i, y0 + cell * j});
    }
    return id;
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!keep(i, j)) continue;
      int a = vertex(i, j), b = vertex(i + 1, j), c = vertex(i + 1, j + 1), d = vertex(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  return TriMesh::build(std::move(verts), std::move(tris));
}

}  // namespace

TriMesh make_square(int n) {
  return grid_mesh(0.0, 0.0, 1.0 / n, n, n, [](int, int) { return true; });
}

TriMesh make_rect_grid(double w, double h, int nx, int ny) {
  std::vector<Point2> verts;
  std::vector<std::array<int, 3>> tris;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) verts.push_back({w * i / nx, h * j / ny});
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  return TriMesh::build(std::move(verts), std::move(tris));
}

TriMesh make_disk(int rings) {
  std::vector<Point2> verts{{0.0, 0.0}};
  std::vector<std::vector<int>> ring_ids(rings + 1);
  ring_ids[0] = {0};
  for (int k = 1; k <= rings; ++k) {
    double r = static_cast<double>(k) / rings;
    int m = 4 * k;
    for (int j = 0; j < m; ++j) {
      ring_ids[k].push_back(static_cast<int>(verts.size()));
      verts.push_back(r * dir_of(2.0 * kPi * j / m));
    }
  }
  std::vector<std::array<int, 3>> tris;
  for (size_t j = 0; j < ring_ids[1].size(); ++j)
    tris.push_back({0, ring_ids[1][j], ring_ids[1][(j + 1) % ring_ids[1].size()]});
  for (int k = 1; k < rings; ++k) stitch_closed(ring_ids[k], ring_ids[k + 1], tris);
  // orientation: fan above is (center, j, j+1) -> check ccw: yes
  for (auto& t : tris) {
    double a = cross(verts[t[1]] - verts[t[0]], verts[t[2]] - verts[t[0]]);
    if (a < 0) std::swap(t[1], t[2]);
  }
  return TriMesh::build(std::move(verts), std::move(tris));
}

TriMesh make_half_disk(int rings) {
  std::vector<Point2> verts{{0.0, 0.0}};
  std::vector<std::vector<int>> ring_ids(rings + 1);
  ring_ids[0] = {0};
  for (int k = 1; k <= rings; ++k) {
    double r = static_cast<double>(k) / rings;
    int m = 3 * k;  // m+1 points from angle 0 to pi
    for (int j = 0; j <= m; ++j) {
      ring_ids[k].push_back(static_cast<int>(verts.size()));
      verts.push_back(r * dir_of(kPi * j / m));
    }
  }
  std::vector<std::array<int, 3>> tris;
  for (size_t j = 0; j + 1 < ring_ids[1].size(); ++j)
    tris.push_back({0, ring_ids[1][j], ring_ids[1][j + 1]});
  for (int k = 1; k < rings; ++k) stitch_open(ring_ids[k], ring_ids[k + 1], tris);
  return TriMesh::build(std::move(verts), std::move(tris));
}

TriMesh make_hexagon(int rings) {
  auto hex_corner = [](int s) { return dir_of(2.0 * kPi * s / 6.0); };
  std::vector<Point2> verts;
  std::vector<std::vector<int>> ring_ids(rings + 1);
  for (int k = 1; k <= rings; ++k) {
    double scale = static_cast<double>(k) / rings;
    for (int s = 0; s < 6; ++s) {
      Point2 a = scale * hex_corner(s);
      Point2 b = scale * hex_corner((s + 1) % 6);
      for (int t = 0; t < k; ++t) {
        ring_ids[k].push_back(static_cast<int>(verts.size()));
        verts.push_back(a + (static_cast<double>(t) / k) * (b - a));
      }
    }
  }
  std::vector<std::array<int, 3>> tris;
  // innermost hexagon triangulated without a center vertex: the origin lies
  // strictly inside the middle triangle (v0, v2, v4)
  const auto& r1 = ring_ids[1];
  tris.push_back({r1[0], r1[1], r1[2]});
  tris.push_back({r1[2], r1[3], r1[4]});
  tris.push_back({r1[4], r1[5], r1[0]});
  tris.push_back({r1[0], r1[2], r1[4]});
  for (int k = 1; k < rings; ++k) stitch_closed(ring_ids[k], ring_ids[k + 1], tris);
  return TriMesh::build(std::move(verts), std::move(tris));
}

TriMesh make_annulus(double r_inner, int rings, int around) {
  std::vector<Point2> verts;
  std::vector<std::vector<int>> ring_ids(rings + 1);
  for (int k = 0; k <= rings; ++k) {
    double r = r_inner + (1.0 - r_inner) * k / rings;
    for (int j = 0; j < around; ++j) {
      ring_ids[k].push_back(static_cast<int>(verts.size()));
      verts.push_back(r * dir_of(2.0 * kPi * j / around));
    }
  }
  std::vector<std::array<int, 3>> tris;
  for (int k = 0; k < rings; ++k) stitch_closed(ring_ids[k], ring_ids[k + 1], tris);
  return TriMesh::build(std::move(verts), std::move(tris));
}

TriMesh make_l_shape(int n) {
  return grid_mesh(0.0, 0.0, 1.0 / n, 2 * n, 2 * n,
                   [n](int i, int j) { return !(i >= n && j >= n); });
}

TriMesh make_u_block(int n) {
  return grid_mesh(0.0, 0.0, 1.0 / n, 3 * n, 2 * n,
                   [n](int i, int j) { return !(i >= n && i < 2 * n && j >= n); });
}

TriMesh make_two_hole(int n) {
  // holes [0.8,1.4]x[0.7,1.3] and [2.6,3.2]x[0.7,1.3] on a 0.1-aligned grid
  double cell = 1.0 / n;
  auto in_hole = [&](double x, double y) {
    bool h1 = x > 0.8 - 1e-9 && x < 1.4 + 1e-9 && y > 0.7 - 1e-9 && y < 1.3 + 1e-9;
    bool h2 = x > 2.6 - 1e-9 && x < 3.2 + 1e-9 && y > 0.7 - 1e-9 && y < 1.3 + 1e-9;
    return h1 || h2;
  };
  return grid_mesh(0.0, 0.0, cell, 4 * n, 2 * n, [&](int i, int j) {
    double cx = (i + 0.5) * cell, cy = (j + 0.5) * cell;
    return !in_hole(cx, cy);
  });
}

// ---------------------------------------------------------------------------
// Bowyer-Watson Delaunay

std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& points) {
  const size_t n = points.size();
  if (n < 3) throw Error("delaunay: need at least 3 points");

  Point2 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  double span = std::max(hi.x - lo.x, hi.y - lo.y);
  Point2 mid = (lo + hi) * 0.5;

  std::vector<Point2> pts = points;
  pts.push_back({mid.x - 20.0 * span, mid.y - 10.0 * span});
  pts.push_back({mid.x + 20.0 * span, mid.y - 10.0 * span});
  pts.push_back({mid.x, mid.y + 20.0 * span});
  int s0 = static_cast<int>(n), s1 = s0 + 1, s2 = s0 + 2;

  struct Tri {
    int v[3];
    bool alive = true;
  };
  std::vector<Tri> tris;
  tris.push_back({{s0, s1, s2}, true});

  auto in_circumcircle = [&](const Tri& t, Point2 p) {
    Point2 a = pts[t.v[0]], b = pts[t.v[1]], c = pts[t.v[2]];
    double ax = a.x - p.x, ay = a.y - p.y;
    double bx = b.x - p.x, by = b.y - p.y;
    double cx = c.x - p.x, cy = c.y - p.y;
    double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                 (bx * bx + by * by) * (ax * cy - cx * ay) +
                 (cx * cx + cy * cy) * (ax * by - bx * ay);
    double orient = cross(b - a, c - a);
    return orient > 0 ? det > 0 : det < 0;
  };

  for (size_t ip = 0; ip < n; ++ip) {
    Point2 p = pts[ip];
    // cavity
    std::map<std::pair<int, int>, int> edge_use;
    for (auto& t : tris) {
      if (!t.alive || !in_circumcircle(t, p)) continue;
      t.alive = false;
      for (int e = 0; e < 3; ++e) {
        int a = t.v[e], b = t.v[(e + 1) % 3];
        auto key = std::minmax(a, b);
        edge_use[{key.first, key.second}]++;
        // remember orientation via a second map entry trick below
      }
    }
    // boundary edges of the cavity appear once; recover orientation from
    // the dead triangles
    std::vector<std::pair<int, int>> boundary;
    for (auto& t : tris) {
      if (t.alive) continue;
      for (int e = 0; e < 3; ++e) {
        int a = t.v[e], b = t.v[(e + 1) % 3];
        auto key = std::minmax(a, b);
        auto it = edge_use.find({key.first, key.second});
        if (it != edge_use.end() && it->second == 1) boundary.push_back({a, b});
      }
    }
    std::vector<Tri> next;
    next.reserve(tris.size() + boundary.size());
    for (auto& t : tris)
      if (t.alive) next.push_back(t);
    for (auto& [a, b] : boundary) next.push_back({{a, b, static_cast<int>(ip)}, true});
    tris = std::move(next);
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= static_cast<int>(n) || t.v[1] >= static_cast<int>(n) ||
        t.v[2] >= static_cast<int>(n))
      continue;
    out.push_back({t.v[0], t.v[1], t.v[2]});
  }
  return out;
}

namespace {

bool point_in_loop(Point2 p, const std::vector<Point2>& poly) {
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

double loop_distance(Point2 p, const std::vector<Point2>& poly) {
  double best = std::numeric_limits<double>::max();
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i)
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  return best;
}

}  // namespace

TriMesh mesh_from_polygon(const std::vector<std::vector<Point2>>& loops, double target_h) {
  if (loops.empty()) throw Error("mesh_from_polygon: no boundary");
  auto inside_domain = [&](Point2 p) {
    if (!point_in_loop(p, loops[0])) return false;
    for (size_t i = 1; i < loops.size(); ++i)
      if (point_in_loop(p, loops[i])) return false;
    return true;
  };

  std::vector<Point2> pts;
  for (const auto& loop : loops) pts.insert(pts.end(), loop.begin(), loop.end());

  Point2 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  double row = target_h * std::sqrt(3.0) / 2.0;
  int j = 0;
  for (double y = lo.y + 0.5 * row; y < hi.y; y += row, ++j) {
    double x0 = lo.x + ((j % 2 == 0) ? 0.5 : 1.0) * target_h * 0.5;
    int i = 0;
    for (double x = x0; x < hi.x; x += target_h, ++i) {
      // deterministic jitter breaks lattice cocircularity
      double jx = 0.013 * target_h * std::sin(12.9898 * i + 78.233 * j);
      double jy = 0.013 * target_h * std::sin(39.3468 * i + 11.135 * j);
      Point2 p{x + jx, y + jy};
      if (!inside_domain(p)) continue;
      double d = std::numeric_limits<double>::max();
      for (const auto& loop : loops) d = std::min(d, loop_distance(p, loop));
      if (d < 0.55 * target_h) continue;
      pts.push_back(p);
    }
  }

  auto tris = delaunay(pts);
  std::vector<std::array<int, 3>> kept;
  for (const auto& t : tris) {
    Point2 c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
    if (inside_domain(c)) kept.push_back(t);
  }
  return TriMesh::build(std::move(pts), std::move(kept));
}

TriMesh make_mushroom(double target_h) {
  const double w = 0.45, rho = 0.18, depth = 0.85;
  std::vector<Point2> loop;
  // tiny radial jitter on interior arc samples keeps them off a common
  // circle (exact cocircularity defeats the double-precision incircle test)
  auto arc = [&](Point2 center, double radius, double a0, double a1, bool include_last) {
    int steps = std::max(8, static_cast<int>(std::ceil(radius * std::abs(a1 - a0) / target_h)));
    for (int k = 0; k <= (include_last ? steps : steps - 1); ++k) {
      double r = radius;
      if (k > 0) r *= 1.0 + 2e-6 * std::sin(83.7 * k + 11.0 * radius);
      loop.push_back(center + r * dir_of(a0 + (a1 - a0) * k / steps));
    }
  };
  auto seg = [&](Point2 a, Point2 b, bool include_last) {
    int steps = std::max(1, static_cast<int>(std::ceil(dist(a, b) / target_h)));
    for (int k = 0; k <= (include_last ? steps : steps - 1); ++k)
      loop.push_back(a + (static_cast<double>(k) / steps) * (b - a));
  };
  arc({0, 0}, 1.0, 0.0, kPi, false);                        // cap, (1,0) ccw to (-1,0)
  seg({-1, 0}, {-w - rho, 0}, false);                       // left underside
  arc({-w - rho, -rho}, rho, kPi / 2.0, 0.0, false);        // left fillet (smooth)
  seg({-w, -rho}, {-w, -depth}, false);                     // left stem side
  seg({-w, -depth}, {w, -depth}, false);                    // stem bottom
  seg({w, -depth}, {w, -rho}, false);                       // right stem side
  arc({w + rho, -rho}, rho, kPi, kPi / 2.0, false);         // right fillet
  seg({w + rho, 0}, {1, 0}, false);                         // right underside
  return mesh_from_polygon({loop}, target_h);
}

TriMesh make_square_with_hole(double hole_radius, double target_h) {
  std::vector<Point2> outer;
  auto seg = [&](Point2 a, Point2 b) {
    int steps = std::max(1, static_cast<int>(std::ceil(dist(a, b) / target_h)));
    for (int k = 0; k < steps; ++k)
      outer.push_back(a + (static_cast<double>(k) / steps) * (b - a));
  };
  seg({-2, -2}, {2, -2});
  seg({2, -2}, {2, 2});
  seg({2, 2}, {-2, 2});
  seg({-2, 2}, {-2, -2});
  std::vector<Point2> hole;
  int m = std::max(16, static_cast<int>(std::ceil(2.0 * kPi * hole_radius / target_h)));
  for (int k = 0; k < m; ++k) {
    double r = hole_radius * (1.0 + 2e-6 * std::sin(83.7 * k + 3.0));
    hole.push_back(r * dir_of(2.0 * kPi * k / m));
  }
  return mesh_from_polygon({outer, hole}, target_h);
}

TriMesh make_named_domain(const std::string& name, int resolution) {
  if (name == "square") return make_square(resolution > 0 ? resolution : 24);
  if (name == "disk") return make_disk(resolution > 0 ? resolution : 24);
  if (name == "halfdisk") return make_half_disk(resolution > 0 ? resolution : 13);
  if (name == "hexagon") return make_hexagon(resolution > 0 ? resolution : 20);
  if (name == "annulus") return make_annulus(0.4, resolution > 0 ? resolution : 10, 64);
  if (name == "lshape") return make_l_shape(resolution > 0 ? resolution : 12);
  if (name == "ublock") return make_u_block(resolution > 0 ? resolution : 10);
  if (name == "twohole") return make_two_hole(resolution > 0 ? resolution : 10);
  if (name == "mushroom") return make_mushroom(resolution > 0 ? 1.0 / resolution : 0.05);
  if (name == "squarehole")
    return make_square_with_hole(0.5, resolution > 0 ? 4.0 / resolution : 0.12);
  throw Error("unknown domain name: " + name);
}

}  // namespace xf
