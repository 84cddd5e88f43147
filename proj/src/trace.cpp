#include "xfield/trace.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace xf {

namespace {

// Branch-selected unit direction at p: the cross direction nearest ref.
bool branch_direction(const PointLocator& locator, const ComplexField& u, Point2 p, Vec2 ref,
                      int& face_hint, Vec2& out) {
  int f = locator.locate(p, face_hint);
  if (f < 0) return false;
  face_hint = f;
  const TriMesh& mesh = locator.mesh();
  auto b = mesh.barycentric(f, p);
  const auto& t = mesh.triangles[f];
  Complex val = b[0] * u[t[0]] + b[1] * u[t[1]] + b[2] * u[t[2]];
  double m = std::abs(val);
  if (m < 1e-12) return false;
  double base = std::arg(val) / 4.0;
  double ref_angle = angle_of(ref);
  double k = std::round((ref_angle - base) / (kPi / 2.0));
  out = dir_of(base + k * kPi / 2.0);
  return true;
}

struct BoundaryEdges {
  std::vector<std::pair<Point2, Point2>> segments;
  explicit BoundaryEdges(const TriMesh& mesh) {
    for (const auto& loop : mesh.boundary_loops) {
      const auto& ids = loop.vertex_ids;
      for (size_t i = 0; i < ids.size(); ++i)
        segments.emplace_back(mesh.vertices[ids[i]], mesh.vertices[ids[(i + 1) % ids.size()]]);
    }
  }
  // earliest intersection of [a,b] with the boundary
  bool clip(Point2 a, Point2 b, Point2& hit) const {
    double best = std::numeric_limits<double>::max();
    bool found = false;
    for (const auto& [p0, p1] : segments) {
      double s, t;
      Point2 q;
      if (segment_intersect(a, b, p0, p1, s, t, q) && s > 1e-9 && s < best) {
        best = s;
        hit = q;
        found = true;
      }
    }
    return found;
  }
};

// Spatial hash over visited polyline samples, for limit-cycle detection.
class ReturnDetector {
 public:
  ReturnDetector(double cell) : cell_(cell) {}

  void insert(Point2 p, double arclen, Vec2 dir, int index) {
    entries_.push_back({p, arclen, dir, index});
    grid_[key(p)].push_back(static_cast<int>(entries_.size()) - 1);
  }

  // Returns index of a previously visited sample within `tol` of p whose
  // direction agrees within angle_tol and whose arc-length separation
  // exceeds min_sep; -1 otherwise.
  int query(Point2 p, double arclen, Vec2 dir, double tol, double angle_tol,
            double min_sep) const {
    long cx = static_cast<long>(std::floor(p.x / cell_));
    long cy = static_cast<long>(std::floor(p.y / cell_));
    for (long dy = -1; dy <= 1; ++dy)
      for (long dx = -1; dx <= 1; ++dx) {
        auto it = grid_.find(pack(cx + dx, cy + dy));
        if (it == grid_.end()) continue;
        for (int e : it->second) {
          const auto& s = entries_[e];
          if (arclen - s.arclen < min_sep) continue;
          if (dist(s.p, p) > tol) continue;
          if (angle_between(s.dir, dir) > angle_tol) continue;
          return s.index;
        }
      }
    return -1;
  }

 private:
  struct Entry {
    Point2 p;
    double arclen;
    Vec2 dir;
    int index;
  };
  long long key(Point2 p) const {
    return pack(static_cast<long>(std::floor(p.x / cell_)),
                static_cast<long>(std::floor(p.y / cell_)));
  }
  static long long pack(long x, long y) {
    return (static_cast<long long>(x) << 32) ^ (static_cast<long long>(y) & 0xffffffffLL);
  }
  double cell_;
  std::vector<Entry> entries_;
  std::unordered_map<long long, std::vector<int>> grid_;
};

double snap_radius_at(const TriMesh& mesh, const Singularity& s, double factor) {
  return factor * mesh.local_edge_length(s.face_id);
}

}  // namespace

Streamline trace_streamline(const PointLocator& locator, const ComplexField& u, Point2 start,
                            Vec2 dir0, const TraceParams& params,
                            const std::vector<Singularity>& singularities) {
  const TriMesh& mesh = locator.mesh();
  const double h = params.step;
  if (h <= 0.0) throw Error("trace: step must be positive");

  int hint = locator.locate(start);
  if (hint < 0) throw Error("trace: start point outside mesh");

  {
    Vec2 probe;
    int f = hint;
    if (!branch_direction(locator, u, start, dir0, f, probe))
      throw Error("trace: start too close to a singularity");
    double off = angle_between(probe, dir0);
    if (std::abs(off - kPi / 4.0) < 1e-6)
      throw Error("trace: seed direction ambiguous between branches");
  }

  BoundaryEdges boundary(mesh);
  ReturnDetector detector(std::max(2.0 * h, 1e-12));

  Streamline line;
  line.points.push_back(start);

  // arm singularity snapping only once we are outside the snap zone
  std::vector<char> armed(singularities.size(), 0);
  std::vector<double> snap(singularities.size(), 0.0);
  for (size_t i = 0; i < singularities.size(); ++i) {
    snap[i] = snap_radius_at(mesh, singularities[i], params.snap_factor);
    armed[i] = dist(start, singularities[i].location) > snap[i];
  }

  Point2 p = start;
  Vec2 ref = normalized(dir0);
  double arclen = 0.0;
  const long max_steps = static_cast<long>(params.max_length / h) + 2;

  for (long step = 0; step < max_steps; ++step) {
    detector.insert(p, arclen, ref, static_cast<int>(line.points.size()) - 1);

    Vec2 k1, k2, k3, k4;
    int f = hint;
    bool ok = branch_direction(locator, u, p, ref, f, k1);
    if (ok) ok = branch_direction(locator, u, p + 0.5 * h * k1, k1, f, k2);
    if (ok) ok = branch_direction(locator, u, p + 0.5 * h * k2, k2, f, k3);
    if (ok) ok = branch_direction(locator, u, p + h * k3, k3, f, k4);

    Point2 next;
    if (ok) {
      next = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (locator.locate(next, f) < 0) ok = false;
    }
    if (!ok) {
      // left the domain (or grazed a singular interpolation zero): exit
      // through the boundary along the last reliable direction
      Vec2 d = ref;
      {
        int g = hint;
        Vec2 tmp;
        if (branch_direction(locator, u, p, ref, g, tmp)) d = tmp;
      }
      Point2 hit;
      if (boundary.clip(p, p + (2.0 * h) * d, hit) || boundary.clip(p, p + (10.0 * h) * d, hit)) {
        line.points.push_back(hit);
        line.length = arclen + dist(p, hit);
        line.termination = Termination::BoundaryExit;
        return line;
      }
      // cannot resolve an exit: treat as max-length stop
      line.length = arclen;
      line.termination = Termination::MaxLength;
      return line;
    }

    Vec2 step_dir = normalized(next - p);
    line.max_turn = std::max(line.max_turn, angle_between(ref, step_dir));

    // boundary crossing of the accepted segment (convexity is not assumed)
    {
      Point2 hit;
      if (boundary.clip(p, next, hit)) {
        line.points.push_back(hit);
        line.length = arclen + dist(p, hit);
        line.termination = Termination::BoundaryExit;
        return line;
      }
    }

    arclen += dist(p, next);
    p = next;
    hint = f;
    ref = step_dir;
    line.points.push_back(p);
    line.length = arclen;

    for (size_t i = 0; i < singularities.size(); ++i) {
      double d = dist(p, singularities[i].location);
      if (!armed[i]) {
        if (d > 1.25 * snap[i]) armed[i] = 1;
        continue;
      }
      if (d < snap[i]) {
        line.points.push_back(singularities[i].location);
        line.termination = Termination::Singularity;
        line.hit_singularity = static_cast<int>(i);
        return line;
      }
    }

    int ret = detector.query(p, arclen, ref, h, params.cycle_angle_tol, params.min_cycle_length);
    if (ret >= 0) {
      line.termination = Termination::LimitCycle;
      line.cycle_start_index = ret;
      return line;
    }

    if (arclen >= params.max_length) break;
  }
  line.termination = Termination::MaxLength;
  return line;
}

namespace {

double distance_to_polyline(Point2 p, const std::vector<Point2>& poly, bool closed) {
  double best = std::numeric_limits<double>::max();
  size_t n = poly.size();
  size_t segs = closed ? n : n - 1;
  for (size_t i = 0; i < segs; ++i)
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  return best;
}

bool same_cycle(const std::vector<Point2>& a, const std::vector<Point2>& b, double tol) {
  size_t stride = std::max<size_t>(1, a.size() / 16);
  for (size_t i = 0; i < a.size(); i += stride)
    if (distance_to_polyline(a[i], b, true) > tol) return false;
  return true;
}

}  // namespace

SeparatrixSets trace_separatrices(const PointLocator& locator, const ComplexField& u,
                                  const std::vector<Singularity>& singularities,
                                  const std::vector<Corner>& corners,
                                  const TraceParams& params) {
  const TriMesh& mesh = locator.mesh();
  SeparatrixSets sets;

  auto launch = [&](Point2 origin, double angle, double offset, int sing_id, int corner_id,
                    int exit_k) {
    Vec2 dir = dir_of(angle);
    Point2 seed = origin + offset * dir;
    for (int tries = 0; tries < 8 && locator.locate(seed) < 0; ++tries) {
      offset *= 0.5;
      seed = origin + offset * dir;
    }
    if (locator.locate(seed) < 0) return;  // no room to seed (degenerate sliver)

    Streamline line = trace_streamline(locator, u, seed, dir, params, singularities);
    line.points.insert(line.points.begin(), origin);
    line.origin_singularity = sing_id;
    line.origin_corner = corner_id;
    line.origin_exit = exit_k;

    if (line.termination == Termination::LimitCycle) {
      std::vector<Point2> cycle(line.points.begin() + line.cycle_start_index + 1,
                                line.points.end());
      bool known = false;
      for (const auto& existing : sets.L)
        if (same_cycle(cycle, existing, 4.0 * params.step)) {
          known = true;
          break;
        }
      if (!known) sets.L.push_back(std::move(cycle));
      sets.P.push_back(std::move(line));
    } else if (line.termination == Termination::MaxLength) {
      // conservative: every separatrix that fails to terminate is treated
      // as limit-cycle-bound, since it must intersect another separatrix
      sets.max_length_warnings++;
      sets.P.push_back(std::move(line));
    } else {
      sets.S.push_back(std::move(line));
    }
  };

  for (size_t i = 0; i < singularities.size(); ++i) {
    const auto& s = singularities[i];
    double offset = snap_radius_at(mesh, s, params.snap_factor) * 1.05;
    for (size_t k = 0; k < s.exit_directions.size(); ++k)
      launch(s.location, s.exit_directions[k], offset, static_cast<int>(i), -1,
             static_cast<int>(k));
  }

  for (size_t c = 0; c < corners.size(); ++c) {
    const auto& corner = corners[c];
    if (corner.index_quarters >= 0) continue;  // flat points and convex corners seed nothing
    auto info = boundary_separatrix_directions(mesh, corner);
    double local = 0.0;
    {
      int nxt = mesh.next_boundary_vertex[corner.vertex_id];
      int prv = mesh.prev_boundary_vertex[corner.vertex_id];
      local = 0.5 * (dist(mesh.vertices[corner.vertex_id], mesh.vertices[nxt]) +
                     dist(mesh.vertices[corner.vertex_id], mesh.vertices[prv]));
    }
    for (size_t k = 1; k + 1 < info.exit_directions.size(); ++k)
      launch(mesh.vertices[corner.vertex_id], info.exit_directions[k],
             params.snap_factor * local, -1, static_cast<int>(c), static_cast<int>(k));
  }

  return sets;
}

namespace {

// Earliest intersection along open polyline `path` with `curve`;
// intersections with arc-length along `path` below `skip` are ignored.
bool first_hit(const std::vector<Point2>& path, const Curve& curve, double skip,
               double& hit_arclen, size_t& hit_seg, Point2& hit_point) {
  double arclen = 0.0;
  size_t cn = curve.points.size();
  size_t csegs = curve.closed ? cn : cn - 1;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    double seglen = dist(path[i], path[i + 1]);
    double best_s = std::numeric_limits<double>::max();
    Point2 best_q;
    for (size_t j = 0; j < csegs; ++j) {
      double s, t;
      Point2 q;
      if (segment_intersect(path[i], path[i + 1], curve.points[j], curve.points[(j + 1) % cn], s,
                            t, q)) {
        double along = arclen + s * seglen;
        if (along <= skip) continue;
        if (s < best_s) {
          best_s = s;
          best_q = q;
        }
      }
    }
    if (best_s != std::numeric_limits<double>::max()) {
      hit_arclen = arclen + best_s * seglen;
      hit_seg = i;
      hit_point = best_q;
      return true;
    }
    arclen += seglen;
  }
  return false;
}

Curve truncate_at(const Streamline& sep, size_t seg, Point2 hit) {
  Curve c;
  c.kind = Curve::Kind::Separatrix;
  c.origin_singularity = sep.origin_singularity;
  c.origin_corner = sep.origin_corner;
  c.points.assign(sep.points.begin(), sep.points.begin() + seg + 1);
  c.points.push_back(hit);
  c.ends_in_t_junction = true;
  return c;
}

}  // namespace

PartitionResult partition(const SeparatrixSets& sets, const TraceParams& params) {
  PartitionResult result;
  result.n_s = static_cast<int>(sets.S.size());
  result.n_p = static_cast<int>(sets.P.size());
  result.n_l = static_cast<int>(sets.L.size());

  for (const auto& s : sets.S) {
    Curve c;
    c.kind = Curve::Kind::Separatrix;
    c.points = s.points;
    c.origin_singularity = s.origin_singularity;
    c.origin_corner = s.origin_corner;
    result.B.push_back(std::move(c));
  }

  // ignore intersections inside the seed pocket around the origin
  const double skip = 4.0 * params.step;

  std::vector<const Streamline*> pending;
  for (const auto& p : sets.P) pending.push_back(&p);

  for (const auto& cycle : sets.L) {
    Curve l;
    l.kind = Curve::Kind::LimitCycle;
    l.points = cycle;
    l.closed = true;

    bool crossed = false;
    for (const auto& b : result.B) {
      double alen;
      size_t seg;
      Point2 q;
      std::vector<Point2> closed_pts = l.points;
      closed_pts.push_back(l.points.front());
      if (first_hit(closed_pts, b, 0.0, alen, seg, q)) {
        crossed = true;
        break;
      }
    }
    if (crossed) continue;

    int host = static_cast<int>(result.B.size());
    result.B.push_back(l);

    // one converging separatrix ends in a T-junction on the cycle
    bool attached = false;
    for (size_t pi = 0; pi < pending.size(); ++pi) {
      double alen;
      size_t seg;
      Point2 q;
      if (first_hit(pending[pi]->points, result.B[host], skip, alen, seg, q)) {
        Curve cut = truncate_at(*pending[pi], seg, q);
        int cut_id = static_cast<int>(result.B.size());
        result.B.push_back(std::move(cut));
        result.t_junctions.push_back({q, cut_id, host});
        pending.erase(pending.begin() + pi);
        attached = true;
        break;
      }
    }
    if (!attached) {
      // The separatrix that detected this cycle approaches it asymptotically
      // and its polyline may stay on one side without a proper crossing.
      // Attach it at its closest approach, within tracing tolerance.
      double best = std::numeric_limits<double>::max();
      size_t pbest = pending.size();
      for (size_t pi = 0; pi < pending.size(); ++pi) {
        double d = distance_to_polyline(pending[pi]->points.back(), l.points, true);
        if (d < best) {
          best = d;
          pbest = pi;
        }
      }
      if (pbest == pending.size() || best > 8.0 * params.step)
        throw TracingError(
            "partition: no separatrix reaches an isolated limit cycle (tracing tolerance "
            "failure)");
      const Streamline& sep = *pending[pbest];
      Point2 endp = sep.points.back();
      // project onto the cycle
      Point2 proj = endp;
      double pb = std::numeric_limits<double>::max();
      size_t cn = result.B[host].points.size();
      for (size_t j = 0; j < cn; ++j) {
        Point2 a = result.B[host].points[j];
        Point2 b2 = result.B[host].points[(j + 1) % cn];
        Vec2 ab = b2 - a;
        double L2 = norm2(ab);
        double t = L2 > 0 ? std::clamp(dot(endp - a, ab) / L2, 0.0, 1.0) : 0.0;
        Point2 q = a + t * ab;
        double d = dist(endp, q);
        if (d < pb) {
          pb = d;
          proj = q;
        }
      }
      Curve cut;
      cut.kind = Curve::Kind::Separatrix;
      cut.origin_singularity = sep.origin_singularity;
      cut.origin_corner = sep.origin_corner;
      cut.points = sep.points;
      cut.points.push_back(proj);
      cut.ends_in_t_junction = true;
      int cut_id = static_cast<int>(result.B.size());
      result.B.push_back(std::move(cut));
      result.t_junctions.push_back({proj, cut_id, host});
      pending.erase(pending.begin() + pbest);
    }
  }

  for (const auto* sep : pending) {
    double best_arclen = std::numeric_limits<double>::max();
    size_t best_seg = 0;
    Point2 best_q;
    int best_host = -1;
    for (size_t bi = 0; bi < result.B.size(); ++bi) {
      double alen;
      size_t seg;
      Point2 q;
      if (first_hit(sep->points, result.B[bi], skip, alen, seg, q) && alen < best_arclen) {
        best_arclen = alen;
        best_seg = seg;
        best_q = q;
        best_host = static_cast<int>(bi);
      }
    }
    if (best_host < 0)
      throw TracingError(
          "partition: limit-cycle-bound separatrix intersects no accepted curve (tracing "
          "tolerance failure)");
    Curve cut = truncate_at(*sep, best_seg, best_q);
    int cut_id = static_cast<int>(result.B.size());
    result.B.push_back(std::move(cut));
    result.t_junctions.push_back({best_q, cut_id, best_host});
  }

  return result;
}

}  // namespace xf
