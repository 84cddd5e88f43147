#pragma once

#include "xfield/crossfield.hpp"

namespace xf {

enum class Termination { Singularity, BoundaryExit, HitCurve, LimitCycle, MaxLength };

struct Streamline {
  std::vector<Point2> points;
  Termination termination = Termination::MaxLength;
  int hit_singularity = -1;   // for Termination::Singularity
  int hit_curve = -1;         // filled by partition() when truncated
  int cycle_start_index = -1; // for Termination::LimitCycle: index of splice point
  double length = 0.0;
  double max_turn = 0.0;      // largest per-step direction change (branch continuity)
  int origin_singularity = -1;
  int origin_corner = -1;
  int origin_exit = -1;       // which exit direction was seeded
};

struct TraceParams {
  double step = 0.0;              // h; default 0.25 * mean edge length
  double max_length = 0.0;        // default 50 * domain diameter
  double snap_factor = 1.5;       // snap radius = snap_factor * local edge length
  double min_cycle_length = 0.0;  // default 0.1 * domain diameter
  double cycle_angle_tol = kPi / 8.0;

  static TraceParams defaults(const TriMesh& mesh) {
    TraceParams p;
    p.step = 0.25 * mesh.mean_edge_length;
    p.max_length = 50.0 * mesh.diameter();
    p.min_cycle_length = 0.1 * mesh.diameter();
    return p;
  }
};

/// RK4 streamline of the branch-selected cross direction field: at each
/// evaluation the cross direction nearest the incoming direction is taken,
/// so the quarter-turn ambiguity never flips mid-step.
Streamline trace_streamline(const PointLocator& locator, const ComplexField& u, Point2 start,
                            Vec2 dir0, const TraceParams& params,
                            const std::vector<Singularity>& singularities);

struct SeparatrixSets {
  std::vector<Streamline> S;              // end at a singularity or the boundary
  std::vector<Streamline> P;              // converge to a limit cycle (or max length)
  std::vector<std::vector<Point2>> L;     // one representative closed orbit per cycle
  int max_length_warnings = 0;
};

/// Launches one streamline per interior exit direction and per corner
/// interior separatrix (corners with negative index only), seeded at snap
/// radius along the exit direction.
SeparatrixSets trace_separatrices(const PointLocator& locator, const ComplexField& u,
                                  const std::vector<Singularity>& singularities,
                                  const std::vector<Corner>& corners, const TraceParams& params);

struct Curve {
  enum class Kind { Separatrix, LimitCycle, Boundary };
  Kind kind = Kind::Separatrix;
  std::vector<Point2> points;
  bool closed = false;
  int origin_singularity = -1;
  int origin_corner = -1;
  bool ends_in_t_junction = false;
};

struct TJunction {
  Point2 point;
  int cut_curve = -1;   // index into PartitionResult::B
  int host_curve = -1;
};

struct PartitionResult {
  std::vector<Curve> B;
  std::vector<TJunction> t_junctions;
  int n_s = 0, n_p = 0, n_l = 0;
};

/// Thrown when a limit-cycle-bound separatrix fails to intersect the
/// accepted curve set (violated tracing tolerance).
struct TracingError : Error {
  using Error::Error;
};

/// Quad-layout partitioning: B starts as S; each limit cycle nobody crosses
/// is added together with one converging separatrix truncated at a
/// T-junction on it; every remaining converging separatrix is truncated at
/// its first intersection with B.
PartitionResult partition(const SeparatrixSets& sets, const TraceParams& params);

}  // namespace xf
