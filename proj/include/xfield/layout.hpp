#pragma once

#include "xfield/trace.hpp"

namespace xf {

enum class NodeKind { Singularity, Corner, BoundaryExit, TJunction, CurveIntersection };

struct LayoutNode {
  int id = -1;
  NodeKind kind = NodeKind::CurveIntersection;
  Point2 position;
};

struct LayoutArc {
  int id = -1;
  int src = -1;
  int dst = -1;
  std::vector<Point2> polyline;  // includes endpoints
  Curve::Kind source_kind = Curve::Kind::Separatrix;
};

enum class FaceKind { Quad, Annulus, TJunctionRegion, Invalid };

struct LayoutFace {
  int id = -1;
  std::vector<int> arcs;                  // signed: +(id+1) forward, -(id+1) reversed
  std::vector<int> corner_nodes;          // nodes where the boundary turns
  std::vector<std::vector<int>> islands;  // inner cycles (annulus holes), signed arc lists
  FaceKind kind = FaceKind::Invalid;
  bool has_t_junction = false;            // a T-junction lies flat on this face's boundary
  double signed_area = 0.0;
};

struct TJunctionRecord {
  int node = -1;
  int cut_arc = -1;
  int host_arc = -1;
};

struct QuadLayout {
  std::vector<LayoutNode> nodes;
  std::vector<LayoutArc> arcs;
  std::vector<LayoutFace> faces;      // positive (domain) faces only
  std::vector<TJunctionRecord> t_junctions;
  int cycle_count = 0;                // all orbit cycles incl. outer/holes (Euler checks)
  int component_count = 1;
};

/// Planar arrangement of the accepted curves together with the domain
/// boundary; faces extracted by leftmost-turn traversal.
QuadLayout build_layout(const TriMesh& mesh, const PartitionResult& partition,
                        const std::vector<Corner>& corners,
                        const std::vector<Singularity>& singularities);

struct RegionReport {
  int face_id = -1;
  FaceKind kind = FaceKind::Invalid;
  int corner_count = 0;
  std::vector<std::string> violations;
};

struct ValidationReport {
  std::vector<RegionReport> regions;
  int violation_count = 0;
  bool ok() const { return violation_count == 0; }
};

/// Checks every face: corners must pair orthogonal arcs in the cross field
/// (sector index 1/4) within `angle_tol`; classifies quad / annulus /
/// T-junction region.
ValidationReport validate_regions(const QuadLayout& layout, const PointLocator& locator,
                                  const ComplexField& u, double angle_tol = 5.0 * kPi / 180.0);

struct RegionGrid {
  int face_id = -1;
  int m = 0, n = 0;
  std::vector<Point2> points;  // (m+1) x (n+1), row-major
  Point2 at(int i, int j) const { return points[static_cast<size_t>(j) * (m + 1) + i]; }
};

/// Coons-patch transfinite interpolation of the four boundary arcs of a
/// quad face, arc-length parameterized. Errors on T-junction or non-quad
/// faces.
RegionGrid map_grid_into_region(const QuadLayout& layout, int face_id, int m, int n);

/// True when every grid cell has positive Jacobian at its four corners.
bool grid_cells_positive(const RegionGrid& grid);

void export_layout(const QuadLayout& layout, const std::string& path);
QuadLayout import_layout(const std::string& path);

struct SvgOptions {
  bool draw_mesh = false;
  bool draw_streamlines = false;
  int streamline_seeds = 12;
  bool draw_arcs = true;
  bool draw_singularities = true;
};

void export_svg(const TriMesh& mesh, const ComplexField* u, const QuadLayout* layout,
                const std::vector<Singularity>& singularities, const std::string& path,
                const SvgOptions& options = {});

}  // namespace xf
