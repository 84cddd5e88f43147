#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xfield/geom.hpp"

namespace xf {

/// One closed boundary loop. The outer loop is stored counterclockwise,
/// hole loops clockwise, so the domain interior is always on the left of
/// the directed edges.
struct BoundaryLoop {
  std::vector<int> vertex_ids;
  bool is_outer = false;
  double signed_area = 0.0;
};

/// Planar triangulation with oriented boundary. Immutable after build();
/// safe to share read-only across threads.
class TriMesh {
 public:
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<BoundaryLoop> boundary_loops;

  // adjacency, filled by build()
  std::vector<std::array<int, 3>> tri_neighbors;  // across edge opposite vertex i; -1 on boundary
  std::vector<bool> vertex_on_boundary;
  std::vector<std::vector<int>> vertex_triangles;
  std::vector<int> next_boundary_vertex;  // -1 for interior vertices
  std::vector<int> prev_boundary_vertex;

  int edge_count = 0;
  double mean_edge_length = 0.0;
  double total_area = 0.0;
  Point2 bbox_min, bbox_max;

  static TriMesh build(std::vector<Point2> vertices,
                       std::vector<std::array<int, 3>> triangles);

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(triangles.size()); }
  int euler_characteristic() const {
    return vertex_count() - edge_count + face_count();
  }
  double diameter() const { return dist(bbox_min, bbox_max); }

  double triangle_area(int f) const;
  Point2 triangle_barycenter(int f) const;
  double local_edge_length(int f) const;  // mean edge length of face f

  /// Barycentric coordinates of p in face f (can be negative outside).
  std::array<double, 3> barycentric(int f, Point2 p) const;

  /// Exterior-angle turning number of a boundary loop (+1 outer, -1 holes).
  int turning_number(const BoundaryLoop& loop) const;
};

enum class MeshFormat { OFF, OBJ };

TriMesh load_mesh(const std::string& path, MeshFormat format);
TriMesh load_mesh(const std::string& path);  // format from extension
void save_off(const TriMesh& mesh, const std::string& path);

/// A flagged boundary corner. index_quarters k means cross-field index k/4.
struct Corner {
  int vertex_id = -1;
  int loop = -1;
  double interior_angle = 0.0;  // radians in (0, 2pi)
  int index_quarters = 0;
  std::optional<int> user_override;
  bool clamped = false;  // raw index exceeded +1 and was clamped
};

/// A boundary vertex is a corner iff |pi - interior_angle| > angle_tol.
/// index_quarters = round(2(pi - angle)/pi), clamped to <= 1.
std::vector<Corner> detect_corners(const TriMesh& mesh, double angle_tol = 0.349);

/// Plain text override file: lines "vertex_id k".
std::map<int, int> load_corner_overrides(const std::string& path);
void apply_corner_overrides(const TriMesh& mesh, std::vector<Corner>& corners,
                            const std::map<int, int>& overrides);

/// 4-aligned boundary data g, one unit complex value per boundary vertex.
struct BoundaryCondition {
  std::map<int, Complex> values;

  Complex at(int vertex) const;
};

/// g = (bisector outward normal)^4 at smooth vertices; at a corner with
/// index k the value additionally carries the factor (-1)^k so the winding
/// of g along each loop equals 4*(turning number) - sum of corner quarters.
BoundaryCondition assign_boundary_condition(const TriMesh& mesh,
                                            const std::vector<Corner>& corners);

/// Winding number of g along the loop in its stored orientation,
/// by principal-value increments. Errors on near-antipodal neighbors.
int brouwer_degree(const BoundaryCondition& bc, const BoundaryLoop& loop);

/// Uniform 1->4 refinement (edge midpoints). Straight boundary edges only.
TriMesh uniform_refine(const TriMesh& mesh);

/// Point-location accelerator. Build once per mesh; immutable afterwards.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh);

  /// Returns face id containing p, or -1. `hint` seeds a neighbor walk.
  int locate(Point2 p, int hint = -1) const;
  const TriMesh& mesh() const { return *mesh_; }

 private:
  int grid_cell(Point2 p) const;
  const TriMesh* mesh_;
  double cell_size_;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> cells_;
};

}  // namespace xf
