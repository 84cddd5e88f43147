#pragma once

#include "xfield/fem.hpp"

namespace xf {

/// A cross sampled at a point: the four quarter-turn directions, i.e. the
/// fourth roots of the interpolated representation value.
struct CrossSample {
  Point2 location;
  std::array<double, 4> directions;  // angles, directions[0] = arg(u)/4
};

/// P1-interpolates u at p and returns the four cross directions.
/// Errors if p is outside the mesh or the interpolated modulus is < 1e-12.
CrossSample sample_cross(const PointLocator& locator, const ComplexField& u, Point2 p,
                         int face_hint = -1);

/// Principal-value winding of u around face f (always in {-1, 0, +1}).
int face_winding(const TriMesh& mesh, const ComplexField& u, int f);

/// Zero of the real-linear interpolant of u in a face with nonzero winding.
/// Degenerate (collinear) nodal values return the barycenter with a flag.
Point2 locate_zero_in_face(const TriMesh& mesh, const ComplexField& u, int f,
                           bool* degenerate = nullptr);

struct Singularity {
  int face_id = -1;
  Point2 location;
  int rep_degree = 0;      // winding of the representation field
  double theta0 = 0.0;     // fitted phase of the local model arg(u) ~ d theta + theta0
  std::vector<double> exit_directions;  // 4 - d separatrix angles
  std::vector<int> cluster_faces;       // faces merged into this singularity
  bool higher_degree_warning = false;   // |rep_degree| >= 2
};

struct DetectOptions {
  bool cluster = true;          // merge adjacent singular faces
  bool fit_directions = true;   // fill theta0 / exit_directions
};

/// Per-face winding detection. Adjacent singular faces are merged into one
/// singularity (a P1 face can only carry winding +-1, so prescribed degrees
/// |d| >= 2 alias into a small cluster whose windings sum to d exactly).
std::vector<Singularity> detect_singularities(const TriMesh& mesh, const ComplexField& u,
                                              const DetectOptions& opts = {});

/// Fits theta0 on a node ring around the singularity and fills the 4 - d
/// evenly spaced exit directions (2 pi k + theta0)/(4 - d).
void separatrix_directions(const TriMesh& mesh, const ComplexField& u, Singularity& sing);

struct BoundarySingularityInfo {
  int vertex_id = -1;
  int index_quarters = 0;
  int sectors = 0;
  std::vector<double> exit_directions;  // absolute angles, incl. both boundary tangents
};

/// Exit directions phi_k = angle(post-corner tangent) + interior_angle * k/(2-d)
/// for k = 0..2-d. Errors for d >= 2 (infinitely many separatrices).
BoundarySingularityInfo boundary_separatrix_directions(const TriMesh& mesh, const Corner& corner);

struct PoincareHopf {
  int lhs_quarters = 0;  // 4 * (sum interior cross indices + sum corner indices)
  int rhs_quarters = 0;  // 4 * Euler characteristic
  bool ok = false;
};

PoincareHopf poincare_hopf_check(const TriMesh& mesh, const std::vector<Singularity>& sings,
                                 const std::vector<Corner>& corners);

/// Independent exit-direction oracle: scans a circle of the given radius
/// around `center` for directions where a cross branch points straight away
/// from the center (the zeros of arg(u)/4 - theta mod pi/2).
std::vector<double> measure_exit_directions(const PointLocator& locator, const ComplexField& u,
                                            Point2 center, double radius, int samples = 1440);

}  // namespace xf
