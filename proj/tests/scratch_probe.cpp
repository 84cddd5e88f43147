#include <cstdio>

#include "xfield/crossfield.hpp"
#include "xfield/gl.hpp"
#include "xfield/shapes.hpp"

using namespace xf;

int main(int argc, char** argv) {
  int rings = argc > 1 ? std::atoi(argv[1]) : 24;
  int which = argc > 2 ? std::atoi(argv[2]) : 0;

  TriMesh mesh = which == 0 ? make_disk(rings) : make_half_disk(rings);
  std::printf("mesh: %d vertices, %d faces, mean edge %.4f\n", mesh.vertex_count(),
              mesh.face_count(), mesh.mean_edge_length);
  auto corners = detect_corners(mesh, 0.349);
  BoundaryCondition bc = assign_boundary_condition(mesh, corners);
  std::printf("corners: %zu, deg = %d\n", corners.size(),
              brouwer_degree(bc, mesh.boundary_loops[0]));

  P1System sys = assemble_p1(mesh);
  double l1 = estimate_lambda1(mesh, sys);
  std::printf("lambda1 = %.4f\n", l1);

  MboParams params;
  params.max_iter = 5000;
  ComplexField init = harmonic_init(mesh, sys, bc);
  normalize_field(init);
  for (const auto& [v, g] : bc.values) init[v] = g;
  MboResult res = mbo_minimize(mesh, sys, bc, params, init);
  std::printf("MBO: %d iterations, converged=%d, perturbed=%d\n", res.iterations,
              res.converged, res.perturbed_nodes);

  auto sings = detect_singularities(mesh, res.u);
  std::printf("singularities: %zu\n", sings.size());
  for (const auto& s : sings)
    std::printf("  face %d deg %+d at (%.4f, %.4f), %zu exits, theta0 %.3f\n", s.face_id,
                s.rep_degree, s.location.x, s.location.y, s.exit_directions.size(), s.theta0);
  return 0;
}
