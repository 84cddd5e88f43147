#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "xfield/crossfield.hpp"
#include "xfield/gl.hpp"

using namespace xf;

namespace {

struct Domain {
  TriMesh mesh;
  std::vector<Corner> corners;
  BoundaryCondition bc;
  P1System sys;
};

Domain setup(TriMesh mesh, double angle_tol = 0.349) {
  Domain d{std::move(mesh), {}, {}, {}};
  d.corners = detect_corners(d.mesh, angle_tol);
  d.bc = assign_boundary_condition(d.mesh, d.corners);
  d.sys = assemble_p1(d.mesh);
  return d;
}

ComplexField unit_init(const Domain& d) {
  ComplexField u = harmonic_init(d.mesh, d.sys, d.bc);
  normalize_field(u);
  for (const auto& [v, g] : d.bc.values) u[v] = g;
  return u;
}

}  // namespace

TEST_CASE("normalize_field basics") {
  ComplexField u(3);
  u[0] = Complex(3.0, 4.0);
  u[1] = Complex(0.6, 0.8);
  u[2] = Complex(1e-20, 0.0);
  int perturbed = normalize_field(u);
  CHECK(std::abs(u[0] - Complex(0.6, 0.8)) < 1e-15);
  CHECK(std::abs(u[1] - Complex(0.6, 0.8)) < 1e-15);  // idempotent on unit input
  CHECK(std::abs(std::abs(u[2]) - 1.0) < 1e-12);
  CHECK(perturbed == 1);
}

TEST_CASE("MBO on the square converges to a singularity-free field") {
  Domain d = setup(make_square(12));
  MboParams params;
  MboResult res = mbo_minimize(d.mesh, d.sys, d.bc, params, unit_init(d));
  CHECK(res.converged);
  CHECK(detect_singularities(d.mesh, res.u).empty());
  // constant cross directions: the representation field is constant 1
  for (int v = 0; v < d.mesh.vertex_count(); ++v)
    CHECK(std::abs(res.u[v] - Complex(1.0, 0.0)) < 1e-6);
}

TEST_CASE("MBO invariants: unit modulus, boundary data, fixed-point consistency") {
  Domain d = setup(make_disk(12));
  MboParams params;
  MboResult res = mbo_minimize(d.mesh, d.sys, d.bc, params, unit_init(d));
  REQUIRE(res.converged);
  for (int v = 0; v < d.mesh.vertex_count(); ++v)
    CHECK(std::abs(std::abs(res.u[v]) - 1.0) < 1e-12);
  for (const auto& [v, g] : d.bc.values) CHECK(std::abs(res.u[v] - g) < 1e-12);

  // one more MBO step moves the field by at most the stopping threshold
  double lambda1 = estimate_lambda1(d.mesh, d.sys);
  DiffusionOperator op(d.mesh, d.sys, params.tau_scale / lambda1);
  ComplexField next = op.step(res.u, d.bc);
  normalize_field(next);
  int interior = op.interior_count();
  CHECK((next - res.u).norm() <= 2.0 * interior * params.delta);
}

TEST_CASE("MBO on the disk yields four symmetric +1 vortices") {
  Domain d = setup(make_disk(16));
  MboResult res = mbo_minimize(d.mesh, d.sys, d.bc, {}, unit_init(d));
  REQUIRE(res.converged);
  auto sings = detect_singularities(d.mesh, res.u);
  REQUIRE(sings.size() == 4);
  Point2 centroid{0, 0};
  for (const auto& s : sings) {
    CHECK(s.rep_degree == 1);
    centroid += s.location / 4.0;
  }
  // 90-degree rotation about the centroid permutes the vortex set
  for (const auto& s : sings) {
    Vec2 r = s.location - centroid;
    Point2 rotated = centroid + Vec2{-r.y, r.x};
    double best = 1e9;
    for (const auto& t : sings) best = std::min(best, dist(rotated, t.location));
    CHECK(best < 3.0 * d.mesh.mean_edge_length);
  }
}

TEST_CASE("MBO on the paper-size half disk converges in tens of iterations") {
  Domain d = setup(make_half_disk(13));  // 287 nodes
  MboResult res = mbo_minimize(d.mesh, d.sys, d.bc, {}, unit_init(d));
  REQUIRE(res.converged);
  CHECK(res.iterations >= 2);
  CHECK(res.iterations <= 75);
  auto sings = detect_singularities(d.mesh, res.u);
  REQUIRE(sings.size() == 2);
  for (const auto& s : sings) CHECK(s.rep_degree == 1);
}

TEST_CASE("max_iter exhaustion reports non-convergence") {
  Domain d = setup(make_disk(12));
  MboParams params;
  params.max_iter = 1;
  params.delta = 1e-12;
  MboResult res = mbo_minimize(d.mesh, d.sys, d.bc, params, unit_init(d));
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 1);
}

TEST_CASE("canonical map: empty config on the mushroom is singularity free") {
  Domain d = setup(make_mushroom(0.06));
  REQUIRE(brouwer_degree(d.bc, d.mesh.boundary_loops[0]) == 0);
  ComplexField u = canonical_harmonic_map(d.mesh, d.sys, d.bc, {});
  CHECK(detect_singularities(d.mesh, u).empty());
  for (int v = 0; v < d.mesh.vertex_count(); ++v)
    CHECK(std::abs(std::abs(u[v]) - 1.0) < 1e-12);
}

TEST_CASE("canonical map: hexagon with a center degree -2 singularity") {
  Domain d = setup(make_hexagon(14));
  SingularityConfig config{{{0.01, 0.013}, -2}};
  ComplexField u = canonical_harmonic_map(d.mesh, d.sys, d.bc, config);
  auto sings = detect_singularities(d.mesh, u);
  REQUIRE(sings.size() == 1);
  CHECK(sings[0].rep_degree == -2);
  CHECK(dist(sings[0].location, config[0].location) < 2.0 * d.mesh.mean_edge_length);
  CHECK(sings[0].exit_directions.size() == 6);
}

TEST_CASE("canonical map on the disk with center degree 4 matches (z/|z|)^4") {
  Domain d = setup(make_disk(16));
  SingularityConfig config{{{0.0, 0.0}, 4}};
  ComplexField u = canonical_harmonic_map(d.mesh, d.sys, d.bc, config);
  for (int v = 0; v < d.mesh.vertex_count(); ++v) {
    Point2 p = d.mesh.vertices[v];
    if (norm(p) < 1e-9) continue;  // the singular node itself
    Complex z = to_complex(p);
    Complex expected = std::pow(z / std::abs(z), 4);
    CHECK(std::abs(u[v] - expected) < 1e-8);
  }
}

TEST_CASE("canonical map rejects bad configurations") {
  Domain d = setup(make_disk(10));
  CHECK_THROWS_WITH_AS(canonical_harmonic_map(d.mesh, d.sys, d.bc, {}),
                       doctest::Contains("degree mismatch"), Error);
  SingularityConfig coincident{{{0.2, 0.2}, 2}, {{0.2, 0.2}, 2}};
  CHECK_THROWS_WITH_AS(canonical_harmonic_map(d.mesh, d.sys, d.bc, coincident),
                       doctest::Contains("coincident"), Error);
  SingularityConfig outside{{{5.0, 0.0}, 4}};
  CHECK_THROWS_AS(canonical_harmonic_map(d.mesh, d.sys, d.bc, outside), Error);

  Domain holes = setup(make_two_hole(6));
  CHECK_THROWS_WITH_AS(canonical_harmonic_map(holes.mesh, holes.sys, holes.bc, {}),
                       doctest::Contains("simply connected"), Error);
}

TEST_CASE("canonical map is independent of the unwrap start point") {
  Domain d = setup(make_hexagon(8));
  SingularityConfig config{{{0.02, 0.01}, -2}};
  ComplexField a = canonical_harmonic_map(d.mesh, d.sys, d.bc, config, 0);
  size_t half = d.mesh.boundary_loops[0].vertex_ids.size() / 2;
  ComplexField b = canonical_harmonic_map(d.mesh, d.sys, d.bc, config, half);
  // align global phase at node 0, then fields agree everywhere
  Complex phase = a[0] / b[0];
  double worst = 0.0;
  for (int v = 0; v < d.mesh.vertex_count(); ++v)
    worst = std::max(worst, std::abs(a[v] - phase * b[v]));
  CHECK(worst < 1e-10);
  CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
}

TEST_CASE("degree-0 canonical map is the harmonic-angle field") {
  Domain d = setup(make_l_shape(8));
  REQUIRE(brouwer_degree(d.bc, d.mesh.boundary_loops[0]) == 0);
  ComplexField u = canonical_harmonic_map(d.mesh, d.sys, d.bc, {});

  // independent route: unwrap arg(g) along the boundary, harmonically
  // extend the angle, exponentiate
  const auto& ids = d.mesh.boundary_loops[0].vertex_ids;
  std::map<int, double> phi0;
  double prev = std::arg(d.bc.at(ids[0]));
  phi0[ids[0]] = prev;
  for (size_t i = 1; i < ids.size(); ++i) {
    double raw = std::arg(d.bc.at(ids[i]));
    prev += wrap_pi(raw - prev);
    phi0[ids[i]] = prev;
  }
  DirichletSolver solver(d.mesh, d.sys);
  Eigen::VectorXd phi = solver.solve(phi0);
  for (int v = 0; v < d.mesh.vertex_count(); ++v)
    CHECK(std::abs(u[v] - std::polar(1.0, phi[v])) < 1e-10);
}

TEST_CASE("gl_energy: constant field, zero field, annulus vortex energy") {
  Domain d = setup(make_square(8));
  ComplexField one = ComplexField::Constant(d.mesh.vertex_count(), Complex(1.0, 0.0));
  GlEnergy e = gl_energy(d.sys, one, 1.0);
  CHECK(e.dirichlet == doctest::Approx(0.0));
  CHECK(e.penalty == doctest::Approx(0.0));

  ComplexField zero = ComplexField::Zero(d.mesh.vertex_count());
  GlEnergy ez = gl_energy(d.sys, zero, 1.0);
  CHECK(ez.penalty == doctest::Approx(0.25));  // (0-1)^2/4 over unit area

  // u = z/|z| on the annulus a <= r <= 1: Dirichlet energy pi ln(1/a)
  const double a = 0.35;
  double prev_err = 1e9;
  for (int res : {16, 32}) {
    TriMesh ann = make_annulus(a, res, 8 * res);
    P1System sys = assemble_p1(ann);
    ComplexField u(ann.vertex_count());
    for (int v = 0; v < ann.vertex_count(); ++v) {
      Complex z = to_complex(ann.vertices[v]);
      u[v] = z / std::abs(z);
    }
    double energy = gl_energy(sys, u, 1.0).dirichlet;
    double err = std::abs(energy - kPi * std::log(1.0 / a));
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 0.01);
}

TEST_CASE("analytic GL gradient matches central finite differences") {
  Domain d = setup(make_square(2));  // 9 nodes
  REQUIRE(d.mesh.vertex_count() <= 12);
  const double eps = 0.5;
  ComplexField u(d.mesh.vertex_count());
  for (int v = 0; v < d.mesh.vertex_count(); ++v)
    u[v] = Complex(0.9 * std::cos(1.3 * v) + 0.1, 0.8 * std::sin(2.1 * v));
  for (const auto& [v, g] : d.bc.values) u[v] = g;

  ComplexField grad = gl_gradient(d.mesh, d.sys, u, eps);
  const double h = 1e-6;
  for (int v = 0; v < d.mesh.vertex_count(); ++v) {
    if (d.mesh.vertex_on_boundary[v]) {
      CHECK(std::abs(grad[v]) == 0.0);
      continue;
    }
    for (int part = 0; part < 2; ++part) {
      ComplexField up = u, um = u;
      Complex dh = part == 0 ? Complex(h, 0) : Complex(0, h);
      up[v] += dh;
      um[v] -= dh;
      double fd = (gl_energy(d.sys, up, eps).total() - gl_energy(d.sys, um, eps).total()) /
                  (2.0 * h);
      double an = part == 0 ? grad[v].real() : grad[v].imag();
      CHECK(std::abs(fd - an) / std::max(1.0, std::abs(an)) < 1e-6);
    }
  }
}

TEST_CASE("direct minimizer: energy decreases and matches MBO on the square") {
  Domain d = setup(make_square(10));
  ComplexField init = unit_init(d);
  double eps = 2.0 * d.mesh.mean_edge_length;

  DescentResult direct = direct_minimize_gl(d.mesh, d.sys, d.bc, eps, init, {});
  CHECK(direct.converged);
  CHECK(direct.final_energy <= gl_energy(d.sys, init, eps).total() + 1e-12);

  MboResult mbo = mbo_minimize(d.mesh, d.sys, d.bc, {}, init);
  REQUIRE(mbo.converged);

  ComplexField du = direct.u;
  normalize_field(du);
  CHECK(detect_singularities(d.mesh, du).empty());
  for (int v = 0; v < d.mesh.vertex_count(); ++v) {
    double angle_diff = std::abs(wrap_pi(std::arg(du[v]) - std::arg(mbo.u[v])));
    CHECK(angle_diff < 1e-3);
  }
}

TEST_CASE("direct minimizer agrees with MBO on the disk vortex structure") {
  Domain d = setup(make_disk(11));  // 265 nodes
  ComplexField init = unit_init(d);
  double eps = 2.0 * d.mesh.mean_edge_length;

  MboResult mbo = mbo_minimize(d.mesh, d.sys, d.bc, {}, init);
  DescentResult direct = direct_minimize_gl(d.mesh, d.sys, d.bc, eps, init, {});
  REQUIRE(mbo.converged);
  REQUIRE(direct.converged);

  ComplexField du = direct.u;
  normalize_field(du);
  auto ms = detect_singularities(d.mesh, mbo.u);
  auto ds = detect_singularities(d.mesh, du);
  REQUIRE(ms.size() == 4);
  REQUIRE(ds.size() == 4);
  for (const auto& s : ms) CHECK(s.rep_degree == 1);
  for (const auto& s : ds) CHECK(s.rep_degree == 1);
  for (const auto& s : ms) {
    double best = 1e9;
    for (const auto& t : ds) best = std::min(best, dist(s.location, t.location));
    CHECK(best <= 5.0 * d.mesh.mean_edge_length);
  }
}
