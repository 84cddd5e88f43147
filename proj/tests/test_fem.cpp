#include <Eigen/Dense>

#include "doctest.h"
#include "helpers.hpp"
#include "xfield/fem.hpp"

using namespace xf;

namespace {

// tiny mesh with interior nodes: 3x3 square grid (9 verts, 1 interior)
TriMesh tiny_square() { return make_square(2); }

Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& s) { return Eigen::MatrixXd(s); }

}  // namespace

TEST_CASE("P1 stiffness of the unit right triangle") {
  // stiffness rows for vertices (0,0), (1,0), (0,1); hand-integrated
  std::vector<Point2> verts = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {1, 3, 2}};
  TriMesh mesh = TriMesh::build(verts, tris);
  P1System sys = assemble_p1(mesh);
  Eigen::MatrixXd K = dense(sys.stiffness);
  CHECK(K(0, 0) == doctest::Approx(1.0));
  CHECK(K(0, 1) == doctest::Approx(-0.5));
  CHECK(K(0, 2) == doctest::Approx(-0.5));
  CHECK(K(1, 1) == doctest::Approx(1.0));
  CHECK(K(1, 2) == doctest::Approx(0.0));
  CHECK(K(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("stiffness annihilates constants; lumped mass sums to area") {
  TriMesh mesh = make_square(5);
  P1System sys = assemble_p1(mesh);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.vertex_count());
  CHECK((sys.stiffness * ones).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(sys.mass_diag.sum() == doctest::Approx(1.0));
  Eigen::VectorXd x(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) x[v] = std::sin(3.1 * v) + 0.2 * v;
  CHECK(x.dot(sys.stiffness * x) >= -1e-12);
  // symmetry
  Eigen::MatrixXd K = dense(sys.stiffness);
  CHECK((K - K.transpose()).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("degenerate triangles are rejected") {
  std::vector<Point2> verts = {{0, 0}, {1, 0}, {0, 1}, {0.5, 0.5 + 1e-16}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {1, 3, 2}};
  // the second triangle is a sliver of essentially zero area
  CHECK_THROWS_AS(assemble_p1(TriMesh::build(verts, tris)), Error);
}

TEST_CASE("diffusion step: constants are stationary") {
  TriMesh mesh = make_square(5);
  P1System sys = assemble_p1(mesh);
  DiffusionOperator op(mesh, sys, 0.1);
  ComplexField u = ComplexField::Constant(mesh.vertex_count(), Complex(1.0, 0.0));
  BoundaryCondition bc;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.vertex_on_boundary[v]) bc.values[v] = Complex(1.0, 0.0);
  ComplexField out = op.step(u, bc);
  CHECK((out - u).norm() < 1e-12);
}

TEST_CASE("diffusion tends to the harmonic extension for large tau") {
  TriMesh mesh = make_square(6);
  P1System sys = assemble_p1(mesh);
  DiffusionOperator op(mesh, sys, 1e8);
  ComplexField u = ComplexField::Zero(mesh.vertex_count());
  BoundaryCondition bc;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.vertex_on_boundary[v]) bc.values[v] = Complex(1.0, 0.0);
  ComplexField out = op.step(u, bc);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    CHECK(std::abs(out[v] - Complex(1.0, 0.0)) < 1e-6);
}

TEST_CASE("diffusion step is jointly linear in (u, g)") {
  TriMesh mesh = make_square(4);
  P1System sys = assemble_p1(mesh);
  DiffusionOperator op(mesh, sys, 0.05);

  auto random_field = [&](unsigned seed) {
    ComplexField u(mesh.vertex_count());
    unsigned s = seed;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      s = s * 1664525u + 1013904223u;
      double a = static_cast<double>(s % 1000) / 500.0 - 1.0;
      s = s * 1664525u + 1013904223u;
      double b = static_cast<double>(s % 1000) / 500.0 - 1.0;
      u[v] = Complex(a, b);
    }
    return u;
  };
  ComplexField u1 = random_field(7), u2 = random_field(99);
  BoundaryCondition g1, g2, g12;
  const double alpha = 0.7, beta = -1.3;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (!mesh.vertex_on_boundary[v]) continue;
    g1.values[v] = u1[v];
    g2.values[v] = u2[v];
    g12.values[v] = alpha * u1[v] + beta * u2[v];
  }
  ComplexField lhs = op.step(alpha * u1 + beta * u2, g12);
  ComplexField rhs = alpha * op.step(u1, g1) + beta * op.step(u2, g2);
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("factorization reuse is bitwise deterministic") {
  TriMesh mesh = make_square(5);
  P1System sys = assemble_p1(mesh);
  DiffusionOperator op(mesh, sys, 0.02);
  ComplexField u(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v)
    u[v] = std::polar(1.0, 0.1 * v);
  BoundaryCondition bc;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.vertex_on_boundary[v]) bc.values[v] = u[v];
  ComplexField a = op.step(u, bc);
  ComplexField b = op.step(u, bc);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    CHECK(a[v].real() == b[v].real());
    CHECK(a[v].imag() == b[v].imag());
  }
}

TEST_CASE("diffusion step agrees with a dense direct solve on a tiny mesh") {
  TriMesh mesh = tiny_square();  // 9 nodes
  REQUIRE(mesh.vertex_count() <= 12);
  P1System sys = assemble_p1(mesh);
  const double tau = 0.3;
  DiffusionOperator op(mesh, sys, tau);

  ComplexField u(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) u[v] = Complex(0.3 * v - 1.0, 0.1 * v * v);
  BoundaryCondition bc;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.vertex_on_boundary[v]) bc.values[v] = Complex(std::cos(0.5 * v), std::sin(0.5 * v));

  // dense oracle: unknowns at interior nodes of (M + tau K) v = M u - tau K_ib g
  Eigen::MatrixXd K = dense(sys.stiffness);
  std::vector<int> interior;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (!mesh.vertex_on_boundary[v]) interior.push_back(v);
  int ni = static_cast<int>(interior.size());
  Eigen::MatrixXd A(ni, ni);
  Eigen::VectorXcd rhs(ni);
  for (int i = 0; i < ni; ++i) {
    Complex acc = sys.mass_diag[interior[i]] * u[interior[i]];
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      if (mesh.vertex_on_boundary[v]) acc -= tau * K(interior[i], v) * bc.at(v);
    }
    rhs[i] = acc;
    for (int j = 0; j < ni; ++j)
      A(i, j) = tau * K(interior[i], interior[j]) +
                (i == j ? sys.mass_diag[interior[i]] : 0.0);
  }
  Eigen::VectorXcd sol = A.fullPivLu().solve(rhs);

  ComplexField out = op.step(u, bc);
  for (int i = 0; i < ni; ++i) CHECK(std::abs(out[interior[i]] - sol[i]) < 1e-10);
}

TEST_CASE("backward Euler does not increase Dirichlet energy of admissible fields") {
  TriMesh mesh = make_square(3);  // 16 nodes
  P1System sys = assemble_p1(mesh);
  DiffusionOperator op(mesh, sys, 0.2);
  ComplexField u(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v)
    u[v] = Complex(std::sin(1.7 * v), std::cos(0.9 * v));
  BoundaryCondition bc;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.vertex_on_boundary[v]) bc.values[v] = u[v];
  ComplexField out = op.step(u, bc);
  CHECK(dirichlet_energy(sys, out) <= dirichlet_energy(sys, u) + 1e-12);
}

TEST_CASE("dirichlet solve: constants and linear functions are exact") {
  TriMesh mesh = make_square(6);
  P1System sys = assemble_p1(mesh);
  DirichletSolver solver(mesh, sys);

  std::map<int, double> constant;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.vertex_on_boundary[v]) constant[v] = 3.25;
  Eigen::VectorXd c = solver.solve(constant);
  for (int v = 0; v < mesh.vertex_count(); ++v) CHECK(c[v] == doctest::Approx(3.25));

  std::map<int, double> linear;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.vertex_on_boundary[v]) linear[v] = mesh.vertices[v].x;
  Eigen::VectorXd x = solver.solve(linear);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    CHECK(std::abs(x[v] - mesh.vertices[v].x) < 1e-10);
}

TEST_CASE("dirichlet solve: harmonic extension of e^{i theta} on the disk is z") {
  // z is linear, hence P1-exact: the discrete harmonic extension reproduces
  // the identity map at every node, at any resolution
  for (int rings : {8, 16}) {
    TriMesh disk = make_disk(rings);
    P1System sys = assemble_p1(disk);
    DirichletSolver solver(disk, sys);
    BoundaryCondition bc;
    for (int v : disk.boundary_loops[0].vertex_ids)
      bc.values[v] = std::polar(1.0, angle_of(disk.vertices[v]));
    ComplexField u = solver.solve(bc);
    double err = 0.0;
    for (int v = 0; v < disk.vertex_count(); ++v)
      err = std::max(err, std::abs(u[v] - to_complex(disk.vertices[v])));
    CHECK(err < 1e-10);
  }
}

TEST_CASE("lambda1 estimates: disk and square") {
  TriMesh disk = make_disk(40);
  double l_disk = estimate_lambda1(disk, assemble_p1(disk));
  CHECK(l_disk == doctest::Approx(5.7832).epsilon(0.02));  // j01^2

  TriMesh square = make_square(40);
  double l_square = estimate_lambda1(square, assemble_p1(square));
  CHECK(l_square == doctest::Approx(2.0 * kPi * kPi).epsilon(0.02));
}

TEST_CASE("lambda1 decreases monotonically under refinement") {
  TriMesh mesh = make_square(6);
  double prev = std::numeric_limits<double>::max();
  for (int level = 0; level < 3; ++level) {
    double l = estimate_lambda1(mesh, assemble_p1(mesh));
    CHECK(l < prev);
    prev = l;
    if (level < 2) mesh = uniform_refine(mesh);
  }
  CHECK(prev > 2.0 * kPi * kPi);  // conforming upper bound
}

TEST_CASE("lambda1 requires interior nodes") {
  std::vector<Point2> verts = {{0, 0}, {1, 0}, {0, 1}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}};
  TriMesh mesh = TriMesh::build(verts, tris);
  CHECK_THROWS_AS(estimate_lambda1(mesh, assemble_p1(mesh)), Error);
}
