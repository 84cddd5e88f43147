#include "xfield/fem.hpp"

#include <vector>

namespace xf {

P1System assemble_p1(const TriMesh& mesh) {
  const int nv = mesh.vertex_count();
  const int nf = mesh.face_count();
  double mean_area = mesh.total_area / nf;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * nf);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(nv);

  for (int f = 0; f < nf; ++f) {
    const auto& t = mesh.triangles[f];
    double area = mesh.triangle_area(f);
    if (area < 1e-14 * mean_area) throw Error("degenerate triangle in P1 assembly");
    // gradient of basis i is rot90(edge opposite i) / (2 area)
    Vec2 grad[3];
    for (int i = 0; i < 3; ++i) {
      Vec2 e = mesh.vertices[t[(i + 2) % 3]] - mesh.vertices[t[(i + 1) % 3]];
      grad[i] = rot90(e) / (2.0 * area);
    }
    for (int i = 0; i < 3; ++i) {
      mass[t[i]] += area / 3.0;
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(t[i], t[j], dot(grad[i], grad[j]) * area);
    }
  }

  P1System sys;
  sys.stiffness.resize(nv, nv);
  sys.stiffness.setFromTriplets(trips.begin(), trips.end());
  sys.stiffness.makeCompressed();
  sys.mass_diag = std::move(mass);
  return sys;
}

namespace {

void split_nodes(const TriMesh& mesh, std::vector<int>& interior, std::vector<int>& boundary,
                 std::vector<int>& index_of) {
  index_of.assign(mesh.vertex_count(), -1);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.vertex_on_boundary[v])
      boundary.push_back(v);
    else {
      index_of[v] = static_cast<int>(interior.size());
      interior.push_back(v);
    }
  }
}

// Restriction of A to interior rows/cols, and interior-rows x boundary-cols block.
void split_matrix(const Eigen::SparseMatrix<double>& A, const std::vector<int>& interior,
                  const std::vector<int>& boundary, const std::vector<int>& index_of,
                  Eigen::SparseMatrix<double>& A_ii, Eigen::SparseMatrix<double>& A_ib) {
  std::vector<int> bindex(A.rows(), -1);
  for (size_t j = 0; j < boundary.size(); ++j) bindex[boundary[j]] = static_cast<int>(j);

  std::vector<Eigen::Triplet<double>> ii, ib;
  for (int col = 0; col < A.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
      int r = static_cast<int>(it.row());
      int c = static_cast<int>(it.col());
      if (index_of[r] < 0) continue;
      if (index_of[c] >= 0)
        ii.emplace_back(index_of[r], index_of[c], it.value());
      else
        ib.emplace_back(index_of[r], bindex[c], it.value());
    }
  }
  A_ii.resize(static_cast<int>(interior.size()), static_cast<int>(interior.size()));
  A_ii.setFromTriplets(ii.begin(), ii.end());
  A_ib.resize(static_cast<int>(interior.size()), static_cast<int>(boundary.size()));
  A_ib.setFromTriplets(ib.begin(), ib.end());
}

}  // namespace

DiffusionOperator::DiffusionOperator(const TriMesh& mesh, const P1System& sys, double tau)
    : mesh_(&mesh), tau_(tau) {
  if (tau <= 0.0) throw Error("diffusion operator: tau must be positive");
  split_nodes(mesh, interior_, boundary_, index_of_);
  if (interior_.empty()) throw Error("diffusion operator: mesh has no interior nodes");

  Eigen::SparseMatrix<double> A = tau_ * sys.stiffness;
  Eigen::SparseMatrix<double> A_ii;
  split_matrix(A, interior_, boundary_, index_of_, A_ii, coupling_);

  mass_int_.resize(interior_.size());
  for (size_t i = 0; i < interior_.size(); ++i) mass_int_[i] = sys.mass_diag[interior_[i]];
  Eigen::SparseMatrix<double> M_ii(A_ii.rows(), A_ii.cols());
  std::vector<Eigen::Triplet<double>> mt;
  for (int i = 0; i < A_ii.rows(); ++i) mt.emplace_back(i, i, mass_int_[i]);
  M_ii.setFromTriplets(mt.begin(), mt.end());

  Eigen::SparseMatrix<double> sysmat = M_ii + A_ii;
  factor_.compute(sysmat);
  if (factor_.info() != Eigen::Success)
    throw Error("diffusion operator: factorization failed (matrix not positive definite)");
}

ComplexField DiffusionOperator::step(const ComplexField& u, const BoundaryCondition& bc) const {
  if (u.size() != mesh_->vertex_count())
    throw Error("diffusion step: field size does not match mesh");
  const int ni = static_cast<int>(interior_.size());
  const int nb = static_cast<int>(boundary_.size());

  Eigen::VectorXd g_re(nb), g_im(nb);
  for (int j = 0; j < nb; ++j) {
    Complex g = bc.at(boundary_[j]);
    g_re[j] = g.real();
    g_im[j] = g.imag();
  }
  Eigen::VectorXd u_re(ni), u_im(ni);
  for (int i = 0; i < ni; ++i) {
    u_re[i] = u[interior_[i]].real();
    u_im[i] = u[interior_[i]].imag();
  }

  Eigen::VectorXd rhs_re = mass_int_.cwiseProduct(u_re) - coupling_ * g_re;
  Eigen::VectorXd rhs_im = mass_int_.cwiseProduct(u_im) - coupling_ * g_im;
  Eigen::VectorXd v_re = factor_.solve(rhs_re);
  Eigen::VectorXd v_im = factor_.solve(rhs_im);

  ComplexField out(mesh_->vertex_count());
  for (int i = 0; i < ni; ++i) out[interior_[i]] = Complex(v_re[i], v_im[i]);
  for (int j = 0; j < nb; ++j) out[boundary_[j]] = Complex(g_re[j], g_im[j]);
  return out;
}

DirichletSolver::DirichletSolver(const TriMesh& mesh, const P1System& sys) : mesh_(&mesh) {
  split_nodes(mesh, interior_, boundary_, index_of_);
  if (interior_.empty()) throw Error("dirichlet solver: mesh has no interior nodes");
  Eigen::SparseMatrix<double> K_ii;
  split_matrix(sys.stiffness, interior_, boundary_, index_of_, K_ii, coupling_);
  factor_.compute(K_ii);
  if (factor_.info() != Eigen::Success)
    throw Error("dirichlet solver: factorization failed");
}

Eigen::VectorXd DirichletSolver::solve(const std::map<int, double>& boundary_values) const {
  const int nb = static_cast<int>(boundary_.size());
  Eigen::VectorXd g(nb);
  for (int j = 0; j < nb; ++j) {
    auto it = boundary_values.find(boundary_[j]);
    if (it == boundary_values.end())
      throw Error("dirichlet solver: missing boundary value at vertex " +
                  std::to_string(boundary_[j]));
    g[j] = it->second;
  }
  Eigen::VectorXd v = factor_.solve(-(coupling_ * g));
  Eigen::VectorXd out(mesh_->vertex_count());
  for (size_t i = 0; i < interior_.size(); ++i) out[interior_[i]] = v[i];
  for (int j = 0; j < nb; ++j) out[boundary_[j]] = g[j];
  return out;
}

ComplexField DirichletSolver::solve(const BoundaryCondition& bc) const {
  std::map<int, double> re, im;
  for (const auto& [v, g] : bc.values) {
    re[v] = g.real();
    im[v] = g.imag();
  }
  Eigen::VectorXd ure = solve(re);
  Eigen::VectorXd uim = solve(im);
  ComplexField out(mesh_->vertex_count());
  for (int v = 0; v < mesh_->vertex_count(); ++v) out[v] = Complex(ure[v], uim[v]);
  return out;
}

double estimate_lambda1(const TriMesh& mesh, const P1System& sys) {
  std::vector<int> interior, boundary, index_of;
  split_nodes(mesh, interior, boundary, index_of);
  if (interior.empty()) throw Error("lambda1: mesh has no interior nodes");
  const int ni = static_cast<int>(interior.size());

  Eigen::SparseMatrix<double> K_ii, K_ib;
  split_matrix(sys.stiffness, interior, boundary, index_of, K_ii, K_ib);

  // consistent P1 mass (the Rayleigh quotient then bounds the continuum
  // eigenvalue from above and decreases under refinement)
  Eigen::SparseMatrix<double> M(mesh.vertex_count(), mesh.vertex_count());
  {
    std::vector<Eigen::Triplet<double>> trips;
    for (int f = 0; f < mesh.face_count(); ++f) {
      const auto& t = mesh.triangles[f];
      double a = mesh.triangle_area(f);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          trips.emplace_back(t[i], t[j], a * (i == j ? 1.0 / 6.0 : 1.0 / 12.0));
    }
    M.setFromTriplets(trips.begin(), trips.end());
  }
  Eigen::SparseMatrix<double> M_ii, M_ib;
  split_matrix(M, interior, boundary, index_of, M_ii, M_ib);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(K_ii);
  if (factor.info() != Eigen::Success) throw Error("lambda1: factorization failed");

  Eigen::VectorXd v = Eigen::VectorXd::Ones(ni);
  v /= std::sqrt(v.dot(M_ii * v));
  double lambda = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd y = factor.solve(M_ii * v);
    y /= std::sqrt(y.dot(M_ii * y));
    Eigen::VectorXd Ky = K_ii * y;
    Eigen::VectorXd My = M_ii * y;
    lambda = y.dot(Ky) / y.dot(My);
    double res = (Ky - lambda * My).norm() / (lambda * My.norm());
    v = y;
    if (res < 1e-6) return lambda;
  }
  return lambda;
}

double dirichlet_energy(const P1System& sys, const ComplexField& u) {
  Eigen::VectorXd re = u.real();
  Eigen::VectorXd im = u.imag();
  return 0.5 * (re.dot(sys.stiffness * re) + im.dot(sys.stiffness * im));
}

}  // namespace xf
