#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>

#include "xfield/mesh.hpp"

namespace xf {

using ComplexField = Eigen::VectorXcd;

struct P1System {
  Eigen::SparseMatrix<double> stiffness;  // K, symmetric positive semi-definite
  Eigen::VectorXd mass_diag;              // lumped mass M
};

/// Assembles the P1 stiffness matrix (gradient form) and lumped mass.
/// Errors on triangles with area below 1e-14 of the mean.
P1System assemble_p1(const TriMesh& mesh);

/// Backward Euler diffusion operator (M + tau K) with Dirichlet boundary,
/// factored once on the interior block and reused across solves. A built
/// operator is immutable; solves own their workspace.
class DiffusionOperator {
 public:
  DiffusionOperator(const TriMesh& mesh, const P1System& sys, double tau);

  /// One implicit diffusion step: boundary nodes carry g exactly, interior
  /// nodes solve (M + tau K) v_int = M u_int - (tau K)_int,bnd g.
  ComplexField step(const ComplexField& u, const BoundaryCondition& bc) const;

  double tau() const { return tau_; }
  int interior_count() const { return static_cast<int>(interior_.size()); }

 private:
  friend class DirichletSolver;
  const TriMesh* mesh_;
  double tau_;
  std::vector<int> interior_;      // interior vertex ids
  std::vector<int> index_of_;      // vertex -> interior index, -1 on boundary
  Eigen::SparseMatrix<double> coupling_;  // (tau K)_int,bnd columns over boundary ids
  std::vector<int> boundary_;      // boundary vertex ids (column order of coupling_)
  Eigen::VectorXd mass_int_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

/// Harmonic (K-harmonic) extension of Dirichlet boundary data.
class DirichletSolver {
 public:
  DirichletSolver(const TriMesh& mesh, const P1System& sys);

  Eigen::VectorXd solve(const std::map<int, double>& boundary_values) const;
  ComplexField solve(const BoundaryCondition& bc) const;

 private:
  const TriMesh* mesh_;
  std::vector<int> interior_;
  std::vector<int> index_of_;
  std::vector<int> boundary_;
  Eigen::SparseMatrix<double> coupling_;  // K_int,bnd
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

/// Smallest generalized eigenvalue of K v = lambda M v on interior nodes,
/// by inverse power iteration (the interior factorization is reused across
/// iterations). Relative residual below 1e-6.
double estimate_lambda1(const TriMesh& mesh, const P1System& sys);

/// Dirichlet energy 1/2 u* K u (real + imaginary parts).
double dirichlet_energy(const P1System& sys, const ComplexField& u);

}  // namespace xf
