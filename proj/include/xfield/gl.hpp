#pragma once

#include "xfield/fem.hpp"

namespace xf {

struct MboParams {
  double tau_scale = 1.0;  // tau = tau_scale / lambda1
  double delta = 1e-4;     // stop when ||u_k - u_{k-1}|| <= 2 n delta, n interior nodes
  int max_iter = 2000;
};

struct MboResult {
  ComplexField u;
  int iterations = 0;
  bool converged = false;
  int perturbed_nodes = 0;               // zero-modulus normalizations
  std::vector<double> step_norms;        // ||u_k - u_{k-1}|| per iteration
  std::vector<double> dirichlet_trace;   // Dirichlet energy per iteration
};

/// Pointwise renormalization u -> u/|u|. Moduli below 1e-14 are perturbed
/// by 1e-12 in the +1 direction first; the count of such nodes is returned.
int normalize_field(ComplexField& u);

/// Harmonic extension of g (the default MBO initialization).
ComplexField harmonic_init(const TriMesh& mesh, const P1System& sys,
                           const BoundaryCondition& bc);

/// Uniformly random unit field in the interior, g on the boundary.
ComplexField random_unit_init(const TriMesh& mesh, const BoundaryCondition& bc,
                              unsigned seed);

/// Diffusion generated (MBO) minimization of the Ginzburg-Landau energy:
/// alternate one backward Euler diffusion step of size tau with pointwise
/// renormalization until the iterate stops moving.
MboResult mbo_minimize(const TriMesh& mesh, const P1System& sys, const BoundaryCondition& bc,
                       const MboParams& params, const ComplexField& init);

struct SingularitySpec {
  Point2 location;
  int degree = 0;  // representation-field degree d_j
};
using SingularityConfig = std::vector<SingularitySpec>;

/// Canonical harmonic map for boundary data g and a prescribed singularity
/// configuration: u0 = e^{i phi} prod_j ((z-a_j)/|z-a_j|)^{d_j} with phi the
/// harmonic extension of the unwrapped boundary phase. Requires a simply
/// connected mesh and sum(d_j) equal to the Brouwer degree of g.
ComplexField canonical_harmonic_map(const TriMesh& mesh, const P1System& sys,
                                    const BoundaryCondition& bc, const SingularityConfig& config,
                                    size_t unwrap_start = 0);

struct GlEnergy {
  double dirichlet = 0.0;
  double penalty = 0.0;
  double total() const { return dirichlet + penalty; }
};

/// E_eps(u) = 1/2 u*Ku + 1/(4 eps^2) sum_i m_i (|u_i|^2 - 1)^2.
GlEnergy gl_energy(const P1System& sys, const ComplexField& u, double eps);

/// Gradient of E_eps with respect to (Re u, Im u), packed as a complex
/// vector; rows of Dirichlet-fixed boundary nodes are zeroed.
ComplexField gl_gradient(const TriMesh& mesh, const P1System& sys, const ComplexField& u,
                         double eps);

struct DescentParams {
  double delta = 1e-4;
  int max_iter = 50000;
  double initial_step = 1.0;
  double armijo = 1e-4;
  double min_step = 1e-16;
};

struct DescentResult {
  ComplexField u;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  double final_energy = 0.0;
};

/// Gradient descent with backtracking on E_eps (cross-validation oracle for
/// the MBO method). Energy is non-increasing across accepted steps.
DescentResult direct_minimize_gl(const TriMesh& mesh, const P1System& sys,
                                 const BoundaryCondition& bc, double eps,
                                 const ComplexField& init, const DescentParams& params);

}  // namespace xf
