#include "xfield/gl.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace xf {

int normalize_field(ComplexField& u) {
  int perturbed = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double m = std::abs(u[i]);
    if (m < 1e-14) {
      u[i] += Complex(1e-12, 0.0);
      m = std::abs(u[i]);
      ++perturbed;
    }
    u[i] /= m;
  }
  return perturbed;
}

ComplexField harmonic_init(const TriMesh& mesh, const P1System& sys,
                           const BoundaryCondition& bc) {
  DirichletSolver solver(mesh, sys);
  return solver.solve(bc);
}

ComplexField random_unit_init(const TriMesh& mesh, const BoundaryCondition& bc, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  ComplexField u(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) u[v] = std::polar(1.0, ang(rng));
  for (const auto& [v, g] : bc.values) u[v] = g;
  return u;
}

MboResult mbo_minimize(const TriMesh& mesh, const P1System& sys, const BoundaryCondition& bc,
                       const MboParams& params, const ComplexField& init) {
  if (params.tau_scale <= 0.0 || params.delta <= 0.0)
    throw Error("mbo: tau_scale and delta must be positive");
  double lambda1 = estimate_lambda1(mesh, sys);
  DiffusionOperator op(mesh, sys, params.tau_scale / lambda1);

  MboResult res;
  res.u = init;
  res.u.conservativeResize(mesh.vertex_count());
  const double threshold = 2.0 * op.interior_count() * params.delta;

  for (int k = 0; k < params.max_iter; ++k) {
    ComplexField next = op.step(res.u, bc);
    res.perturbed_nodes += normalize_field(next);
    double diff = (next - res.u).norm();
    res.u = std::move(next);
    res.iterations = k + 1;
    res.step_norms.push_back(diff);
    res.dirichlet_trace.push_back(dirichlet_energy(sys, res.u));
    if (diff <= threshold) {
      res.converged = true;
      break;
    }
  }
  return res;
}

namespace {

double distance_to_boundary(const TriMesh& mesh, Point2 p) {
  double best = std::numeric_limits<double>::max();
  for (const auto& loop : mesh.boundary_loops) {
    const auto& ids = loop.vertex_ids;
    for (size_t i = 0; i < ids.size(); ++i) {
      Point2 a = mesh.vertices[ids[i]];
      Point2 b = mesh.vertices[ids[(i + 1) % ids.size()]];
      best = std::min(best, point_segment_distance(p, a, b));
    }
  }
  return best;
}

}  // namespace

ComplexField canonical_harmonic_map(const TriMesh& mesh, const P1System& sys,
                                    const BoundaryCondition& bc, const SingularityConfig& config,
                                    size_t unwrap_start) {
  if (mesh.boundary_loops.size() != 1)
    throw Error("canonical map: domain must be simply connected");
  const auto& loop = mesh.boundary_loops.front();

  int deg = brouwer_degree(bc, loop);
  int total = 0;
  for (const auto& s : config) total += s.degree;
  if (total != deg)
    throw Error("canonical map: degree mismatch (boundary " + std::to_string(deg) +
                ", configuration " + std::to_string(total) + ")");

  for (size_t i = 0; i < config.size(); ++i) {
    for (size_t j = i + 1; j < config.size(); ++j)
      if (dist(config[i].location, config[j].location) < 1e-9)
        throw Error("canonical map: coincident singularity locations");
    if (distance_to_boundary(mesh, config[i].location) < 1e-9)
      throw Error("canonical map: singularity too close to the boundary");
  }
  {
    PointLocator locator(mesh);
    for (const auto& s : config)
      if (locator.locate(s.location) < 0)
        throw Error("canonical map: singularity outside the mesh");
  }

  auto product_phase = [&](Point2 z) {
    double phase = 0.0;
    for (const auto& s : config) {
      Vec2 d = z - s.location;
      if (norm(d) < 1e-12) continue;  // at the singularity itself; term skipped
      phase += s.degree * angle_of(d);
    }
    return phase;
  };

  // Unwrap phi0 = arg(g) - sum d_j arg(z - a_j) continuously along the loop.
  const auto& ids = loop.vertex_ids;
  const size_t n = ids.size();
  std::map<int, double> phi0;
  double prev_raw = 0.0, prev_unwrapped = 0.0;
  for (size_t step = 0; step <= n; ++step) {
    size_t j = (unwrap_start + step) % n;
    int v = ids[j];
    double raw = std::arg(bc.at(v)) - product_phase(mesh.vertices[v]);
    if (step == 0) {
      prev_unwrapped = wrap_pi(raw);
    } else {
      prev_unwrapped += wrap_pi(raw - prev_raw);
    }
    prev_raw = raw;
    if (step == n) {
      double closure = prev_unwrapped - phi0.at(ids[unwrap_start % n]);
      if (std::abs(closure) > 1e-6)
        throw Error("canonical map: boundary phase fails to close (winding mismatch)");
      break;
    }
    phi0[v] = prev_unwrapped;
  }

  DirichletSolver solver(mesh, sys);
  Eigen::VectorXd phi = solver.solve(phi0);

  ComplexField u(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v)
    u[v] = std::polar(1.0, phi[v] + product_phase(mesh.vertices[v]));
  return u;
}

GlEnergy gl_energy(const P1System& sys, const ComplexField& u, double eps) {
  if (eps <= 0.0) throw Error("gl_energy: eps must be positive");
  GlEnergy e;
  e.dirichlet = dirichlet_energy(sys, u);
  double pen = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double r = std::norm(u[i]) - 1.0;
    pen += sys.mass_diag[i] * r * r;
  }
  e.penalty = pen / (4.0 * eps * eps);
  return e;
}

ComplexField gl_gradient(const TriMesh& mesh, const P1System& sys, const ComplexField& u,
                         double eps) {
  Eigen::VectorXd re = u.real(), im = u.imag();
  Eigen::VectorXd gre = sys.stiffness * re;
  Eigen::VectorXd gim = sys.stiffness * im;
  ComplexField g(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double w = sys.mass_diag[i] * (std::norm(u[i]) - 1.0) / (eps * eps);
    g[i] = Complex(gre[i], gim[i]) + w * u[i];
    if (mesh.vertex_on_boundary[static_cast<int>(i)]) g[i] = 0.0;
  }
  return g;
}

DescentResult direct_minimize_gl(const TriMesh& mesh, const P1System& sys,
                                 const BoundaryCondition& bc, double eps,
                                 const ComplexField& init, const DescentParams& params) {
  if (eps <= 0.0) throw Error("direct minimizer: eps must be positive");
  DescentResult res;
  res.u = init;
  for (const auto& [v, g] : bc.values) res.u[v] = g;  // enforce admissibility

  int n_interior = 0;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (!mesh.vertex_on_boundary[v]) ++n_interior;
  const double threshold = 2.0 * n_interior * params.delta;

  double energy = gl_energy(sys, res.u, eps).total();
  double step = params.initial_step;

  for (int k = 0; k < params.max_iter; ++k) {
    ComplexField grad = gl_gradient(mesh, sys, res.u, eps);
    double g2 = grad.squaredNorm();
    if (g2 == 0.0) {
      res.converged = true;
      res.iterations = k;
      break;
    }
    // backtracking line search (Armijo)
    double s = step;
    ComplexField cand;
    double cand_energy = 0.0;
    bool accepted = false;
    while (s >= params.min_step) {
      cand = res.u - s * grad;
      cand_energy = gl_energy(sys, cand, eps).total();
      if (cand_energy <= energy - params.armijo * s * g2) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      res.line_search_failed = true;
      res.iterations = k;
      break;
    }
    double diff = (cand - res.u).norm();
    res.u = std::move(cand);
    energy = cand_energy;
    res.iterations = k + 1;
    step = std::min(s * 2.0, 1e6);
    if (diff <= threshold) {
      res.converged = true;
      break;
    }
  }
  res.final_energy = energy;
  return res;
}

}  // namespace xf
