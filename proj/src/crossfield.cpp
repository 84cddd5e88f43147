#include "xfield/crossfield.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace xf {

CrossSample sample_cross(const PointLocator& locator, const ComplexField& u, Point2 p,
                         int face_hint) {
  int f = locator.locate(p, face_hint);
  if (f < 0) throw Error("sample_cross: point outside mesh");
  const TriMesh& mesh = locator.mesh();
  auto b = mesh.barycentric(f, p);
  const auto& t = mesh.triangles[f];
  Complex val = b[0] * u[t[0]] + b[1] * u[t[1]] + b[2] * u[t[2]];
  if (std::abs(val) < 1e-12) throw Error("sample_cross: near singularity");
  CrossSample s;
  s.location = p;
  double base = std::arg(val) / 4.0;
  for (int k = 0; k < 4; ++k) s.directions[k] = base + k * kPi / 2.0;
  return s;
}

int face_winding(const TriMesh& mesh, const ComplexField& u, int f) {
  const auto& t = mesh.triangles[f];
  double w = std::arg(u[t[1]] / u[t[0]]) + std::arg(u[t[2]] / u[t[1]]) +
             std::arg(u[t[0]] / u[t[2]]);
  return static_cast<int>(std::lround(w / (2.0 * kPi)));
}

Point2 locate_zero_in_face(const TriMesh& mesh, const ComplexField& u, int f, bool* degenerate) {
  if (face_winding(mesh, u, f) == 0)
    throw Error("locate_zero_in_face: face has zero winding");
  const auto& t = mesh.triangles[f];
  if (degenerate) *degenerate = false;

  // Solve sum lambda_m u_m = 0, sum lambda_m = 1.
  Eigen::Matrix3d A;
  for (int m = 0; m < 3; ++m) {
    A(0, m) = u[t[m]].real();
    A(1, m) = u[t[m]].imag();
    A(2, m) = 1.0;
  }
  Eigen::Vector3d rhs(0.0, 0.0, 1.0);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
  Point2 bary = mesh.triangle_barycenter(f);
  if (!lu.isInvertible()) {
    if (degenerate) *degenerate = true;
    return bary;
  }
  Eigen::Vector3d lam = lu.solve(rhs);
  const double tol = 1e-9;
  for (int m = 0; m < 3; ++m) {
    if (lam[m] < -tol) {
      // a winding face carries its interpolant zero inside; anything beyond
      // roundoff means degenerate data
      if (degenerate) *degenerate = true;
      return bary;
    }
    lam[m] = std::max(lam[m], 0.0);
  }
  double s = lam.sum();
  lam /= s;
  return lam[0] * mesh.vertices[t[0]] + lam[1] * mesh.vertices[t[1]] +
         lam[2] * mesh.vertices[t[2]];
}

namespace {

// Transitive clustering of singular faces that share a vertex.
std::vector<std::vector<int>> cluster_faces(const TriMesh& mesh, const std::vector<int>& faces) {
  std::vector<std::vector<int>> clusters;
  std::vector<char> used(faces.size(), 0);
  for (size_t i = 0; i < faces.size(); ++i) {
    if (used[i]) continue;
    std::vector<int> cluster{faces[i]};
    used[i] = 1;
    std::set<int> verts(mesh.triangles[faces[i]].begin(), mesh.triangles[faces[i]].end());
    bool grew = true;
    while (grew) {
      grew = false;
      for (size_t j = 0; j < faces.size(); ++j) {
        if (used[j]) continue;
        const auto& t = mesh.triangles[faces[j]];
        if (verts.count(t[0]) || verts.count(t[1]) || verts.count(t[2])) {
          cluster.push_back(faces[j]);
          verts.insert(t.begin(), t.end());
          used[j] = 1;
          grew = true;
        }
      }
    }
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

}  // namespace

std::vector<Singularity> detect_singularities(const TriMesh& mesh, const ComplexField& u,
                                              const DetectOptions& opts) {
  std::vector<int> singular;
  std::vector<int> winding(mesh.face_count(), 0);
  for (int f = 0; f < mesh.face_count(); ++f) {
    winding[f] = face_winding(mesh, u, f);
    if (winding[f] != 0) singular.push_back(f);
  }

  std::vector<std::vector<int>> clusters;
  if (opts.cluster)
    clusters = cluster_faces(mesh, singular);
  else
    for (int f : singular) clusters.push_back({f});

  std::vector<Singularity> sings;
  for (auto& cluster : clusters) {
    int total = 0;
    for (int f : cluster) total += winding[f];
    if (total == 0) continue;  // cancelling dipole below mesh resolution

    Singularity s;
    s.rep_degree = total;
    s.cluster_faces = cluster;
    s.higher_degree_warning = std::abs(total) >= 2;

    Point2 loc{0.0, 0.0};
    double wsum = 0.0;
    for (int f : cluster) {
      double w = std::abs(winding[f]);
      if (w == 0.0) continue;
      loc += w * locate_zero_in_face(mesh, u, f);
      wsum += w;
    }
    s.location = loc / wsum;

    // representative face: the cluster face nearest the merged location
    double best = std::numeric_limits<double>::max();
    for (int f : cluster) {
      auto b = mesh.barycentric(f, s.location);
      if (b[0] >= -1e-12 && b[1] >= -1e-12 && b[2] >= -1e-12) {
        s.face_id = f;
        best = -1.0;
        break;
      }
      double d = dist(mesh.triangle_barycenter(f), s.location);
      if (d < best) {
        best = d;
        s.face_id = f;
      }
    }

    if (opts.fit_directions && s.rep_degree < 4) separatrix_directions(mesh, u, s);
    sings.push_back(std::move(s));
  }

  std::sort(sings.begin(), sings.end(),
            [](const Singularity& a, const Singularity& b) { return a.face_id < b.face_id; });
  return sings;
}

void separatrix_directions(const TriMesh& mesh, const ComplexField& u, Singularity& sing) {
  const int d = sing.rep_degree;
  if (d >= 4) throw Error("separatrix_directions: degenerate radial singularity (degree >= 4)");

  // Ring of fit nodes: vertices of the cluster and their 1-ring.
  std::set<int> ring;
  for (int f : sing.cluster_faces)
    for (int v : mesh.triangles[f])
      for (int g : mesh.vertex_triangles[v])
        for (int w : mesh.triangles[g]) ring.insert(w);

  double h = mesh.local_edge_length(sing.face_id);
  Complex acc(0.0, 0.0);
  for (int v : ring) {
    Vec2 r = mesh.vertices[v] - sing.location;
    if (norm(r) < 0.25 * h) continue;  // too close to the zero
    acc += (u[v] / std::abs(u[v])) * std::polar(1.0, -d * angle_of(r));
  }
  if (std::abs(acc) < 1e-12)
    throw Error("separatrix_directions: phase fit failed (degenerate ring data)");
  sing.theta0 = std::arg(acc);

  sing.exit_directions.clear();
  const int count = 4 - d;
  for (int k = 0; k < count; ++k)
    sing.exit_directions.push_back(wrap_pi((2.0 * kPi * k + sing.theta0) / count));
  std::sort(sing.exit_directions.begin(), sing.exit_directions.end());
}

BoundarySingularityInfo boundary_separatrix_directions(const TriMesh& mesh,
                                                       const Corner& corner) {
  const int d = corner.index_quarters;
  if (d >= 2)
    throw Error("boundary_separatrix_directions: index 1/2 corner has infinitely many "
                "separatrices");
  BoundarySingularityInfo info;
  info.vertex_id = corner.vertex_id;
  info.index_quarters = d;
  info.sectors = 2 - d;

  int next = mesh.next_boundary_vertex[corner.vertex_id];
  double tangent = angle_of(mesh.vertices[next] - mesh.vertices[corner.vertex_id]);
  double phi_c = corner.interior_angle;
  for (int k = 0; k <= 2 - d; ++k)
    info.exit_directions.push_back(wrap_pi(tangent + phi_c * k / (2 - d)));
  return info;
}

PoincareHopf poincare_hopf_check(const TriMesh& mesh, const std::vector<Singularity>& sings,
                                 const std::vector<Corner>& corners) {
  PoincareHopf ph;
  for (const auto& s : sings) ph.lhs_quarters += s.rep_degree;
  for (const auto& c : corners) ph.lhs_quarters += c.index_quarters;
  ph.rhs_quarters = 4 * mesh.euler_characteristic();
  ph.ok = (ph.lhs_quarters == ph.rhs_quarters);
  return ph;
}

std::vector<double> measure_exit_directions(const PointLocator& locator, const ComplexField& u,
                                            Point2 center, double radius, int samples) {
  // f(theta) = (arg u)/4 - theta, wrapped to (-pi/4, pi/4]; separatrix
  // directions are its zero crossings.
  auto mismatch = [&](double theta) {
    Point2 p = center + radius * dir_of(theta);
    CrossSample s = sample_cross(locator, u, p);
    double raw = s.directions[0] - theta;
    double w = std::remainder(raw, kPi / 2.0);
    return w;
  };

  std::vector<double> exits;
  double prev = mismatch(0.0);
  for (int i = 1; i <= samples; ++i) {
    double theta = 2.0 * kPi * i / samples;
    double cur = mismatch(theta);
    // zero crossing without wrap jump
    if (std::abs(cur - prev) < kPi / 4.0 && ((prev <= 0.0 && cur > 0.0) || (prev >= 0.0 && cur < 0.0))) {
      double t0 = 2.0 * kPi * (i - 1) / samples;
      // secant refinement
      double a = t0, fa = prev, b = theta, fb = cur;
      for (int it = 0; it < 40; ++it) {
        double m = 0.5 * (a + b);
        double fm = mismatch(m);
        if ((fa <= 0.0 && fm > 0.0) || (fa >= 0.0 && fm < 0.0)) {
          b = m;
          fb = fm;
        } else {
          a = m;
          fa = fm;
        }
      }
      (void)fb;
      exits.push_back(wrap_pi(0.5 * (a + b)));
    }
    prev = cur;
  }
  std::sort(exits.begin(), exits.end());
  return exits;
}

}  // namespace xf
