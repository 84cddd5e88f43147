#include "xfield/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace xf {

namespace {

inline std::int64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::int64_t>(b);
}

double polygon_signed_area(const std::vector<Point2>& pts) {
  double s = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const Point2& a = pts[i];
    const Point2& b = pts[(i + 1) % pts.size()];
    s += cross(a, b);
  }
  return 0.5 * s;
}

}  // namespace

double TriMesh::triangle_area(int f) const {
  const auto& t = triangles[f];
  return 0.5 * cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
}

Point2 TriMesh::triangle_barycenter(int f) const {
  const auto& t = triangles[f];
  return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

double TriMesh::local_edge_length(int f) const {
  const auto& t = triangles[f];
  return (dist(vertices[t[0]], vertices[t[1]]) + dist(vertices[t[1]], vertices[t[2]]) +
          dist(vertices[t[2]], vertices[t[0]])) /
         3.0;
}

std::array<double, 3> TriMesh::barycentric(int f, Point2 p) const {
  const auto& t = triangles[f];
  Point2 a = vertices[t[0]], b = vertices[t[1]], c = vertices[t[2]];
  double den = cross(b - a, c - a);
  double l1 = cross(p - a, c - a) / den;
  double l2 = cross(b - a, p - a) / den;
  return {1.0 - l1 - l2, l1, l2};
}

int TriMesh::turning_number(const BoundaryLoop& loop) const {
  const auto& ids = loop.vertex_ids;
  int n = static_cast<int>(ids.size());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    Point2 p = vertices[ids[(i + n - 1) % n]];
    Point2 v = vertices[ids[i]];
    Point2 q = vertices[ids[(i + 1) % n]];
    total += wrap_pi(angle_of(q - v) - angle_of(v - p));
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

TriMesh TriMesh::build(std::vector<Point2> vertices,
                       std::vector<std::array<int, 3>> triangles) {
  TriMesh m;
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);
  const int nv = m.vertex_count();
  const int nf = m.face_count();
  if (nv < 3 || nf < 1) throw Error("mesh: needs at least one triangle");

  for (auto& t : m.triangles) {
    for (int v : t)
      if (v < 0 || v >= nv) throw Error("mesh: vertex index out of range");
    double a =
        0.5 * cross(m.vertices[t[1]] - m.vertices[t[0]], m.vertices[t[2]] - m.vertices[t[0]]);
    if (a < 0.0) {
      std::swap(t[1], t[2]);  // normalize orientation
      a = -a;
    }
    if (a == 0.0) throw Error("mesh: zero-area triangle");
  }

  // Edge incidence.
  struct EdgeInfo {
    int count = 0;
    int tri[2] = {-1, -1};
    int opp[2] = {-1, -1};  // local index of opposite vertex
  };
  std::unordered_map<std::int64_t, EdgeInfo> edges;
  edges.reserve(3 * nf);
  for (int f = 0; f < nf; ++f) {
    const auto& t = m.triangles[f];
    for (int e = 0; e < 3; ++e) {
      int a = t[(e + 1) % 3], b = t[(e + 2) % 3];
      auto& info = edges[edge_key(a, b)];
      if (info.count >= 2) throw Error("mesh: non-manifold edge");
      info.tri[info.count] = f;
      info.opp[info.count] = e;
      info.count++;
    }
  }
  m.edge_count = static_cast<int>(edges.size());

  m.tri_neighbors.assign(nf, {-1, -1, -1});
  for (const auto& [key, info] : edges) {
    (void)key;
    if (info.count == 2) {
      m.tri_neighbors[info.tri[0]][info.opp[0]] = info.tri[1];
      m.tri_neighbors[info.tri[1]][info.opp[1]] = info.tri[0];
    }
  }

  // Connectivity over faces.
  {
    std::vector<char> seen(nf, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      int f = q.front();
      q.pop();
      for (int nb : m.tri_neighbors[f])
        if (nb >= 0 && !seen[nb]) {
          seen[nb] = 1;
          reached++;
          q.push(nb);
        }
    }
    if (reached != nf) throw Error("mesh: disconnected mesh");
  }

  // Directed boundary edges (interior on the left).
  m.next_boundary_vertex.assign(nv, -1);
  m.prev_boundary_vertex.assign(nv, -1);
  m.vertex_on_boundary.assign(nv, false);
  for (const auto& [key, info] : edges) {
    (void)key;
    if (info.count != 1) continue;
    const auto& t = m.triangles[info.tri[0]];
    int a = t[(info.opp[0] + 1) % 3];
    int b = t[(info.opp[0] + 2) % 3];
    if (m.next_boundary_vertex[a] != -1 || m.prev_boundary_vertex[b] != -1)
      throw Error("mesh: non-manifold boundary vertex");
    m.next_boundary_vertex[a] = b;
    m.prev_boundary_vertex[b] = a;
    m.vertex_on_boundary[a] = m.vertex_on_boundary[b] = true;
  }

  // Chain loops.
  {
    std::vector<char> visited(nv, 0);
    for (int v = 0; v < nv; ++v) {
      if (!m.vertex_on_boundary[v] || visited[v]) continue;
      BoundaryLoop loop;
      int cur = v;
      do {
        loop.vertex_ids.push_back(cur);
        visited[cur] = 1;
        cur = m.next_boundary_vertex[cur];
        if (cur < 0) throw Error("mesh: open boundary chain");
      } while (cur != v);
      if (loop.vertex_ids.size() < 3) throw Error("mesh: boundary loop shorter than 3");
      std::vector<Point2> pts;
      pts.reserve(loop.vertex_ids.size());
      for (int id : loop.vertex_ids) pts.push_back(m.vertices[id]);
      loop.signed_area = polygon_signed_area(pts);
      m.boundary_loops.push_back(std::move(loop));
    }
  }
  if (m.boundary_loops.empty()) throw Error("mesh: no boundary found");

  int outer = -1;
  double best = -1.0;
  for (size_t i = 0; i < m.boundary_loops.size(); ++i) {
    if (std::abs(m.boundary_loops[i].signed_area) > best) {
      best = std::abs(m.boundary_loops[i].signed_area);
      outer = static_cast<int>(i);
    }
  }
  for (size_t i = 0; i < m.boundary_loops.size(); ++i) {
    auto& loop = m.boundary_loops[i];
    loop.is_outer = (static_cast<int>(i) == outer);
    if (loop.is_outer && loop.signed_area <= 0.0)
      throw Error("mesh: outer boundary loop is not counterclockwise");
    if (!loop.is_outer && loop.signed_area >= 0.0)
      throw Error("mesh: hole loop is not clockwise");
  }
  std::stable_sort(m.boundary_loops.begin(), m.boundary_loops.end(),
                   [](const BoundaryLoop& a, const BoundaryLoop& b) {
                     return a.is_outer > b.is_outer;
                   });

  m.vertex_triangles.assign(nv, {});
  for (int f = 0; f < nf; ++f)
    for (int v : m.triangles[f]) m.vertex_triangles[v].push_back(f);

  double edge_sum = 0.0;
  for (const auto& [key, info] : edges) {
    int a = static_cast<int>(key >> 32);
    int b = static_cast<int>(key & 0xffffffff);
    edge_sum += dist(m.vertices[a], m.vertices[b]);
  }
  m.mean_edge_length = edge_sum / static_cast<double>(m.edge_count);

  m.total_area = 0.0;
  for (int f = 0; f < nf; ++f) m.total_area += m.triangle_area(f);

  m.bbox_min = m.bbox_max = m.vertices[0];
  for (const auto& p : m.vertices) {
    m.bbox_min.x = std::min(m.bbox_min.x, p.x);
    m.bbox_min.y = std::min(m.bbox_min.y, p.y);
    m.bbox_max.x = std::max(m.bbox_max.x, p.x);
    m.bbox_max.y = std::max(m.bbox_max.y, p.y);
  }
  return m;
}

// ---------------------------------------------------------------------------
// File I/O

namespace {

std::vector<std::string> tokenize_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  return tokens;
}

TriMesh load_off(const std::string& path) {
  auto toks = tokenize_file(path);
  size_t i = 0;
  if (i < toks.size() && (toks[i] == "OFF" || toks[i] == "off")) ++i;
  if (i + 3 > toks.size()) throw Error("OFF parse failure: missing counts");
  int nv = std::stoi(toks[i++]);
  int nf = std::stoi(toks[i++]);
  ++i;  // edge count, ignored
  std::vector<Point2> verts(nv);
  for (int v = 0; v < nv; ++v) {
    if (i + 3 > toks.size()) throw Error("OFF parse failure: truncated vertex list");
    verts[v].x = std::stod(toks[i++]);
    verts[v].y = std::stod(toks[i++]);
    ++i;  // z ignored
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(nf);
  for (int f = 0; f < nf; ++f) {
    if (i >= toks.size()) throw Error("OFF parse failure: truncated face list");
    int k = std::stoi(toks[i++]);
    if (k != 3) throw Error("non-triangle face in OFF file");
    if (i + 3 > toks.size()) throw Error("OFF parse failure: truncated face");
    std::array<int, 3> t;
    for (int j = 0; j < 3; ++j) t[j] = std::stoi(toks[i++]);
    tris.push_back(t);
  }
  return TriMesh::build(std::move(verts), std::move(tris));
}

TriMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file: " + path);
  std::vector<Point2> verts;
  std::vector<std::array<int, 3>> tris;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Point2 p;
      if (!(ls >> p.x >> p.y)) throw Error("OBJ parse failure: bad vertex");
      verts.push_back(p);
    } else if (tag == "f") {
      std::vector<int> ids;
      std::string ref;
      while (ls >> ref) {
        // "i", "i/j", "i/j/k", "i//k"
        int v = std::stoi(ref.substr(0, ref.find('/')));
        if (v < 0) v = static_cast<int>(verts.size()) + v + 1;
        ids.push_back(v - 1);
      }
      if (ids.size() != 3) throw Error("non-triangle face in OBJ file");
      tris.push_back({ids[0], ids[1], ids[2]});
    }
    // vn/vt/usemtl/... ignored
  }
  return TriMesh::build(std::move(verts), std::move(tris));
}

}  // namespace

TriMesh load_mesh(const std::string& path, MeshFormat format) {
  return format == MeshFormat::OFF ? load_off(path) : load_obj(path);
}

TriMesh load_mesh(const std::string& path) {
  auto dotpos = path.rfind('.');
  std::string ext = dotpos == std::string::npos ? "" : path.substr(dotpos + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == "obj") return load_mesh(path, MeshFormat::OBJ);
  return load_mesh(path, MeshFormat::OFF);
}

void save_off(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file: " + path);
  out.precision(17);
  out << "OFF\n" << mesh.vertex_count() << " " << mesh.face_count() << " 0\n";
  for (const auto& p : mesh.vertices) out << p.x << " " << p.y << " 0\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

// ---------------------------------------------------------------------------
// Corners and boundary condition

namespace {

double interior_angle_at(const TriMesh& mesh, int v) {
  int p = mesh.prev_boundary_vertex[v];
  int n = mesh.next_boundary_vertex[v];
  Vec2 e_in = mesh.vertices[v] - mesh.vertices[p];
  Vec2 e_out = mesh.vertices[n] - mesh.vertices[v];
  if (norm(e_in) < 1e-300 || norm(e_out) < 1e-300)
    throw Error("degenerate zero-length boundary edge");
  double turn = wrap_pi(angle_of(e_out) - angle_of(e_in));
  return kPi - turn;  // in (0, 2pi)
}

int loop_of_vertex(const TriMesh& mesh, int v) {
  for (size_t i = 0; i < mesh.boundary_loops.size(); ++i) {
    const auto& ids = mesh.boundary_loops[i].vertex_ids;
    if (std::find(ids.begin(), ids.end(), v) != ids.end()) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

std::vector<Corner> detect_corners(const TriMesh& mesh, double angle_tol) {
  std::vector<Corner> corners;
  for (size_t li = 0; li < mesh.boundary_loops.size(); ++li) {
    for (int v : mesh.boundary_loops[li].vertex_ids) {
      double ang = interior_angle_at(mesh, v);
      if (std::abs(kPi - ang) <= angle_tol) continue;
      Corner c;
      c.vertex_id = v;
      c.loop = static_cast<int>(li);
      c.interior_angle = ang;
      int k = static_cast<int>(std::lround(2.0 * (kPi - ang) / kPi));
      if (k > 1) {
        k = 1;
        c.clamped = true;
      }
      c.index_quarters = k;
      corners.push_back(c);
    }
  }
  return corners;
}

std::map<int, int> load_corner_overrides(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corner override file: " + path);
  std::map<int, int> overrides;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    int v, k;
    if (ls >> v >> k) overrides[v] = k;
  }
  return overrides;
}

void apply_corner_overrides(const TriMesh& mesh, std::vector<Corner>& corners,
                            const std::map<int, int>& overrides) {
  for (const auto& [v, k] : overrides) {
    if (v < 0 || v >= mesh.vertex_count() || !mesh.vertex_on_boundary[v])
      throw Error("corner override on non-boundary vertex " + std::to_string(v));
    bool found = false;
    for (auto& c : corners) {
      if (c.vertex_id == v) {
        c.index_quarters = k;
        c.user_override = k;
        found = true;
        break;
      }
    }
    if (!found) {
      Corner c;
      c.vertex_id = v;
      c.loop = loop_of_vertex(mesh, v);
      c.interior_angle = interior_angle_at(mesh, v);
      c.index_quarters = k;
      c.user_override = k;
      corners.push_back(c);
    }
  }
}

Complex BoundaryCondition::at(int vertex) const {
  auto it = values.find(vertex);
  if (it == values.end()) throw Error("no boundary value at vertex " + std::to_string(vertex));
  return it->second;
}

BoundaryCondition assign_boundary_condition(const TriMesh& mesh,
                                            const std::vector<Corner>& corners) {
  std::map<int, int> corner_k;
  for (const auto& c : corners) corner_k[c.vertex_id] = c.index_quarters;

  BoundaryCondition bc;
  for (const auto& loop : mesh.boundary_loops) {
    for (int v : loop.vertex_ids) {
      int p = mesh.prev_boundary_vertex[v];
      int n = mesh.next_boundary_vertex[v];
      Vec2 e_in = mesh.vertices[v] - mesh.vertices[p];
      Vec2 e_out = mesh.vertices[n] - mesh.vertices[v];
      if (norm(e_in) < 1e-300 || norm(e_out) < 1e-300)
        throw Error("degenerate zero-length boundary edge");
      // outward normal is to the right of the directed edge
      Vec2 n_in = normalized(Vec2{e_in.y, -e_in.x});
      Vec2 n_out = normalized(Vec2{e_out.y, -e_out.x});
      Vec2 bis = n_in + n_out;
      if (norm(bis) < 1e-12) throw Error("degenerate boundary cusp at vertex " + std::to_string(v));
      Complex nu = to_complex(normalized(bis));
      Complex g = nu * nu;
      g = g * g;  // nu^4
      auto it = corner_k.find(v);
      if (it != corner_k.end() && (it->second % 2 != 0)) g = -g;
      bc.values[v] = g / std::abs(g);
    }
  }
  return bc;
}

int brouwer_degree(const BoundaryCondition& bc, const BoundaryLoop& loop) {
  const auto& ids = loop.vertex_ids;
  double total = 0.0;
  for (size_t i = 0; i < ids.size(); ++i) {
    Complex a = bc.at(ids[i]);
    Complex b = bc.at(ids[(i + 1) % ids.size()]);
    double inc = std::arg(b / a);
    if (std::abs(inc) > kPi - 1e-6)
      throw Error("antipodal consecutive boundary values; refine boundary sampling");
    total += inc;
  }
  double w = total / (2.0 * kPi);
  double r = std::round(w);
  if (std::abs(w - r) > 1e-9) throw Error("boundary winding is not an integer");
  return static_cast<int>(r);
}

TriMesh uniform_refine(const TriMesh& mesh) {
  std::unordered_map<std::int64_t, int> midpoint;
  std::vector<Point2> verts = mesh.vertices;
  auto mid = [&](int a, int b) {
    auto key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int id = static_cast<int>(verts.size());
    verts.push_back((mesh.vertices[a] + mesh.vertices[b]) * 0.5);
    midpoint.emplace(key, id);
    return id;
  };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
    tris.push_back({t[0], m01, m20});
    tris.push_back({t[1], m12, m01});
    tris.push_back({t[2], m20, m12});
    tris.push_back({m01, m12, m20});
  }
  return TriMesh::build(std::move(verts), std::move(tris));
}

// ---------------------------------------------------------------------------
// Point location

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(&mesh) {
  cell_size_ = std::max(2.0 * mesh.mean_edge_length, 1e-12);
  Vec2 span = mesh.bbox_max - mesh.bbox_min;
  nx_ = std::max(1, static_cast<int>(span.x / cell_size_) + 1);
  ny_ = std::max(1, static_cast<int>(span.y / cell_size_) + 1);
  cells_.assign(static_cast<size_t>(nx_) * ny_, {});
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& t = mesh.triangles[f];
    Point2 lo = mesh.vertices[t[0]], hi = lo;
    for (int j = 1; j < 3; ++j) {
      lo.x = std::min(lo.x, mesh.vertices[t[j]].x);
      lo.y = std::min(lo.y, mesh.vertices[t[j]].y);
      hi.x = std::max(hi.x, mesh.vertices[t[j]].x);
      hi.y = std::max(hi.y, mesh.vertices[t[j]].y);
    }
    int ix0 = std::clamp(static_cast<int>((lo.x - mesh.bbox_min.x) / cell_size_), 0, nx_ - 1);
    int ix1 = std::clamp(static_cast<int>((hi.x - mesh.bbox_min.x) / cell_size_), 0, nx_ - 1);
    int iy0 = std::clamp(static_cast<int>((lo.y - mesh.bbox_min.y) / cell_size_), 0, ny_ - 1);
    int iy1 = std::clamp(static_cast<int>((hi.y - mesh.bbox_min.y) / cell_size_), 0, ny_ - 1);
    for (int iy = iy0; iy <= iy1; ++iy)
      for (int ix = ix0; ix <= ix1; ++ix)
        cells_[static_cast<size_t>(iy) * nx_ + ix].push_back(f);
  }
}

int PointLocator::grid_cell(Point2 p) const {
  if (p.x < mesh_->bbox_min.x - cell_size_ || p.x > mesh_->bbox_max.x + cell_size_ ||
      p.y < mesh_->bbox_min.y - cell_size_ || p.y > mesh_->bbox_max.y + cell_size_)
    return -1;
  int ix = std::clamp(static_cast<int>((p.x - mesh_->bbox_min.x) / cell_size_), 0, nx_ - 1);
  int iy = std::clamp(static_cast<int>((p.y - mesh_->bbox_min.y) / cell_size_), 0, ny_ - 1);
  return iy * nx_ + ix;
}

int PointLocator::locate(Point2 p, int hint) const {
  const double tol = -1e-12;
  auto inside = [&](int f) {
    auto b = mesh_->barycentric(f, p);
    return b[0] >= tol && b[1] >= tol && b[2] >= tol;
  };
  // neighbor walk from hint
  if (hint >= 0 && hint < mesh_->face_count()) {
    int f = hint;
    for (int steps = 0; steps < 256 && f >= 0; ++steps) {
      auto b = mesh_->barycentric(f, p);
      int worst = 0;
      for (int j = 1; j < 3; ++j)
        if (b[j] < b[worst]) worst = j;
      if (b[worst] >= tol) return f;
      f = mesh_->tri_neighbors[f][worst];
    }
  }
  int cell = grid_cell(p);
  if (cell < 0) return -1;
  for (int f : cells_[cell])
    if (inside(f)) return f;
  return -1;
}

}  // namespace xf
