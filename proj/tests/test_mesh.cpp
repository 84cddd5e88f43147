#include <algorithm>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "xfield/mesh.hpp"

using namespace xf;

TEST_CASE("OFF loader: unit square of two triangles") {
  std::string path = test::write_text("square.off",
                                      "OFF\n4 2 0\n"
                                      "0 0 0\n1 0 0\n1 1 0\n0 1 0\n"
                                      "3 0 1 2\n3 0 2 3\n");
  TriMesh mesh = load_mesh(path, MeshFormat::OFF);
  CHECK(mesh.vertex_count() == 4);
  CHECK(mesh.face_count() == 2);
  REQUIRE(mesh.boundary_loops.size() == 1);
  CHECK(mesh.boundary_loops[0].vertex_ids.size() == 4);
  CHECK(mesh.boundary_loops[0].is_outer);
  CHECK(mesh.euler_characteristic() == 1);
}

TEST_CASE("OBJ loader rejects quad faces") {
  std::string path = test::write_text("quad.obj",
                                      "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
                                      "f 1 2 3 4\n");
  CHECK_THROWS_WITH_AS(load_mesh(path, MeshFormat::OBJ), doctest::Contains("non-triangle"),
                       Error);
}

TEST_CASE("OBJ loader accepts v/vt/vn face references") {
  std::string path = test::write_text("tri.obj",
                                      "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
                                      "vn 0 0 1\n"
                                      "f 1//1 2//1 3//1\n");
  TriMesh mesh = load_mesh(path, MeshFormat::OBJ);
  CHECK(mesh.face_count() == 1);
}

TEST_CASE("disk mesh save/load round trip keeps its size") {
  TriMesh disk = make_disk(11);  // 265 nodes, the paper-scale small disk
  CHECK(disk.vertex_count() == 265);
  std::string path = test::temp_path("disk.off");
  save_off(disk, path);
  TriMesh back = load_mesh(path);
  CHECK(back.vertex_count() == disk.vertex_count());
  CHECK(back.face_count() == disk.face_count());
  CHECK(back.boundary_loops.size() == 1);
}

TEST_CASE("non-manifold and disconnected meshes are rejected") {
  // two triangles sharing only an edge used three times
  std::vector<Point2> verts = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {-1, 1}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}};
  CHECK_THROWS_WITH_AS(TriMesh::build(verts, tris), doctest::Contains("non-manifold"), Error);

  std::vector<Point2> v2 = {{0, 0}, {1, 0}, {0, 1}, {5, 5}, {6, 5}, {5, 6}};
  std::vector<std::array<int, 3>> t2 = {{0, 1, 2}, {3, 4, 5}};
  CHECK_THROWS_WITH_AS(TriMesh::build(v2, t2), doctest::Contains("disconnected"), Error);
}

TEST_CASE("corner detection on the square") {
  TriMesh square = make_square(8);
  auto corners = detect_corners(square, 0.1);
  REQUIRE(corners.size() == 4);
  for (const auto& c : corners) {
    CHECK(c.interior_angle == doctest::Approx(kPi / 2.0));
    CHECK(c.index_quarters == 1);
  }
}

TEST_CASE("corner detection on a smooth disk finds nothing") {
  TriMesh disk = make_disk(12);
  CHECK(detect_corners(disk, 0.3).empty());
}

TEST_CASE("reentrant L-shape corner has index -1/4") {
  TriMesh l = make_l_shape(6);
  auto corners = detect_corners(l, 0.1);
  REQUIRE(corners.size() == 6);
  int reentrant = 0, convex = 0;
  for (const auto& c : corners) {
    if (c.index_quarters == -1) {
      reentrant++;
      CHECK(c.interior_angle == doctest::Approx(3.0 * kPi / 2.0));
    } else {
      CHECK(c.index_quarters == 1);
      convex++;
    }
  }
  CHECK(reentrant == 1);
  CHECK(convex == 5);
}

TEST_CASE("corner override file") {
  TriMesh square = make_square(4);
  auto corners = detect_corners(square, 0.1);
  int vid = corners[0].vertex_id;
  std::string path =
      test::write_text("overrides.txt", std::to_string(vid) + " -1\n# comment line\n");
  auto overrides = load_corner_overrides(path);
  apply_corner_overrides(square, corners, overrides);
  bool found = false;
  for (const auto& c : corners)
    if (c.vertex_id == vid) {
      found = true;
      CHECK(c.index_quarters == -1);
      CHECK(c.user_override.has_value());
    }
  CHECK(found);
}

TEST_CASE("boundary condition on the circle is the fourth power of the normal") {
  TriMesh disk = make_disk(16);
  auto corners = detect_corners(disk, 0.3);
  BoundaryCondition bc = assign_boundary_condition(disk, corners);
  for (int v : disk.boundary_loops[0].vertex_ids) {
    double theta = angle_of(disk.vertices[v]);
    Complex expected = std::polar(1.0, 4.0 * theta);
    CHECK(std::abs(bc.at(v) - expected) < 1e-12);
  }
}

TEST_CASE("boundary condition on the square: sides give 1, corners carry the index twist") {
  TriMesh square = make_square(8);
  auto corners = detect_corners(square, 0.1);
  BoundaryCondition bc = assign_boundary_condition(square, corners);
  std::set<int> corner_ids;
  for (const auto& c : corners) corner_ids.insert(c.vertex_id);
  for (int v : square.boundary_loops[0].vertex_ids) {
    // side midpoint normal (0,-1): ((0) + i(-1))^4 = 1; every side vertex
    // gives 1, and the quarter-index corner twist lands on 1 as well
    CHECK(std::abs(bc.at(v) - Complex(1.0, 0.0)) < 1e-12);
    if (corner_ids.count(v)) {
      // raw bisector value at a corner is -1 = e^{4 i (-pi/4)}; the (-1)^k
      // twist with k = 1 flips it so the loop winding matches the indices
      CHECK(std::abs(-bc.at(v) - Complex(-1.0, 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("half-disk corner: bisector of arc and flat-side normals") {
  TriMesh hd = make_half_disk(30);
  auto corners = detect_corners(hd, 0.3);
  REQUIRE(corners.size() == 2);
  for (const auto& c : corners) CHECK(c.index_quarters == 1);
  BoundaryCondition bc = assign_boundary_condition(hd, corners);
  // at (1,0): normals e^{i*0} (arc) and e^{-i pi/2} (flat side) bisect to
  // e^{-i pi/4}; raw g = e^{4 i (-pi/4)} = -1, and the k=1 twist gives +1
  for (const auto& c : corners) {
    if (std::abs(hd.vertices[c.vertex_id].x - 1.0) > 1e-9) continue;
    Complex g = bc.at(c.vertex_id);
    CHECK(std::abs(g - Complex(1.0, 0.0)) < 0.05);  // up to one arc step
    CHECK(std::abs(-g - Complex(-1.0, 0.0)) < 0.05);
  }
}

TEST_CASE("brouwer degree: circle 4, constant 0, square 0 after corner accounting") {
  TriMesh disk = make_disk(16);
  BoundaryCondition bc = assign_boundary_condition(disk, detect_corners(disk, 0.3));
  CHECK(brouwer_degree(bc, disk.boundary_loops[0]) == 4);

  BoundaryCondition constant;
  for (int v : disk.boundary_loops[0].vertex_ids) constant.values[v] = Complex(1.0, 0.0);
  CHECK(brouwer_degree(constant, disk.boundary_loops[0]) == 0);

  // square: raw turning winding is 4; four quarter-index corners absorb it
  TriMesh square = make_square(8);
  auto corners = detect_corners(square, 0.1);
  BoundaryCondition sq = assign_boundary_condition(square, corners);
  CHECK(square.turning_number(square.boundary_loops[0]) == 1);
  int k_total = 0;
  for (const auto& c : corners) k_total += c.index_quarters;
  int deg = brouwer_degree(sq, square.boundary_loops[0]);
  CHECK(deg == 4 * 1 - k_total);
  CHECK(deg == 0);
}

TEST_CASE("degree identity deg = 4 turning - sum k on several domains") {
  auto check_identity = [](const TriMesh& mesh, double tol) {
    auto corners = detect_corners(mesh, tol);
    BoundaryCondition bc = assign_boundary_condition(mesh, corners);
    for (size_t li = 0; li < mesh.boundary_loops.size(); ++li) {
      const auto& loop = mesh.boundary_loops[li];
      int k_loop = 0;
      for (const auto& c : corners)
        if (c.loop == static_cast<int>(li)) k_loop += c.index_quarters;
      CHECK(brouwer_degree(bc, loop) == 4 * mesh.turning_number(loop) - k_loop);
    }
  };
  check_identity(make_l_shape(6), 0.3);
  check_identity(make_hexagon(8), 0.3);
  check_identity(make_half_disk(10), 0.3);
  check_identity(make_two_hole(10), 0.3);
}

TEST_CASE("hexagon effective degree is -2") {
  TriMesh hex = make_hexagon(10);
  auto corners = detect_corners(hex, 0.3);
  CHECK(corners.size() == 6);
  BoundaryCondition bc = assign_boundary_condition(hex, corners);
  CHECK(brouwer_degree(bc, hex.boundary_loops[0]) == -2);
}

TEST_CASE("reversing a loop negates its brouwer degree") {
  TriMesh disk = make_disk(12);
  BoundaryCondition bc = assign_boundary_condition(disk, {});
  BoundaryLoop reversed = disk.boundary_loops[0];
  std::reverse(reversed.vertex_ids.begin(), reversed.vertex_ids.end());
  CHECK(brouwer_degree(bc, reversed) == -brouwer_degree(bc, disk.boundary_loops[0]));
}

TEST_CASE("antipodal neighbors are rejected") {
  TriMesh square = make_square(4);
  BoundaryCondition bc;
  const auto& ids = square.boundary_loops[0].vertex_ids;
  for (size_t i = 0; i < ids.size(); ++i)
    bc.values[ids[i]] = (i == 0) ? Complex(-1.0, 0.0) : Complex(1.0, 0.0);
  CHECK_THROWS_WITH_AS(brouwer_degree(bc, square.boundary_loops[0]),
                       doctest::Contains("antipodal"), Error);
}

TEST_CASE("uniform refinement preserves the boundary and Euler characteristic") {
  TriMesh hex = make_hexagon(4);
  TriMesh fine = uniform_refine(hex);
  CHECK(fine.face_count() == 4 * hex.face_count());
  CHECK(fine.vertex_count() == hex.vertex_count() + hex.edge_count);
  CHECK(fine.euler_characteristic() == hex.euler_characteristic());

  TriMesh holes = make_two_hole(6);
  CHECK(holes.euler_characteristic() == -1);
  CHECK(uniform_refine(holes).euler_characteristic() == -1);
}

TEST_CASE("point locator finds faces and rejects outside points") {
  TriMesh l = make_l_shape(6);
  PointLocator locator(l);
  int f = locator.locate({0.5, 0.5});
  REQUIRE(f >= 0);
  auto b = l.barycentric(f, {0.5, 0.5});
  CHECK(b[0] >= -1e-12);
  CHECK(locator.locate({1.5, 1.5}) < 0);  // inside the cut corner
  CHECK(locator.locate({3.0, 0.5}) < 0);
}
