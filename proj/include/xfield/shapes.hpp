#pragma once

#include "xfield/mesh.hpp"

namespace xf {

/// Unit square [0,1]^2, n x n cells.
TriMesh make_square(int n);

/// Axis-aligned grid over [0,w] x [0,h].
TriMesh make_rect_grid(double w, double h, int nx, int ny);

/// Unit disk from concentric rings (4k vertices on ring k), 90-degree
/// symmetric, center vertex.
TriMesh make_disk(int rings);

/// Upper half of the unit disk; flat side on the x axis.
TriMesh make_half_disk(int rings);

/// Regular hexagon with circumradius 1; no vertex at the center (the
/// innermost ring is triangulated so the origin lies strictly inside a face).
TriMesh make_hexagon(int rings);

/// Annulus r_inner <= r <= 1 with uniform rings.
TriMesh make_annulus(double r_inner, int rings, int around);

/// L-shape [0,2]^2 minus [1,2]^2, n cells per unit length.
TriMesh make_l_shape(int n);

/// Block U: [0,3]x[0,2] minus the notch [1,2]x[1,2], n cells per unit.
TriMesh make_u_block(int n);

/// [0,4]x[0,2] with two square holes, n cells per unit length.
TriMesh make_two_hole(int n);

/// Mushroom: half-disk cap (radius 1) over a stem, smooth fillets at the
/// cap/stem junctions; four convex right-angle corners in total.
TriMesh make_mushroom(double target_h);

/// Square [-2,2]^2 with a round hole of the given radius at the origin.
TriMesh make_square_with_hole(double hole_radius, double target_h);

/// Delaunay triangulation (Bowyer-Watson).
std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& points);

/// Unstructured mesh of a polygonal domain: loops[0] is the outer boundary
/// (counterclockwise), the rest are holes. Boundary points are used exactly
/// as given; the interior is filled with a hexagonal lattice of pitch
/// target_h.
TriMesh mesh_from_polygon(const std::vector<std::vector<Point2>>& loops, double target_h);

/// Named test domains for the command line tool.
TriMesh make_named_domain(const std::string& name, int resolution);

}  // namespace xf
