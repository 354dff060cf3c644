#pragma once

#include <array>
#include <iosfwd>
#include <vector>

namespace heatda {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Edge shared by exactly two triangles. The normal points out of `left`
/// and into `right`.
struct InternalFace {
  std::array<int, 2> vertices;
  int left = -1;
  int right = -1;
  Point normal;
  double length = 0.0;
};

/// Axis-aligned box. A triangle belongs to the region iff its barycenter lies
/// in the closed box; a box with zero width or height is empty.
struct Region {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  static Region unit_square() { return {}; }

  bool empty() const { return !(x1 > x0) || !(y1 > y0); }
  bool contains(Point p) const {
    return !empty() && p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  bool is_unit_square() const {
    return x0 == 0.0 && x1 == 1.0 && y0 == 0.0 && y1 == 1.0;
  }
  /// True when all four box coordinates are multiples of 1/n.
  bool aligned_with(int n) const;
  double area() const { return empty() ? 0.0 : (x1 - x0) * (y1 - y0); }
};

/// Conforming triangulation of a polygon. Immutable after construction.
class TriMesh {
 public:
  /// Vertices and counterclockwise triangles; faces and boundary flags are
  /// derived. Throws Structure if the connectivity is not conforming.
  TriMesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles);

  /// n x n grid of the unit square, each cell cut along its (0,0)-(1,1)
  /// diagonal.
  static TriMesh structured(int n);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<InternalFace>& internal_faces() const { return faces_; }
  const std::vector<bool>& boundary_vertex_flags() const { return boundary_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  bool is_boundary(int v) const { return boundary_[v]; }

  /// Maximum element diameter.
  double h() const { return h_; }
  /// Grid subdivisions for structured meshes, 0 otherwise.
  int subdivisions() const { return subdivisions_; }

  double area(int t) const { return areas_[t]; }
  Point barycenter(int t) const;
  Point map(int t, const std::array<double, 3>& bary) const;
  /// Gradients of the three P1 basis functions of triangle t (constant).
  const std::array<Point, 3>& basis_gradients(int t) const { return grads_[t]; }
  double diameter(int t) const;
  double inscribed_diameter(int t) const;
  /// max diameter / min inscribed diameter over the mesh.
  double quasi_uniformity() const;

 private:
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<InternalFace> faces_;
  std::vector<bool> boundary_;
  std::vector<double> areas_;
  std::vector<std::array<Point, 3>> grads_;
  double h_ = 0.0;
  int subdivisions_ = 0;
};

/// Derive the internal faces of a triangle soup. Throws Structure when an
/// edge is shared by more than two triangles or two neighbours disagree on
/// orientation.
std::vector<InternalFace> internal_faces(const std::vector<Point>& vertices,
                                         const std::vector<std::array<int, 3>>& triangles);
inline const std::vector<InternalFace>& internal_faces(const TriMesh& mesh) {
  return mesh.internal_faces();
}

/// Indices (ascending) of triangles whose barycenter lies in `region`.
std::vector<int> triangles_in_region(const TriMesh& mesh, const Region& region);

/// Plain-text dump: header "nv nt nf", then one line per vertex, triangle and
/// internal face ("a b left right nx ny length").
void write_mesh_dump(const TriMesh& mesh, std::ostream& out);

}  // namespace heatda
