#include "heatda/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <utility>

#include <fmt/format.h>

#include "heatda/error.hpp"

namespace heatda {

namespace {

double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

bool on_grid(double c, int n) {
  const double scaled = c * n;
  return std::abs(scaled - std::round(scaled)) <= 1e-9;
}

// Strictly inside segment [a, b], up to a relative tolerance.
bool inside_segment(Point p, Point a, Point b) {
  const double len = distance(a, b);
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  if (std::abs(cross) > 1e-12 * len * len) return false;
  const double dot = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y);
  const double tol = 1e-12 * len * len;
  return dot > tol && dot < len * len - tol;
}

}  // namespace

bool Region::aligned_with(int n) const {
  return on_grid(x0, n) && on_grid(x1, n) && on_grid(y0, n) && on_grid(y1, n);
}

std::vector<InternalFace> internal_faces(const std::vector<Point>& vertices,
                                         const std::vector<std::array<int, 3>>& triangles) {
  struct EdgeUse {
    int triangle;
    int from;
    int to;
  };
  std::map<std::pair<int, int>, std::vector<EdgeUse>> edges;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    const auto& tri = triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      edges[{std::min(a, b), std::max(a, b)}].push_back({t, a, b});
    }
  }

  std::vector<InternalFace> faces;
  std::vector<std::pair<int, int>> boundary_edges;
  for (const auto& [key, uses] : edges) {
    if (uses.size() > 2) {
      fail(ErrorKind::Structure,
           fmt::format("edge ({}, {}) is shared by {} triangles", key.first, key.second, uses.size()));
    }
    if (uses.size() == 1) {
      boundary_edges.push_back(key);
      continue;
    }
    const EdgeUse& left = uses[0];
    const EdgeUse& right = uses[1];
    if (left.from != right.to || left.to != right.from) {
      fail(ErrorKind::Structure, fmt::format("triangles {} and {} traverse edge ({}, {}) in the same direction",
                                             left.triangle, right.triangle, key.first, key.second));
    }
    const Point a = vertices[left.from];
    const Point b = vertices[left.to];
    const double len = distance(a, b);
    InternalFace face;
    face.vertices = {left.from, left.to};
    face.left = left.triangle;
    face.right = right.triangle;
    // Outward normal of the counterclockwise left triangle along a -> b.
    face.normal = {(b.y - a.y) / len, -(b.x - a.x) / len};
    face.length = len;
    faces.push_back(face);
  }

  // A vertex inside an unmatched edge is a hanging node.
  for (const auto& [a, b] : boundary_edges) {
    for (int v = 0; v < static_cast<int>(vertices.size()); ++v) {
      if (v == a || v == b) continue;
      if (inside_segment(vertices[v], vertices[a], vertices[b])) {
        fail(ErrorKind::Structure, fmt::format("hanging vertex {} on edge ({}, {})", v, a, b));
      }
    }
  }
  return faces;
}

TriMesh::TriMesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  require(!triangles_.empty(), ErrorKind::Structure, "mesh has no triangles");
  const int nv = num_vertices();
  areas_.reserve(triangles_.size());
  grads_.reserve(triangles_.size());
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri) {
      require(v >= 0 && v < nv, ErrorKind::Structure, fmt::format("triangle {} references vertex {}", t, v));
    }
    const Point p0 = vertices_[tri[0]], p1 = vertices_[tri[1]], p2 = vertices_[tri[2]];
    const double area2 = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    require(area2 > 0.0, ErrorKind::Structure,
            fmt::format("triangle {} is degenerate or clockwise", t));
    areas_.push_back(0.5 * area2);
    grads_.push_back({Point{(p1.y - p2.y) / area2, (p2.x - p1.x) / area2},
                      Point{(p2.y - p0.y) / area2, (p0.x - p2.x) / area2},
                      Point{(p0.y - p1.y) / area2, (p1.x - p0.x) / area2}});
    h_ = std::max(h_, diameter(t));
  }

  faces_ = heatda::internal_faces(vertices_, triangles_);

  // Boundary vertices are the endpoints of edges used by one triangle only.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : triangles_) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  }
  boundary_.assign(nv, false);
  for (const auto& [edge, count] : edge_count) {
    if (count == 1) {
      boundary_[edge.first] = true;
      boundary_[edge.second] = true;
    }
  }
}

TriMesh TriMesh::structured(int n) {
  require(n >= 2, ErrorKind::InvalidArgument, fmt::format("structured mesh needs n >= 2, got {}", n));
  const int row = n + 1;
  std::vector<Point> vertices;
  vertices.reserve(static_cast<size_t>(row) * row);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(2 * static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int bl = j * row + i;
      const int br = bl + 1;
      const int tl = bl + row;
      const int tr = tl + 1;
      triangles.push_back({bl, br, tr});
      triangles.push_back({bl, tr, tl});
    }
  }
  TriMesh mesh(std::move(vertices), std::move(triangles));
  mesh.subdivisions_ = n;
  return mesh;
}

Point TriMesh::barycenter(int t) const {
  return map(t, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
}

Point TriMesh::map(int t, const std::array<double, 3>& bary) const {
  const auto& tri = triangles_[t];
  Point p;
  for (int k = 0; k < 3; ++k) {
    p.x += bary[k] * vertices_[tri[k]].x;
    p.y += bary[k] * vertices_[tri[k]].y;
  }
  return p;
}

double TriMesh::diameter(int t) const {
  const auto& tri = triangles_[t];
  return std::max({distance(vertices_[tri[0]], vertices_[tri[1]]),
                   distance(vertices_[tri[1]], vertices_[tri[2]]),
                   distance(vertices_[tri[2]], vertices_[tri[0]])});
}

double TriMesh::inscribed_diameter(int t) const {
  const auto& tri = triangles_[t];
  const double perimeter = distance(vertices_[tri[0]], vertices_[tri[1]]) +
                           distance(vertices_[tri[1]], vertices_[tri[2]]) +
                           distance(vertices_[tri[2]], vertices_[tri[0]]);
  return 4.0 * areas_[t] / perimeter;
}

double TriMesh::quasi_uniformity() const {
  double min_inscribed = inscribed_diameter(0);
  for (int t = 1; t < num_triangles(); ++t) min_inscribed = std::min(min_inscribed, inscribed_diameter(t));
  return h_ / min_inscribed;
}

std::vector<int> triangles_in_region(const TriMesh& mesh, const Region& region) {
  std::vector<int> result;
  if (region.empty()) return result;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (region.contains(mesh.barycenter(t))) result.push_back(t);
  }
  return result;
}

void write_mesh_dump(const TriMesh& mesh, std::ostream& out) {
  out << fmt::format("{} {} {}\n", mesh.num_vertices(), mesh.num_triangles(), mesh.internal_faces().size());
  for (const Point& p : mesh.vertices()) out << fmt::format("{:.17g} {:.17g}\n", p.x, p.y);
  for (const auto& tri : mesh.triangles()) out << fmt::format("{} {} {}\n", tri[0], tri[1], tri[2]);
  for (const InternalFace& f : mesh.internal_faces()) {
    out << fmt::format("{} {} {} {} {:.17g} {:.17g} {:.17g}\n", f.vertices[0], f.vertices[1], f.left, f.right,
                       f.normal.x, f.normal.y, f.length);
  }
}

}  // namespace heatda
