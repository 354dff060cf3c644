#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "heatda/error.hpp"
#include "heatda/mesh.hpp"

using namespace heatda;

TEST_CASE("structured mesh counts for n = 2") {
  const TriMesh mesh = TriMesh::structured(2);
  CHECK(mesh.num_triangles() == 8);
  CHECK(mesh.num_vertices() == 9);
  CHECK(mesh.internal_faces().size() == 8);
  CHECK(mesh.h() == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("boundary flags on n = 4") {
  const TriMesh mesh = TriMesh::structured(4);
  const auto& flags = mesh.boundary_vertex_flags();
  CHECK(std::count(flags.begin(), flags.end(), true) == 16);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Point p = mesh.vertices()[v];
    const bool on_edge = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
    CHECK(flags[v] == on_edge);
  }
}

TEST_CASE("structured meshes reject n < 2") {
  CHECK_THROWS_AS(TriMesh::structured(1), Error);
  try {
    TriMesh::structured(0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("mesh invariants across the refinement family") {
  double previous_h = 0.0;
  double first_quality = 0.0;
  for (int n : {2, 4, 8, 16, 32}) {
    const TriMesh mesh = TriMesh::structured(n);
    CAPTURE(n);
    CHECK(mesh.num_triangles() == 2 * n * n);
    double area = 0.0, max_diam = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const auto& tri = mesh.triangles()[t];
      const Point a = mesh.vertices()[tri[0]], b = mesh.vertices()[tri[1]], c = mesh.vertices()[tri[2]];
      const double signed_area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
      CHECK(signed_area > 0.0);
      area += signed_area;
      max_diam = std::max({max_diam, std::hypot(b.x - a.x, b.y - a.y), std::hypot(c.x - b.x, c.y - b.y),
                           std::hypot(a.x - c.x, a.y - c.y)});
    }
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mesh.h() == doctest::Approx(max_diam).epsilon(1e-15));
    CHECK(mesh.h() == doctest::Approx(std::sqrt(2.0) / n).epsilon(1e-15));
    if (previous_h > 0.0) CHECK(mesh.h() == doctest::Approx(previous_h / 2.0).epsilon(1e-15));
    previous_h = mesh.h();
    if (first_quality == 0.0) first_quality = mesh.quasi_uniformity();
    CHECK(mesh.quasi_uniformity() == doctest::Approx(first_quality).epsilon(1e-12));
  }
}

TEST_CASE("internal faces are consistent") {
  const int n = 4;
  const TriMesh mesh = TriMesh::structured(n);
  // Edge multiplicities from the triangle list: 3n^2 - 2n internal, 4n boundary.
  std::multiset<std::pair<int, int>> edges;
  for (const auto& tri : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  int shared = 0, single = 0;
  for (auto it = edges.begin(); it != edges.end(); it = edges.upper_bound(*it)) {
    const auto count = edges.count(*it);
    CHECK((count == 1 || count == 2));
    (count == 2 ? shared : single) += 1;
  }
  CHECK(shared == 3 * n * n - 2 * n);
  CHECK(single == 4 * n);
  CHECK(static_cast<int>(mesh.internal_faces().size()) == shared);

  for (const InternalFace& f : mesh.internal_faces()) {
    for (int side : {f.left, f.right}) {
      const auto& tri = mesh.triangles()[side];
      CHECK(std::count(tri.begin(), tri.end(), f.vertices[0]) == 1);
      CHECK(std::count(tri.begin(), tri.end(), f.vertices[1]) == 1);
    }
    const Point a = mesh.vertices()[f.vertices[0]], b = mesh.vertices()[f.vertices[1]];
    CHECK(f.length == doctest::Approx(std::hypot(b.x - a.x, b.y - a.y)).epsilon(1e-15));
    const bool axis = std::abs(f.length - 1.0 / n) < 1e-14;
    const bool diagonal = std::abs(f.length - std::sqrt(2.0) / n) < 1e-14;
    CHECK((axis || diagonal));
    CHECK(std::hypot(f.normal.x, f.normal.y) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(f.normal.x * (b.x - a.x) + f.normal.y * (b.y - a.y)) < 1e-15);
    // Points from the left barycenter towards the right one.
    const Point l = mesh.barycenter(f.left), r = mesh.barycenter(f.right);
    CHECK(f.normal.x * (r.x - l.x) + f.normal.y * (r.y - l.y) > 0.0);
  }
}

TEST_CASE("face derivation on triangle soups") {
  const std::vector<Point> pts{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, -1}};
  CHECK(internal_faces(pts, {{0, 1, 2}}).empty());

  // Swapping the triangle order flips left/right and the normal.
  const auto ab = internal_faces(pts, {{0, 1, 2}, {1, 3, 2}});
  const auto ba = internal_faces(pts, {{1, 3, 2}, {0, 1, 2}});
  REQUIRE(ab.size() == 1);
  REQUIRE(ba.size() == 1);
  // Triangle {0,1,2} is index 0 in ab and index 1 in ba.
  CHECK(ab[0].left == 0);
  CHECK(ba[0].right == 1);
  CHECK(ab[0].normal.x == doctest::Approx(-ba[0].normal.x));
  CHECK(ab[0].normal.y == doctest::Approx(-ba[0].normal.y));

  // Edge 0-1 shared by three triangles.
  try {
    internal_faces(pts, {{0, 1, 2}, {1, 0, 4}, {0, 1, 3}});
    FAIL("expected a structure error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Structure);
  }
  // Neighbours with inconsistent orientation.
  CHECK_THROWS_AS(internal_faces(pts, {{0, 1, 2}, {1, 2, 3}}), Error);
}

TEST_CASE("regions select triangles by barycenter") {
  const TriMesh mesh = TriMesh::structured(8);
  CHECK(triangles_in_region(mesh, Region::unit_square()).size() == 128);
  CHECK(triangles_in_region(mesh, Region{0.5, 0.5, 0.0, 1.0}).empty());
  const Region box{0.25, 0.75, 0.25, 0.75};
  const auto inside = triangles_in_region(mesh, box);
  CHECK(inside.size() == 32);
  double area = 0.0;
  for (int t : inside) area += mesh.area(t);
  CHECK(area == doctest::Approx(box.area()).epsilon(1e-14));
  CHECK(box.aligned_with(8));
  CHECK(box.aligned_with(4));
  CHECK_FALSE(Region{0.375, 0.625, 0.375, 0.625}.aligned_with(4));
}

TEST_CASE("mesh dump format") {
  const TriMesh mesh = TriMesh::structured(2);
  std::ostringstream out;
  write_mesh_dump(mesh, out);
  std::istringstream in(out.str());
  int nv = 0, nt = 0, nf = 0;
  in >> nv >> nt >> nf;
  CHECK(nv == 9);
  CHECK(nt == 8);
  CHECK(nf == 8);
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) lines += line.empty() ? 0 : 1;
  CHECK(lines == nv + nt + nf);
}
