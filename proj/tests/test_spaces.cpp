#include <doctest.h>

#include <cmath>

#include "heatda/error.hpp"
#include "heatda/forms.hpp"
#include "heatda/random.hpp"
#include "heatda/spaces.hpp"

using namespace heatda;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("dof maps") {
  const TriMesh mesh = TriMesh::structured(4);
  const DofMap full(mesh, SpaceKind::Full);
  const DofMap dirichlet(mesh, SpaceKind::Dirichlet);
  CHECK(full.size() == 25);
  CHECK(dirichlet.size() == 9);
  std::vector<int> seen(dirichlet.size(), 0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const int d = dirichlet.dof(v);
    if (mesh.is_boundary(v)) {
      CHECK(d == -1);
    } else {
      REQUIRE(d >= 0);
      ++seen[d];
      CHECK(dirichlet.vertex(d) == v);
    }
    CHECK(full.vertex(full.dof(v)) == v);
  }
  for (int s : seen) CHECK(s == 1);
}

TEST_CASE("time grid") {
  const TimeGrid grid(0.5, 6);
  CHECK(grid.tau() == doctest::Approx(0.5 / 6));
  for (int k = 0; k < 6; ++k) CHECK(grid.node(k + 1) - grid.node(k) == doctest::Approx(grid.tau()).epsilon(1e-14));
  CHECK(grid.node(6) == 0.5);
  CHECK(grid.node_index(0.25) == 3);
  CHECK(grid.node_index(0.2) == -1);
}

TEST_CASE("space-time field shapes") {
  const TriMesh mesh = TriMesh::structured(3);
  const TimeGrid grid(1.0, 5);
  const SpaceTimeField u(TimeBasis::P1Continuous, DofMap(mesh, SpaceKind::Full), grid);
  const SpaceTimeField z(TimeBasis::P0Slabwise, DofMap(mesh, SpaceKind::Dirichlet), grid);
  CHECK(u.coefficients().rows() == 6);
  CHECK(u.coefficients().cols() == 16);
  CHECK(z.coefficients().rows() == 5);
  CHECK(z.coefficients().cols() == 4);
}

TEST_CASE("nodal interpolation") {
  const TriMesh mesh = TriMesh::structured(2);
  const TimeGrid grid(1.0, 2);
  SUBCASE("zero function") {
    const auto f = nodal_interpolate([](double, double, double) { return 0.0; }, mesh, grid, SpaceKind::Dirichlet,
                                     TimeBasis::P1Continuous);
    CHECK(f.flat().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("f = x reproduces vertex coordinates") {
    const auto f = nodal_interpolate([](double, double x, double) { return x; }, mesh, grid, SpaceKind::Full,
                                     TimeBasis::P1Continuous);
    for (int row = 0; row < f.time_rows(); ++row) {
      for (int d = 0; d < f.dofs().size(); ++d) {
        CHECK(f.coefficients()(row, d) == mesh.vertices()[f.dofs().vertex(d)].x);
      }
    }
  }
  SUBCASE("P0 samples slab midpoints") {
    const auto f = nodal_interpolate([](double t, double, double) { return t; }, mesh, grid, SpaceKind::Full,
                                     TimeBasis::P0Slabwise);
    CHECK(f.coefficients()(0, 0) == 0.25);
    CHECK(f.coefficients()(1, 0) == 0.75);
  }
  SUBCASE("Dirichlet target rejects boundary values") {
    try {
      nodal_interpolate([](double, double x, double) { return x; }, mesh, grid, SpaceKind::Dirichlet,
                        TimeBasis::P1Continuous);
      FAIL("expected a boundary violation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BoundaryViolation);
    }
  }
  SUBCASE("interpolating a discrete field is the identity") {
    SpaceTimeField u(TimeBasis::P1Continuous, DofMap(mesh, SpaceKind::Full), grid);
    const CounterRng rng(5);
    for (Eigen::Index i = 0; i < u.flat().size(); ++i) u.flat()[i] = rng.uniform(i, -1.0, 1.0);
    // Evaluate u at vertices through its own P1 representation.
    const auto back = nodal_interpolate(
        [&](double t, double x, double y) {
          const int k = grid.node_index(t);
          for (int v = 0; v < mesh.num_vertices(); ++v) {
            const Point p = mesh.vertices()[v];
            if (p.x == x && p.y == y) return u.coefficients()(k, u.dofs().dof(v));
          }
          return 0.0;
        },
        mesh, grid, SpaceKind::Full, TimeBasis::P1Continuous);
    CHECK(back.flat() == u.flat());
  }
}

TEST_CASE("Ritz projection") {
  const TriMesh mesh = TriMesh::structured(4);
  const DirichletLaplacian laplacian(mesh);
  SUBCASE("identity on W_h") {
    // Hat function of the centre vertex, with its piecewise-constant gradient.
    int centre = -1;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (mesh.vertices()[v].x == 0.5 && mesh.vertices()[v].y == 0.5) centre = v;
    }
    REQUIRE(centre >= 0);
    const auto locate = [&](double x, double y) {
      for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const Point a = mesh.vertices()[tri[0]], b = mesh.vertices()[tri[1]], c = mesh.vertices()[tri[2]];
        const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        const double l1 = ((x - a.x) * (c.y - a.y) - (c.x - a.x) * (y - a.y)) / det;
        const double l2 = ((b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y)) / det;
        const double eps = -1e-12;
        if (l1 >= eps && l2 >= eps && 1 - l1 - l2 >= eps) return std::pair{t, std::array{1 - l1 - l2, l1, l2}};
      }
      return std::pair{-1, std::array{0.0, 0.0, 0.0}};
    };
    const SpatialFunction hat{
        [&](double x, double y) {
          const auto [t, bary] = locate(x, y);
          const auto& tri = mesh.triangles()[t];
          for (int k = 0; k < 3; ++k) {
            if (tri[k] == centre) return bary[k];
          }
          return 0.0;
        },
        [&](double x, double y) {
          // Quadrature points are interior, so the owning triangle is unique.
          const auto [t, bary] = locate(x, y);
          const auto& tri = mesh.triangles()[t];
          for (int k = 0; k < 3; ++k) {
            if (tri[k] == centre) return mesh.basis_gradients(t)[k];
          }
          return Point{0.0, 0.0};
        }};
    const Eigen::VectorXd c = ritz_project(hat, mesh, laplacian);
    for (int d = 0; d < c.size(); ++d) {
      CHECK(c[d] == doctest::Approx(laplacian.dofs().vertex(d) == centre ? 1.0 : 0.0).epsilon(1e-12));
    }
  }
  SUBCASE("Galerkin orthogonality for sin sin on n = 16") {
    const TriMesh fine = TriMesh::structured(16);
    const DirichletLaplacian lap(fine);
    const SpatialFunction f{[](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); },
                            [](double x, double y) {
                              return Point{kPi * std::cos(kPi * x) * std::sin(kPi * y),
                                           kPi * std::sin(kPi * x) * std::cos(kPi * y)};
                            }};
    const Eigen::VectorXd c = ritz_project(f, fine, lap);
    // Load vector with a separate midpoint-of-edges rule applied to grad f:
    // the residual is bounded by the quadrature difference only.
    Eigen::VectorXd load = Eigen::VectorXd::Zero(lap.dofs().size());
    for (int t = 0; t < fine.num_triangles(); ++t) {
      const auto& tri = fine.triangles()[t];
      for (const std::array<double, 3> b : {std::array{0.5, 0.5, 0.0}, std::array{0.0, 0.5, 0.5},
                                            std::array{0.5, 0.0, 0.5}}) {
        const Point p = fine.map(t, b);
        const Point g = f.gradient(p.x, p.y);
        for (int k = 0; k < 3; ++k) {
          const int d = lap.dofs().dof(tri[k]);
          const Point gk = fine.basis_gradients(t)[k];
          if (d >= 0) load[d] += fine.area(t) / 3.0 * (g.x * gk.x + g.y * gk.y);
        }
      }
    }
    const double residual = (lap.matrix() * c - load).cwiseAbs().maxCoeff();
    CHECK(residual < 1e-3 * load.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("time derivative") {
  const TriMesh mesh = TriMesh::structured(2);
  const TimeGrid grid(1.0, 4);
  SUBCASE("constant in time gives zero") {
    const auto u = nodal_interpolate([](double, double x, double y) { return x + y; }, mesh, grid, SpaceKind::Full,
                                     TimeBasis::P1Continuous);
    CHECK(time_derivative(u).flat().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("linear in time gives the slope") {
    const auto u = nodal_interpolate([](double t, double x, double) { return 3.0 * t + x; }, mesh, grid,
                                     SpaceKind::Full, TimeBasis::P1Continuous);
    const auto du = time_derivative(u);
    for (Eigen::Index i = 0; i < du.flat().size(); ++i) CHECK(du.flat()[i] == doctest::Approx(3.0).epsilon(1e-14));
  }
  SUBCASE("telescoping") {
    SpaceTimeField u(TimeBasis::P1Continuous, DofMap(mesh, SpaceKind::Full), grid);
    const CounterRng rng(9);
    for (Eigen::Index i = 0; i < u.flat().size(); ++i) u.flat()[i] = rng.uniform(i, -1.0, 1.0);
    const auto du = time_derivative(u);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(u.dofs().size());
    for (int k = 0; k < grid.slabs(); ++k) sum += grid.tau() * du.coefficients().row(k).transpose();
    const Eigen::VectorXd diff = (u.coefficients().row(4) - u.coefficients().row(0)).transpose();
    CHECK((sum - diff).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("P0 input is rejected") {
    const SpaceTimeField z(TimeBasis::P0Slabwise, DofMap(mesh, SpaceKind::Dirichlet), grid);
    CHECK_THROWS_AS(time_derivative(z), Error);
  }
}
