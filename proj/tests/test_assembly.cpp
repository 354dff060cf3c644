#include <doctest.h>

#include <cmath>
#include <sstream>

#include "heatda/assembly.hpp"
#include "heatda/error.hpp"
#include "heatda/random.hpp"
#include "heatda/solver.hpp"

using namespace heatda;

namespace {

struct Instance {
  TriMesh mesh;
  TimeGrid grid;
  Region omega;
  StabilizerPair pair;

  Instance(Variant v, int n, int slabs, Region om)
      : mesh(TriMesh::structured(n)), grid(1.0, slabs), omega(om), pair(build_stabilizers(v, mesh, grid)) {}

  SaddleSystem system(const DataSpec& data) const { return assemble_system(mesh, grid, pair, omega, data); }
};

const Region kOmega{0.25, 0.75, 0.25, 0.75};

}  // namespace

TEST_CASE("saddle system dimensions") {
  const Instance unstable(Variant::Unstable, 4, 4, kOmega);
  const SaddleSystem s = unstable.system({"U1"});
  CHECK(s.n_primal == 25 * 5);
  CHECK(s.n_dual == 9 * 4);
  CHECK(s.matrix.rows() == 161);
  CHECK(s.rhs.size() == 161);

  const Instance stable(Variant::Stable, 4, 4, kOmega);
  const SaddleSystem t = stable.system({"S1"});
  CHECK(t.n_primal == 9 * 5);
  CHECK(t.n_dual == 9 * 4);
}

TEST_CASE("zero data gives a zero right-hand side") {
  const Instance inst(Variant::Unstable, 4, 4, kOmega);
  const SaddleSystem s = assemble_system(inst.mesh, inst.grid, inst.pair, inst.omega, zero_solution(), {"zero"});
  CHECK(s.rhs.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.observation_energy == 0.0);
}

TEST_CASE("constraint transpose is exact") {
  for (Variant v : {Variant::Unstable, Variant::Stable}) {
    const Instance inst(v, 4, 3, kOmega);
    const SaddleSystem s = inst.system({v == Variant::Stable ? "S1" : "U1"});
    const SparseMatrix diff = s.blocks.constraint_transpose - SparseMatrix(s.blocks.constraint.transpose());
    CHECK(diff.norm() == 0.0);
    const SparseMatrix asym = s.matrix - SparseMatrix(s.matrix.transpose());
    CHECK(asym.norm() <= 1e-13 * s.matrix.norm());
  }
}

TEST_CASE("perturbations") {
  const TriMesh mesh = TriMesh::structured(8);
  const TimeGrid grid(1.0, 8);
  SUBCASE("delta = 0 leaves the data untouched") {
    const Perturbation p = apply_perturbation({"U1", 0.0, 9}, mesh, grid, kOmega);
    CHECK(p.observation.cwiseAbs().maxCoeff() == 0.0);
    CHECK(p.source.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("deterministic in the seed") {
    const Perturbation a = apply_perturbation({"U1", 1e-2, 9}, mesh, grid, kOmega);
    const Perturbation b = apply_perturbation({"U1", 1e-2, 9}, mesh, grid, kOmega);
    const Perturbation c = apply_perturbation({"U1", 1e-2, 10}, mesh, grid, kOmega);
    CHECK(a.observation == b.observation);
    CHECK(a.source == b.source);
    CHECK(a.observation != c.observation);
  }
  SUBCASE("bounded by delta and supported on omega") {
    const double delta = 1e-3;
    const Perturbation p = apply_perturbation({"U1", delta, 3}, mesh, grid, kOmega);
    CHECK(p.observation.cwiseAbs().maxCoeff() <= delta);
    CHECK(p.source.cwiseAbs().maxCoeff() <= delta);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (!kOmega.contains(mesh.vertices()[v])) CHECK(p.observation.col(v).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(p.observation_l2 > 0.0);
    CHECK(p.observation_l2 <= delta * std::sqrt(grid.final_time() * kOmega.area()) * (1 + 1e-12));
    CHECK(p.source_l2 <= delta * std::sqrt(grid.final_time()) * (1 + 1e-12));
  }
  SUBCASE("targets") {
    const Perturbation obs = apply_perturbation({"U1", 1e-2, 3, PerturbationTarget::ObservationOnly}, mesh, grid,
                                                kOmega);
    CHECK(obs.source.cwiseAbs().maxCoeff() == 0.0);
    CHECK(obs.observation.cwiseAbs().maxCoeff() > 0.0);
    const Perturbation src = apply_perturbation({"U1", 1e-2, 3, PerturbationTarget::SourceOnly}, mesh, grid, kOmega);
    CHECK(src.observation.cwiseAbs().maxCoeff() == 0.0);
    CHECK(src.source.cwiseAbs().maxCoeff() > 0.0);
  }
  SUBCASE("negative amplitude is rejected") {
    CHECK_THROWS_AS(apply_perturbation({"U1", -1.0, 3}, mesh, grid, kOmega), Error);
  }
}

TEST_CASE("scaling the data scales the solution") {
  const Instance inst(Variant::Unstable, 4, 4, kOmega);
  const SaddleSystem s = inst.system({"U1"});
  const SaddleSolver solver(s, SolveMethod::Direct);
  const SaddleSolution x1 = solver.solve();
  const SaddleSolution x2 = solver.solve(2.0 * s.rhs);
  CHECK((x2.state - 2.0 * x1.state).cwiseAbs().maxCoeff() <= 1e-12 * x1.state.cwiseAbs().maxCoeff());
}

TEST_CASE("solution is a stationary point of the Lagrangian") {
  const Instance inst(Variant::Stable, 4, 4, kOmega);
  const SaddleSystem s = inst.system({"S1"});
  const SaddleSolution x = solve(s, SolveMethod::Direct);
  const CounterRng rng(5);
  Eigen::VectorXd dir(s.rhs.size());
  for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = rng.uniform(i, -1.0, 1.0);
  dir.normalize();
  const double eps = 1e-4;
  const double slope = (lagrangian(s, x.state + eps * dir) - lagrangian(s, x.state - eps * dir)) / (2 * eps);
  CHECK(std::abs(slope) <= 1e-9);
  // Away from the solution the slope is visible.
  Eigen::VectorXd other = x.state;
  other[0] += 1.0;
  const double off = (lagrangian(s, other + eps * dir) - lagrangian(s, other - eps * dir)) / (2 * eps);
  CHECK(std::abs(off) > 1e-6);
}

TEST_CASE("stable variant rejects incompatible solutions") {
  const Instance inst(Variant::Stable, 4, 4, kOmega);
  CHECK_THROWS_AS(inst.system({"U1"}), Error);
}

TEST_CASE("coordinate export is one-based") {
  SparseMatrix m(2, 3);
  m.insert(0, 0) = 1.5;
  m.insert(1, 2) = -2.0;
  m.makeCompressed();
  std::ostringstream out;
  write_coordinate_matrix(m, out);
  CHECK(out.str() == "1 1 1.5\n2 3 -2\n");
}
