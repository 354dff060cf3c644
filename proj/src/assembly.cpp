#include "heatda/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "heatda/error.hpp"
#include "heatda/quadrature.hpp"
#include "heatda/random.hpp"

namespace heatda {

using Triplet = Eigen::Triplet<double>;

namespace {

// int_0^T r(t)^T M r(t) dt for r linear in t between rows of `nodes`.
double p1_energy(const SparseMatrix& m, const Coefficients& nodes, double tau) {
  double total = 0.0;
  for (Eigen::Index k = 0; k + 1 < nodes.rows(); ++k) {
    const Eigen::VectorXd a = nodes.row(k).transpose();
    const Eigen::VectorXd b = nodes.row(k + 1).transpose();
    total += tau / 3.0 * (a.dot(m * a) + a.dot(m * b) + b.dot(m * b));
  }
  return total;
}

void append_block(std::vector<Triplet>& triplets, const SparseMatrix& block, int row0, int col0, double scale) {
  for (int c = 0; c < block.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(block, c); it; ++it) {
      triplets.emplace_back(row0 + static_cast<int>(it.row()), col0 + c, scale * it.value());
    }
  }
}

double max_abs(const SparseMatrix& m) {
  double worst = 0.0;
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

Coefficients observation_nodes(const TriMesh& mesh, const TimeGrid& grid, const ManufacturedSolution& solution,
                               const Perturbation& noise) {
  Coefficients q(grid.slabs() + 1, mesh.num_vertices());
  for (int k = 0; k <= grid.slabs(); ++k) {
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const Point p = mesh.vertices()[v];
      q(k, v) = solution.u(grid.node(k), p.x, p.y) + noise.observation(k, v);
    }
  }
  return q;
}

}  // namespace

Perturbation apply_perturbation(const DataSpec& data, const TriMesh& mesh, const TimeGrid& grid,
                                const Region& omega) {
  require(data.delta >= 0.0, ErrorKind::InvalidArgument, "perturbation amplitude must be non-negative");
  const DofMap dual(mesh, SpaceKind::Dirichlet);
  Perturbation p;
  p.observation = Coefficients::Zero(grid.slabs() + 1, mesh.num_vertices());
  p.source = Coefficients::Zero(grid.slabs(), dual.size());
  if (data.delta == 0.0) return p;

  const CounterRng root(data.seed);
  const std::vector<int> omega_triangles = triangles_in_region(mesh, omega);
  if (data.target != PerturbationTarget::SourceOnly) {
    std::vector<bool> in_omega(mesh.num_vertices(), false);
    for (int t : omega_triangles) {
      for (int v : mesh.triangles()[t]) in_omega[v] = true;
    }
    const CounterRng rng = root.split(0);
    const auto nv = static_cast<std::uint64_t>(mesh.num_vertices());
    for (int k = 0; k <= grid.slabs(); ++k) {
      for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (in_omega[v]) p.observation(k, v) = data.delta * rng.uniform(k * nv + v, -1.0, 1.0);
      }
    }
    p.observation_l2 = std::sqrt(p1_energy(mass_matrix(mesh, &omega_triangles), p.observation, grid.tau()));
  }
  if (data.target != PerturbationTarget::ObservationOnly) {
    const CounterRng rng = root.split(1);
    const auto nd = static_cast<std::uint64_t>(dual.size());
    for (int k = 0; k < grid.slabs(); ++k) {
      for (int d = 0; d < dual.size(); ++d) p.source(k, d) = data.delta * rng.uniform(k * nd + d, -1.0, 1.0);
    }
    const SparseMatrix mass = restrict_to(mass_matrix(mesh), dual, dual);
    double energy = 0.0;
    for (int k = 0; k < grid.slabs(); ++k) {
      const Eigen::VectorXd r = p.source.row(k).transpose();
      energy += grid.tau() * r.dot(mass * r);
    }
    p.source_l2 = std::sqrt(energy);
  }
  return p;
}

SaddleBlocks build_blocks(const StabilizerPair& pair, const SpatialForms& forms) {
  SaddleBlocks b;
  const TimeGrid& grid = pair.grid();
  b.omega_mass = kron(time_mass_p1(grid), restrict_to(forms.omega_mass, pair.primal_dofs(), pair.primal_dofs()));
  b.primal = b.omega_mass + pair.primal();
  b.constraint = constraint_matrix(forms, grid, pair.primal_dofs(), pair.dual_dofs());
  b.constraint_transpose = b.constraint.transpose();
  b.dual = pair.dual();
  b.primal_gram = b.primal;
  if (pair.variant() == Variant::Stable) b.primal_gram += pair.time_derivative_gram();

  const DofMap& p = pair.primal_dofs();
  const double h2 = forms.h * forms.h;
  b.gram_stiffness = h2 * restrict_to(forms.mass, p, p);
  if (pair.variant() == Variant::Unstable) {
    b.gram_mass = restrict_to(SparseMatrix(forms.omega_mass + forms.jump), p, p);
  } else {
    b.gram_mass = restrict_to(SparseMatrix(forms.omega_mass + (h2 / grid.tau()) * forms.stiffness), p, p);
  }
  b.dual_stiffness = restrict_to(forms.stiffness, pair.dual_dofs(), pair.dual_dofs());
  return b;
}

SparseMatrix compose_saddle_matrix(const SaddleBlocks& blocks) {
  const int np = static_cast<int>(blocks.primal.rows());
  const int nd = static_cast<int>(blocks.dual.rows());
  std::vector<Triplet> triplets;
  triplets.reserve(blocks.primal.nonZeros() + 2 * blocks.constraint.nonZeros() + blocks.dual.nonZeros());
  append_block(triplets, blocks.primal, 0, 0, 1.0);
  append_block(triplets, blocks.constraint_transpose, 0, np, 1.0);
  append_block(triplets, blocks.constraint, np, 0, 1.0);
  append_block(triplets, blocks.dual, np, np, -1.0);
  SparseMatrix a(np + nd, np + nd);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

Eigen::VectorXd assemble_rhs(const TriMesh& mesh, const SaddleSystem& system, const Region& omega,
                             const ManufacturedSolution& solution, const DataSpec& data) {
  const TimeGrid& grid = system.grid;
  const Perturbation noise = apply_perturbation(data, mesh, grid, omega);
  const DofMap& primal = system.primal_dofs;
  const DofMap& dual = system.dual_dofs;
  const double tau = grid.tau();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(system.n_primal + system.n_dual);

  // Primal block: int (q~, v)_omega dt, exact for P1-in-time q~.
  const std::vector<int> omega_triangles = triangles_in_region(mesh, omega);
  const DofMap all(mesh, SpaceKind::Full);
  const SparseMatrix omega_mass = restrict_to(mass_matrix(mesh, &omega_triangles), primal, all);
  const Coefficients observed = observation_nodes(mesh, grid, solution, noise);
  std::vector<Eigen::VectorXd> projected;
  projected.reserve(grid.slabs() + 1);
  for (int k = 0; k <= grid.slabs(); ++k) projected.push_back(omega_mass * observed.row(k).transpose());
  for (int k = 0; k <= grid.slabs(); ++k) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(primal.size());
    if (k > 0) row += tau / 6.0 * projected[k - 1] + tau / 3.0 * projected[k];
    if (k < grid.slabs()) row += tau / 3.0 * projected[k] + tau / 6.0 * projected[k + 1];
    rhs.segment(k * primal.size(), primal.size()) = row;
  }

  // Dual block: int_slab <f, phi_i> dt by quadrature plus the nodal noise load.
  const SparseMatrix dual_mass = restrict_to(mass_matrix(mesh), dual, dual);
  for (int k = 0; k < grid.slabs(); ++k) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(dual.size());
    for (const auto& tq : quadrature::gauss3()) {
      const double t = grid.node(k) + tq.s * tau;
      for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        const auto& verts = mesh.triangles()[tri];
        for (const auto& q : quadrature::triangle_order5()) {
          const Point p = mesh.map(tri, q.bary);
          const double fw = tq.weight * tau * mesh.area(tri) * q.weight * solution.f(t, p.x, p.y);
          for (int j = 0; j < 3; ++j) {
            const int d = dual.dof(verts[j]);
            if (d >= 0) load[d] += fw * q.bary[j];
          }
        }
      }
    }
    if (data.delta > 0.0 && data.target != PerturbationTarget::ObservationOnly) {
      load += tau * (dual_mass * noise.source.row(k).transpose());
    }
    rhs.segment(system.n_primal + k * dual.size(), dual.size()) = load;
  }
  return rhs;
}

SaddleSystem assemble_system(const TriMesh& mesh, const TimeGrid& grid, const StabilizerPair& pair,
                             const Region& omega, const DataSpec& data) {
  return assemble_system(mesh, grid, pair, omega, find_solution(data.solution_id), data);
}

SaddleSystem assemble_system(const TriMesh& mesh, const TimeGrid& grid, const StabilizerPair& pair,
                             const Region& omega, const ManufacturedSolution& solution, const DataSpec& data) {
  require(pair.grid() == grid, ErrorKind::InvalidArgument, "stabilizers were built on a different time grid");
  require(pair.primal_dofs().num_vertices() == mesh.num_vertices(), ErrorKind::InvalidArgument,
          "stabilizers were built on a different mesh");
  require(pair.variant() == Variant::Unstable || solution.boundary_compatible, ErrorKind::InvalidArgument,
          fmt::format("StableModel needs a boundary-compatible solution, '{}' is not", solution.id));
  if (mesh.subdivisions() > 0) {
    require(omega.aligned_with(mesh.subdivisions()), ErrorKind::InvalidArgument,
            "omega is not a union of mesh elements");
  }

  const SpatialForms forms = SpatialForms::build(mesh, omega);
  SaddleSystem system{pair.variant(),
                      {},
                      {},
                      pair.primal_dofs().size() * (grid.slabs() + 1),
                      pair.dual_dofs().size() * grid.slabs(),
                      pair.primal_dofs(),
                      pair.dual_dofs(),
                      grid,
                      build_blocks(pair, forms),
                      {},
                      0.0};
  system.matrix = compose_saddle_matrix(system.blocks);

  const SparseMatrix asym = system.matrix - SparseMatrix(system.matrix.transpose());
  const double scale = std::max(1.0, max_abs(system.matrix));
  require(max_abs(asym) <= 1e-13 * scale, ErrorKind::AssemblyInvariant, "assembled saddle matrix is not symmetric");

  // Observations: nodal interpolant of u at the time nodes plus noise on omega.
  const Perturbation noise = apply_perturbation(data, mesh, grid, omega);
  const Coefficients q = observation_nodes(mesh, grid, solution, noise);
  system.observation = Eigen::Map<const Eigen::VectorXd>(q.data(), q.size());
  system.observation_energy = p1_energy(forms.omega_mass, q, grid.tau());

  system.rhs = assemble_rhs(mesh, system, omega, solution, data);
  return system;
}

double lagrangian(const SaddleSystem& system, const Eigen::VectorXd& state) {
  require(state.size() == system.n_primal + system.n_dual, ErrorKind::InvalidArgument, "state has the wrong size");
  const auto u = state.head(system.n_primal);
  const auto z = state.tail(system.n_dual);
  const auto bu = system.rhs.head(system.n_primal);
  const auto bz = system.rhs.tail(system.n_dual);
  return 0.5 * u.dot(system.blocks.primal * u) - u.dot(bu) + 0.5 * system.observation_energy -
         0.5 * z.dot(system.blocks.dual * z) + z.dot(system.blocks.constraint * u) - z.dot(bz);
}

void write_coordinate_matrix(const SparseMatrix& matrix, std::ostream& out) {
  for (int c = 0; c < matrix.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(matrix, c); it; ++it) {
      out << fmt::format("{} {} {:.17g}\n", it.row() + 1, c + 1, it.value());
    }
  }
}

}  // namespace heatda
