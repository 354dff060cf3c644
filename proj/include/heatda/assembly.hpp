#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "heatda/forms.hpp"
#include "heatda/solutions.hpp"

namespace heatda {

enum class PerturbationTarget { ObservationOnly, SourceOnly, Both };

/// Which data to assimilate and how to pollute it.
struct DataSpec {
  std::string solution_id;
  double delta = 0.0;
  std::uint64_t seed = 0;
  PerturbationTarget target = PerturbationTarget::Both;
};

/// Realized noise: delta * U(-1, 1) per (time node, omega vertex) for the
/// observation and per (slab, dual dof) for the source.
struct Perturbation {
  Coefficients observation;  // (N+1) x vertices, zero off omega
  Coefficients source;       // N x dual dofs
  double observation_l2 = 0.0;  // ||dq||_{L2((0,T) x omega)} of the P1 noise field
  double source_l2 = 0.0;       // ||df||_{L2((0,T) x Omega)}
};

Perturbation apply_perturbation(const DataSpec& data, const TriMesh& mesh, const TimeGrid& grid,
                                const Region& omega);

/// Blocks of A = [[M_omega + S, G^T], [G, -S*]]. The upper-right block is
/// stored separately so the composed matrix can be checked against it.
struct SaddleBlocks {
  SparseMatrix primal;                // M_omega + S
  SparseMatrix constraint;            // G, dual x primal
  SparseMatrix constraint_transpose;  // G^T
  SparseMatrix dual;                  // S*
  SparseMatrix omega_mass;            // space-time M_omega on the primal space
  SparseMatrix primal_gram;           // M_omega + S (+ h^2 time-derivative gram for StableModel)
  /// Spatial factors of the Kronecker form Mt (x) gram_mass + Lt (x) gram_stiffness,
  /// exact for primal_gram in UnstableModel and a spectral stand-in for
  /// StableModel, where the t = 0 gradient term is spread over the first slab.
  SparseMatrix gram_mass;
  SparseMatrix gram_stiffness;
  /// K on dual dofs; S* = tau I (x) dual_stiffness.
  SparseMatrix dual_stiffness;
};

SaddleBlocks build_blocks(const StabilizerPair& pair, const SpatialForms& forms);
SparseMatrix compose_saddle_matrix(const SaddleBlocks& blocks);

struct SaddleSystem {
  Variant variant;
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  int n_primal = 0;
  int n_dual = 0;
  DofMap primal_dofs;
  DofMap dual_dofs;
  TimeGrid grid;
  SaddleBlocks blocks;
  /// q~ at time nodes on every vertex, flattened time-major.
  Eigen::VectorXd observation;
  /// ||q~||_omega^2, the constant of the Lagrangian.
  double observation_energy = 0.0;
};

/// Normal equations for the data in `data` (delta = 0 gives the unperturbed
/// system). Primal rhs = M_omega q~, dual rhs = slabwise load of f~.
SaddleSystem assemble_system(const TriMesh& mesh, const TimeGrid& grid, const StabilizerPair& pair,
                             const Region& omega, const ManufacturedSolution& solution, const DataSpec& data);
SaddleSystem assemble_system(const TriMesh& mesh, const TimeGrid& grid, const StabilizerPair& pair,
                             const Region& omega, const DataSpec& data);

/// Same matrix, new right-hand side for other perturbation data.
Eigen::VectorXd assemble_rhs(const TriMesh& mesh, const SaddleSystem& system, const Region& omega,
                             const ManufacturedSolution& solution, const DataSpec& data);

/// L(u, z) = 1/2 ||u - q~||_omega^2 + 1/2 s(u,u) - 1/2 s*(z,z) + G(u,z) - <f~, z>
/// at the stacked vector (u, z).
double lagrangian(const SaddleSystem& system, const Eigen::VectorXd& state);

/// Coordinate text: one "row col value" line per stored entry, 1-based.
void write_coordinate_matrix(const SparseMatrix& matrix, std::ostream& out);

}  // namespace heatda
