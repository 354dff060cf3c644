#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "heatda/mesh.hpp"
#include "heatda/spaces.hpp"

namespace heatda {

using SparseMatrix = Eigen::SparseMatrix<double>;

// ---------------------------------------------------------------------------
// Spatial matrices, indexed by mesh vertex.

/// P1 mass matrix, optionally restricted to a subset of triangles.
SparseMatrix mass_matrix(const TriMesh& mesh, const std::vector<int>* triangles = nullptr);
SparseMatrix stiffness_matrix(const TriMesh& mesh);

/// Quadratic form sum_F h |F| [n . grad u]_F^2. Exact for P1 because the
/// gradient is constant on each triangle.
SparseMatrix jump_stabilizer_matrix(const TriMesh& mesh);

/// Rows/columns of a vertex-indexed matrix restricted to the dofs of two maps.
SparseMatrix restrict_to(const SparseMatrix& vertex_matrix, const DofMap& rows, const DofMap& cols);

/// Vertex-indexed matrices that every space-time form is built from.
struct SpatialForms {
  SparseMatrix mass;
  SparseMatrix stiffness;
  SparseMatrix jump;
  SparseMatrix omega_mass;
  double h = 0.0;

  static SpatialForms build(const TriMesh& mesh, const Region& omega);
};

// ---------------------------------------------------------------------------
// Time matrices for the P1Continuous (nodes) / P0Slabwise (slabs) bases.

SparseMatrix time_mass_p1(const TimeGrid& grid);
SparseMatrix time_stiffness_p1(const TimeGrid& grid);
/// N x (N+1): row k has -1 at k and +1 at k+1.
SparseMatrix slab_difference(const TimeGrid& grid);
/// N x (N+1): row k has tau/2 at k and k+1.
SparseMatrix slab_average(const TimeGrid& grid);

SparseMatrix kron(const SparseMatrix& time, const SparseMatrix& space);

// ---------------------------------------------------------------------------
// Slab-loop evaluators. These work from the spatial matrices and never touch
// the assembled space-time operators, so they serve as an independent route.

/// int_0^T (u, v)_omega dt, exact for P1-in-time fields.
double omega_form(const SpaceTimeField& u, const SpaceTimeField& v, const SpatialForms& forms);
/// int_0^T J(u, v) dt, exact for P1-in-time fields.
double jump_time_form(const SpaceTimeField& u, const SpaceTimeField& v, const SpatialForms& forms);
/// (d_t u, d_t v) over (0,T) x Omega.
double time_derivative_form(const SpaceTimeField& u, const SpaceTimeField& v, const SpatialForms& forms);
/// int_0^T a(z, w) dt for P0 fields.
double stiffness_time_form(const SpaceTimeField& z, const SpaceTimeField& w, const SpatialForms& forms);

/// G(u, z) = sum_k tau [(d_t u, z_k) + a(mean_k u, z_k)] for a P1 primal and
/// a P0 dual field on the same grid.
double constraint_form_G(const SpaceTimeField& u, const SpaceTimeField& z, const SpatialForms& forms);

/// Operator of G: rows are dual unknowns, columns primal unknowns.
SparseMatrix constraint_matrix(const SpatialForms& forms, const TimeGrid& grid, const DofMap& primal,
                               const DofMap& dual);

// ---------------------------------------------------------------------------
// Stabilizers.

/// UnstableModel: s = int J dt + ||h d_t u||^2 on V_h, s* = a on W_h.
/// StableModel: s = ||h grad u(0)||^2 on W_h, s* = a on W_h, with the
/// seminorm s^{1/2} + ||h d_t u||.
enum class Variant { Unstable, Stable };

const char* to_string(Variant v);
Variant parse_variant(const std::string& name);

class StabilizerPair {
 public:
  Variant variant() const { return variant_; }
  const DofMap& primal_dofs() const { return primal_dofs_; }
  const DofMap& dual_dofs() const { return dual_dofs_; }
  const TimeGrid& grid() const { return grid_; }
  double h() const { return h_; }

  /// Space-time operators on flattened coefficients.
  const SparseMatrix& primal() const { return primal_; }
  const SparseMatrix& dual() const { return dual_; }
  /// h^2 (d_t u, d_t v) on the primal space.
  const SparseMatrix& time_derivative_gram() const { return dt_gram_; }

  double s(const SpaceTimeField& u, const SpaceTimeField& v) const;
  double s_star(const SpaceTimeField& z, const SpaceTimeField& w) const;
  double primal_seminorm(const SpaceTimeField& u) const;
  double dual_norm(const SpaceTimeField& z) const;

  SpaceTimeField make_primal() const;
  SpaceTimeField make_dual() const;

 private:
  friend StabilizerPair build_stabilizers(Variant, const TriMesh&, const TimeGrid&, const SpatialForms&);

  StabilizerPair(Variant variant, DofMap primal, DofMap dual, TimeGrid grid, double h)
      : variant_(variant), primal_dofs_(std::move(primal)), dual_dofs_(std::move(dual)), grid_(grid), h_(h) {}

  Variant variant_;
  DofMap primal_dofs_;
  DofMap dual_dofs_;
  TimeGrid grid_;
  double h_;
  SparseMatrix primal_;
  SparseMatrix dual_;
  SparseMatrix dt_gram_;
};

StabilizerPair build_stabilizers(Variant variant, const TriMesh& mesh, const TimeGrid& grid,
                                 const SpatialForms& forms);
StabilizerPair build_stabilizers(Variant variant, const TriMesh& mesh, const TimeGrid& grid);

/// |u|_V + ||u||_omega + ||z||_W.
double triple_norm(const SpaceTimeField& u, const SpaceTimeField& z, const StabilizerPair& pair,
                   const SpatialForms& forms);
double triple_norm(const SpaceTimeField& u, const SpaceTimeField& z, const StabilizerPair& pair,
                   const TriMesh& mesh, const Region& omega);

// ---------------------------------------------------------------------------
// Error norms.

enum class NormKind { L2L2, L2H1, CinT_L2, H1Hm1 };

const char* to_string(NormKind kind);
NormKind parse_norm_kind(const std::string& name);

struct NormWindow {
  double t_begin = 0.0;
  double t_end = 0.0;
  Region region;
  NormKind kind = NormKind::L2L2;

  /// Stable text label, free of commas: "t0.25-0.75_x0-1_y0-1".
  std::string label() const;
};

/// Smooth function of (t, x, y) with its spatial gradient and time derivative.
struct ExactField {
  std::function<double(double, double, double)> value;
  std::function<Point(double, double, double)> gradient;
  std::function<double(double, double, double)> time_derivative;
};

/// e = discrete - exact; either side may be absent.
struct ErrorSource {
  const SpaceTimeField* discrete = nullptr;
  const ExactField* exact = nullptr;
};

/// Window norms of e. L2L2/L2H1 integrate slabwise (3-point Gauss in time,
/// 7-point rule in space) over region triangles; CinT_L2 is the max of the
/// spatial L2 norm over window nodes; H1Hm1 integrates r^T K^{-1} r with
/// r_i = (d_t e, phi_i) over Omega. `laplacian` is built on demand if null.
double error_norm(const ErrorSource& error, const NormWindow& window, const TriMesh& mesh, const TimeGrid& grid,
                  const DirichletLaplacian* laplacian = nullptr);

}  // namespace heatda
