#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "heatda/mesh.hpp"

namespace heatda {

/// Full: V_h, every vertex is a degree of freedom. Dirichlet: W_h, boundary
/// vertices are constrained to zero and carry no dof.
enum class SpaceKind { Full, Dirichlet };

class DofMap {
 public:
  DofMap(const TriMesh& mesh, SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  int size() const { return static_cast<int>(vertex_of_dof_.size()); }
  int num_vertices() const { return static_cast<int>(dof_of_vertex_.size()); }
  /// Dof index of a vertex, or -1 when the vertex is constrained.
  int dof(int vertex) const { return dof_of_vertex_[vertex]; }
  int vertex(int dof) const { return vertex_of_dof_[dof]; }

  friend bool operator==(const DofMap& a, const DofMap& b) {
    return a.kind_ == b.kind_ && a.dof_of_vertex_ == b.dof_of_vertex_;
  }

 private:
  SpaceKind kind_;
  std::vector<int> dof_of_vertex_;
  std::vector<int> vertex_of_dof_;
};

/// Uniform grid 0 = t_0 < ... < t_N = T.
class TimeGrid {
 public:
  TimeGrid(double final_time, int slabs);

  double final_time() const { return final_time_; }
  int slabs() const { return slabs_; }
  double tau() const { return final_time_ / slabs_; }
  double node(int k) const { return k == slabs_ ? final_time_ : k * tau(); }
  double midpoint(int k) const { return (k + 0.5) * tau(); }
  /// Index of the node equal to t (to 1e-12 relative), or -1.
  int node_index(double t) const;

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.final_time_ == b.final_time_ && a.slabs_ == b.slabs_;
  }

 private:
  double final_time_;
  int slabs_;
};

/// P1Continuous: continuous piecewise linear in time, one row per node.
/// P0Slabwise: piecewise constant in time, one row per slab.
enum class TimeBasis { P1Continuous, P0Slabwise };

using Coefficients = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Tensor-product field: rows are time indices, columns spatial dofs.
class SpaceTimeField {
 public:
  SpaceTimeField(TimeBasis basis, DofMap dofs, TimeGrid grid);

  TimeBasis basis() const { return basis_; }
  const DofMap& dofs() const { return dofs_; }
  const TimeGrid& grid() const { return grid_; }
  int time_rows() const { return static_cast<int>(coeffs_.rows()); }

  Coefficients& coefficients() { return coeffs_; }
  const Coefficients& coefficients() const { return coeffs_; }

  /// Time-major flattening: index = row * dofs().size() + dof.
  Eigen::Map<Eigen::VectorXd> flat() { return {coeffs_.data(), coeffs_.size()}; }
  Eigen::Map<const Eigen::VectorXd> flat() const { return {coeffs_.data(), coeffs_.size()}; }

  /// Coefficients of one time row expanded to all mesh vertices (constrained
  /// vertices get 0).
  Eigen::VectorXd vertex_values(int row) const;

  /// Value and gradient at barycentric point `bary` of triangle `t`, at
  /// relative position s in [0, 1] of slab k.
  struct Sample {
    double value;
    Point gradient;
  };
  Sample sample(const TriMesh& mesh, int t, const std::array<double, 3>& bary, int slab, double s) const;

  /// Constant slabwise time derivative of a P1Continuous field, expanded to
  /// vertex values.
  Eigen::VectorXd slab_derivative(int slab) const;

 private:
  TimeBasis basis_;
  DofMap dofs_;
  TimeGrid grid_;
  Coefficients coeffs_;
};

using SpaceTimeFunction = std::function<double(double t, double x, double y)>;

/// Scalar function of space with its gradient.
struct SpatialFunction {
  std::function<double(double x, double y)> value;
  std::function<Point(double x, double y)> gradient;
};

/// Nodal values of f on the dofs of `dofs`.
Eigen::VectorXd nodal_interpolate(const std::function<double(double, double)>& f, const TriMesh& mesh,
                                  const DofMap& dofs);

/// Nodal interpolant in space, sampled at time nodes (P1Continuous) or slab
/// midpoints (P0Slabwise). A Dirichlet target requires |f| <= 1e-12 on the
/// boundary at every sampled time, otherwise BoundaryViolation.
SpaceTimeField nodal_interpolate(const SpaceTimeFunction& f, const TriMesh& mesh, const TimeGrid& grid,
                                 SpaceKind kind, TimeBasis basis);

/// Cholesky-factored stiffness matrix on W_h. Used for the Ritz projection
/// and the discrete H^{-1} norm.
class DirichletLaplacian {
 public:
  explicit DirichletLaplacian(const TriMesh& mesh);

  const DofMap& dofs() const { return dofs_; }
  const Eigen::SparseMatrix<double>& matrix() const { return stiffness_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  /// r^T K^{-1} r.
  double dual_norm_squared(const Eigen::VectorXd& functional) const;

 private:
  DofMap dofs_;
  Eigen::SparseMatrix<double> stiffness_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> factor_;
};

/// Stiffness-orthogonal projection onto W_h: (grad P f, grad v) = (grad f,
/// grad v) for all v in W_h. Right-hand side by the order-5 rule.
Eigen::VectorXd ritz_project(const SpatialFunction& f, const TriMesh& mesh);
Eigen::VectorXd ritz_project(const SpatialFunction& f, const TriMesh& mesh, const DirichletLaplacian& laplacian);

/// Slabwise (u_{k+1} - u_k) / tau; InvalidArgument for P0 input.
SpaceTimeField time_derivative(const SpaceTimeField& u);

}  // namespace heatda
