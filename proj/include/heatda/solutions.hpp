#pragma once

#include <functional>
#include <string>
#include <vector>

#include "heatda/forms.hpp"

namespace heatda {

/// Closed-form solution of d_t u - Laplace u = f with the derivatives needed
/// for data, error norms and the a priori norm ||u||_*.
struct ManufacturedSolution {
  using Fn = std::function<double(double t, double x, double y)>;

  std::string id;
  Fn u;
  Fn u_t;
  Fn u_x, u_y;
  Fn u_tx, u_ty;
  Fn u_xx, u_xy, u_yy;
  Fn f;
  /// True when u vanishes on the boundary of the unit square for all t.
  bool boundary_compatible = false;

  ExactField exact() const;
  /// d_t u - Laplace u - f at a point.
  double heat_residual(double t, double x, double y) const;
};

/// S1, S2 (boundary compatible) and U1, U2.
const std::vector<ManufacturedSolution>& builtin_solutions();
/// Looks up a builtin by id; InvalidArgument if unknown.
const ManufacturedSolution& find_solution(const std::string& id);
/// u = 0, f = 0.
ManufacturedSolution zero_solution();

/// Sobolev norms over (0,T) x Omega by the 7-point rule on `mesh` and
/// 3-point Gauss per slab of `grid`.
struct SolutionNorms {
  double l2 = 0.0;       // ||u||
  double norm_1_1 = 0.0; // ||u||_{H^1(0,T;H^1)}
  double norm_0_2 = 0.0; // ||u||_{L^2(0,T;H^2)}
  double norm_0_1 = 0.0; // ||u||_{L^2(0,T;H^1)}
  double f_l2 = 0.0;     // ||f||

  double star() const { return norm_1_1 + norm_0_2; }
};
SolutionNorms solution_norms(const ManufacturedSolution& solution, const TriMesh& mesh, const TimeGrid& grid);

}  // namespace heatda
