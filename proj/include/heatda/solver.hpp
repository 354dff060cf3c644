#pragma once

#include <memory>

#include <Eigen/Dense>

#include "heatda/assembly.hpp"

namespace heatda {

enum class SolveMethod { Auto, Direct, Iterative };

const char* to_string(SolveMethod method);

/// Auto uses the direct path up to this dimension and MINRES above it.
inline constexpr int kDirectDimensionLimit = 20000;

struct SolveReport {
  SolveMethod method = SolveMethod::Direct;  // resolved, never Auto
  double relative_residual = 0.0;  // ||Ax - b|| / ||b||, 0 for b = 0
  int iterations = 0;              // iterative only
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct SaddleSolution {
  SpaceTimeField primal;
  SpaceTimeField dual;
  Eigen::VectorXd state;
  SolveReport report;
};

/// Accepted solves have relative residual at most this.
inline constexpr double kResidualTolerance = 1e-9;

/// Factor once, solve for any number of right-hand sides.
///
/// Direct: sparse LDL^T with AMD ordering. The matrix is symmetric
/// quasi-definite, so no pivoting is needed. One refinement step follows when
/// the first residual misses 1e-12.
/// Iterative: MINRES with block-diagonal preconditioner diag(P^{-1}, S*^{-1}).
/// P = Mt (x) X + Lt (x) Y is inverted by diagonalizing the time pencil, which
/// leaves one sparse spatial Cholesky per time node; S* needs one factor of K.
/// Cap 20 sqrt(dim) iterations; the run restarts from its iterate with a
/// tighter internal tolerance until the true residual reaches 1e-10.
///
/// Throws SolverSingular when the factorization breaks down and
/// SolverTolerance when the residual stays above kResidualTolerance.
class SaddleSolver {
 public:
  SaddleSolver(const SaddleSystem& system, SolveMethod method = SolveMethod::Auto);
  ~SaddleSolver();
  SaddleSolver(SaddleSolver&&) noexcept;
  SaddleSolver& operator=(SaddleSolver&&) noexcept;

  SaddleSolution solve() const;
  SaddleSolution solve(const Eigen::VectorXd& rhs) const;

  double factor_seconds() const;
  SolveMethod method() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SaddleSolution solve(const SaddleSystem& system, SolveMethod method = SolveMethod::Auto);

}  // namespace heatda
