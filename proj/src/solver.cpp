#include "heatda/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/IterativeSolvers>
#include <fmt/format.h>

#include "heatda/error.hpp"

namespace heatda {

namespace {

using Clock = std::chrono::steady_clock;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kIterativeTarget = 1e-10;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double bn = b.norm();
  const double rn = (a * x - b).norm();
  if (bn == 0.0) return rn;
  return rn / bn;
}

// (Mt (x) X + Lt (x) Y)^{-1} with Lt V = Mt V diag(lambda), V^T Mt V = I:
// the operator equals V^{-T} (x) I . blockdiag(X + lambda_j Y) . V^{-1} (x) I.
class KroneckerInverse {
 public:
  KroneckerInverse(const SparseMatrix& time_mass, const SparseMatrix& time_stiffness, const SparseMatrix& x,
                   const SparseMatrix& y) {
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> pencil{Eigen::MatrixXd(time_stiffness),
                                                                           Eigen::MatrixXd(time_mass)};
    require(pencil.info() == Eigen::Success, ErrorKind::SolverSingular, "time pencil eigensolve failed");
    basis_ = pencil.eigenvectors();
    factors_.reserve(basis_.cols());
    for (Eigen::Index j = 0; j < basis_.cols(); ++j) {
      const SparseMatrix block = x + pencil.eigenvalues()[j] * y;
      factors_.push_back(std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>(block));
      require(factors_.back()->info() == Eigen::Success, ErrorKind::SolverSingular,
              "preconditioner block is not positive definite: system singular");
    }
  }

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& r) const {
    const Eigen::Index nt = basis_.rows();
    const Eigen::Index ns = r.size() / nt;
    const Eigen::Map<const RowMatrix> rows(r.data(), nt, ns);
    RowMatrix w = basis_.transpose() * rows;
    for (Eigen::Index j = 0; j < nt; ++j) {
      w.row(j) = factors_[j]->solve(Eigen::VectorXd(w.row(j).transpose())).transpose();
    }
    const RowMatrix out = basis_ * w;
    return Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
  }

 private:
  Eigen::MatrixXd basis_;
  std::vector<std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>>> factors_;
};

struct PreconditionerData {
  std::unique_ptr<KroneckerInverse> primal;
  Eigen::SimplicialLLT<SparseMatrix> dual;
  Eigen::Index n_primal = 0;
  int slabs = 0;
  double tau = 1.0;
};

// MINRES-compatible wrapper; the data is attached before compute().
class BlockPreconditioner {
 public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  void attach(const PreconditionerData* data) { data_ = data; }

  template <typename MatType>
  BlockPreconditioner& analyzePattern(const MatType&) { return *this; }
  template <typename MatType>
  BlockPreconditioner& factorize(const MatType&) { return *this; }
  template <typename MatType>
  BlockPreconditioner& compute(const MatType&) { return *this; }

  template <typename Rhs>
  Eigen::VectorXd solve(const Rhs& b) const {
    const Eigen::VectorXd r = b;
    Eigen::VectorXd x(r.size());
    const Eigen::Index np = data_->n_primal;
    x.head(np) = data_->primal->apply(r.head(np));
    const Eigen::Index nd = (r.size() - np) / std::max(1, data_->slabs);
    for (int k = 0; k < data_->slabs; ++k) {
      x.segment(np + k * nd, nd) = data_->dual.solve(Eigen::VectorXd(r.segment(np + k * nd, nd))) / data_->tau;
    }
    return x;
  }

  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  const PreconditionerData* data_ = nullptr;
};

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;
using Minres = Eigen::MINRES<SparseMatrix, Eigen::Lower | Eigen::Upper, BlockPreconditioner>;

}  // namespace

const char* to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::Auto: return "auto";
    case SolveMethod::Direct: return "direct";
    case SolveMethod::Iterative: return "iterative";
  }
  return "unknown";
}

struct SaddleSolver::Impl {
  const SaddleSystem* system = nullptr;
  SolveMethod method = SolveMethod::Direct;
  double factor_seconds = 0.0;
  Ldlt ldlt;
  PreconditionerData preconditioner;
  mutable Minres minres;
  Eigen::Index max_iterations = 0;
};

SaddleSolver::SaddleSolver(const SaddleSystem& system, SolveMethod method) : impl_(std::make_unique<Impl>()) {
  impl_->system = &system;
  if (method == SolveMethod::Auto) {
    method = system.matrix.rows() <= kDirectDimensionLimit ? SolveMethod::Direct : SolveMethod::Iterative;
  }
  impl_->method = method;
  const auto start = Clock::now();
  if (method == SolveMethod::Direct) {
    impl_->ldlt.compute(system.matrix);
    bool ok = impl_->ldlt.info() == Eigen::Success;
    if (ok) {
      const auto& d = impl_->ldlt.vectorD();
      ok = d.allFinite() && d.cwiseAbs().minCoeff() > 0.0;
    }
    if (!ok) {
      fail(ErrorKind::SolverSingular, fmt::format("LDL^T factorization of the {}x{} saddle matrix broke down: "
                                                  "system singular",
                                                  system.matrix.rows(), system.matrix.cols()));
    }
  } else {
    const SaddleBlocks& b = system.blocks;
    PreconditionerData& p = impl_->preconditioner;
    p.primal = std::make_unique<KroneckerInverse>(time_mass_p1(system.grid), time_stiffness_p1(system.grid),
                                                  b.gram_mass, b.gram_stiffness);
    p.dual.compute(b.dual_stiffness);
    if (p.dual.info() != Eigen::Success) {
      fail(ErrorKind::SolverSingular, "dual preconditioner block is not positive definite: system singular");
    }
    p.n_primal = system.n_primal;
    p.slabs = system.grid.slabs();
    p.tau = system.grid.tau();
    impl_->minres.preconditioner().attach(&p);
    impl_->minres.compute(system.matrix);
    const double dim = static_cast<double>(system.matrix.rows());
    impl_->max_iterations = static_cast<Eigen::Index>(std::ceil(20.0 * std::sqrt(dim)));
  }
  impl_->factor_seconds = seconds_since(start);
}

SaddleSolver::~SaddleSolver() = default;
SaddleSolver::SaddleSolver(SaddleSolver&&) noexcept = default;
SaddleSolver& SaddleSolver::operator=(SaddleSolver&&) noexcept = default;

double SaddleSolver::factor_seconds() const { return impl_->factor_seconds; }
SolveMethod SaddleSolver::method() const { return impl_->method; }

SaddleSolution SaddleSolver::solve() const { return solve(impl_->system->rhs); }

SaddleSolution SaddleSolver::solve(const Eigen::VectorXd& rhs) const {
  const SaddleSystem& system = *impl_->system;
  require(rhs.size() == system.matrix.rows(), ErrorKind::InvalidArgument, "right-hand side has the wrong size");
  const auto start = Clock::now();
  SolveReport report;
  report.method = impl_->method;
  report.factor_seconds = impl_->factor_seconds;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  if (rhs.squaredNorm() == 0.0) {
    // x = 0 exactly
  } else if (impl_->method == SolveMethod::Direct) {
    x = impl_->ldlt.solve(rhs);
    if (relative_residual(system.matrix, x, rhs) > 1e-12) {
      const Eigen::VectorXd correction = impl_->ldlt.solve(Eigen::VectorXd(rhs - system.matrix * x));
      x += correction;
    }
  } else {
    Minres& minres = impl_->minres;
    double tolerance = kIterativeTarget;
    Eigen::Index used = 0;
    for (int round = 0; round < 6 && used < impl_->max_iterations; ++round) {
      minres.setTolerance(tolerance);
      minres.setMaxIterations(impl_->max_iterations - used);
      x = minres.solveWithGuess(rhs, x);
      used += minres.iterations();
      const double achieved = relative_residual(system.matrix, x, rhs);
      if (!(achieved > kIterativeTarget)) break;
      tolerance = std::max(1e-16, tolerance * 0.5 * kIterativeTarget / achieved);
    }
    report.iterations = static_cast<int>(used);
  }
  report.relative_residual = relative_residual(system.matrix, x, rhs);
  report.solve_seconds = seconds_since(start);
  if (!std::isfinite(report.relative_residual)) {
    fail(ErrorKind::SolverSingular, "solution is not finite: system singular");
  }
  if (report.relative_residual > kResidualTolerance) {
    fail(ErrorKind::SolverTolerance,
         fmt::format("tolerance not reached: relative residual {:.3e} > {:.0e} after {} iterations",
                     report.relative_residual, kResidualTolerance, report.iterations));
  }

  SaddleSolution out{SpaceTimeField(TimeBasis::P1Continuous, system.primal_dofs, system.grid),
                     SpaceTimeField(TimeBasis::P0Slabwise, system.dual_dofs, system.grid), x, report};
  out.primal.flat() = x.head(system.n_primal);
  out.dual.flat() = x.tail(system.n_dual);
  return out;
}

SaddleSolution solve(const SaddleSystem& system, SolveMethod method) {
  return SaddleSolver(system, method).solve();
}

}  // namespace heatda
