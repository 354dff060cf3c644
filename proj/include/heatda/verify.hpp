#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "heatda/analysis.hpp"

namespace heatda::verify {

// ---------------------------------------------------------------------------
// Measurements. Each returns raw numbers; the thresholds live in run_checks
// and in the acceptance suite.

/// Largest |A[(u,z),(u,-z)] - (||u||_omega^2 + s(u,u) + s*(z,z))| / rhs over
/// `samples` random pairs. The right side uses the slab-loop evaluators.
/// `corrupt_transpose` negates the G^T block before composing A.
double coercivity_identity_error(Variant variant, int n, int slabs, int samples, std::uint64_t seed,
                                 bool corrupt_transpose = false);

/// Largest |a(u,v) - sum_F |F| n.(grad u_L - grad u_R) (v_a + v_b)/2| /
/// (|u|_1 |v|_1) over random u in V_h and v in W_h.
double ibp_identity_error(int n, int samples, std::uint64_t seed);

struct LevelSeries {
  std::vector<std::pair<double, double>> points;  // (h, value)
  RateFit fit;
};

struct InterpolationStudy {
  LevelSeries nodal_l2;
  LevelSeries nodal_h1;
  LevelSeries ritz_h1;
};

/// Errors of the nodal interpolant and Ritz projection of sin(pi x) sin(pi y).
InterpolationStudy interpolation_study(const std::vector<int>& levels);

/// J(I_h w, I_h w) for w = sin(pi x) sin(pi y).
LevelSeries jump_scaling(const std::vector<int>& levels);

/// max over the test library of h ||u|| / (J(u,u)^{1/2} + ||u||_omega) per
/// level. The library holds interpolated smooth functions and `random_fields`
/// random nodal vectors.
struct PoincareStudy {
  std::vector<int> levels;
  std::vector<double> max_quotient;
  double growth() const { return max_quotient.back() / max_quotient.front(); }
};
PoincareStudy poincare_study(const std::vector<int>& levels, const Region& omega, int random_fields,
                             std::uint64_t seed);

/// Largest ||M - M^T||_max over every assembled form for one instance.
double max_asymmetry(Variant variant, int n, int slabs);

struct ZeroDataResult {
  double max_abs = 0.0;
  double residual = 0.0;
};
ZeroDataResult zero_data_solve(Variant variant, int n, int slabs, SolveMethod method);

/// c(alpha) = min over random pairs of A[(u,z),(u, alpha h^2 d_t u - z)] /
/// (s(u,u) + alpha ||h d_t u||^2 + ||u||_omega^2 + s*(z,z)), StableModel.
struct AlphaScan {
  std::vector<double> alphas;
  std::vector<double> c;
  double best_alpha = 0.0;
  double best_c = 0.0;
};
AlphaScan alpha_scan(int n, int samples, std::uint64_t seed);

/// Ratios that must stay bounded under refinement, one value per level.
/// Vs: |pi_h u|_V / (h ||u||_*); ds: ||pi_h z||_W / ||z||_(0,1);
/// V_lower: max |G(u, z - pi_h z)| / (|u|_V ||z||_(0,1)) over random u.
struct ConstantTrack {
  std::string name;
  std::vector<int> levels;
  std::vector<double> ratio;
  /// Finest ratio over the largest coarser one; a ratio that blows up like
  /// h^{-p} shows up as 2^p.
  double growth() const;
};
ConstantTrack track_vs_upper(Variant variant, const std::string& solution_id, const std::vector<int>& levels);
ConstantTrack track_ds_upper(const std::string& solution_id, const std::vector<int>& levels);
ConstantTrack track_v_lower(Variant variant, const std::string& solution_id, const std::vector<int>& levels,
                            int samples, std::uint64_t seed);

/// Largest relative Ritz residual |(grad(f - R f), grad v)| over random smooth
/// H_0^1 functions f, and the relative size of int a(u, z - R z) dt for
/// random u in W_h (the stiffness part of G in StableModel).
struct RitzOrthogonality {
  double residual = 0.0;
  double stiffness_term = 0.0;
};
RitzOrthogonality ritz_orthogonality(int n, int functions, std::uint64_t seed);

/// Largest relative defect of additivity and homogeneity of G in u and z.
double constraint_linearity_error(int n, int slabs, int samples, std::uint64_t seed);

/// Triple norm of the difference between the direct and iterative solutions
/// of the default experiment of `variant` at level n.
double direct_iterative_gap(Variant variant, int n);

// ---------------------------------------------------------------------------
// Check suite.

enum class Level { Quick, Full };

struct Options {
  Level level = Level::Quick;
  std::uint64_t seed = 1;
  /// Fault injection for mutation tests: negate the G^T block.
  bool corrupt_constraint_transpose = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // instance and measured value
  double seconds = 0.0;
};

using CheckCallback = std::function<void(const CheckResult&)>;

/// Runs the suite in a fixed order, reporting each check as it finishes.
std::vector<CheckResult> run_checks(const Options& options, const CheckCallback& on_check = {});

const char* to_string(Level level);
Level parse_level(const std::string& name);

}  // namespace heatda::verify
