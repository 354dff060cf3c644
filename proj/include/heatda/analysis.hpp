#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heatda/assembly.hpp"
#include "heatda/error.hpp"
#include "heatda/solver.hpp"

namespace heatda {

struct RateFit {
  double rate = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS deviation of log(error) from the fitted line
};

/// Least-squares slope of log(error) against log(h). Needs >= 3 points with
/// positive h and error.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// Smallest N >= T / (ct h) whose grid contains every time in `required`.
/// Throws Validation naming `field` of the first time that never lands on a
/// node within a 4x search.
int time_slabs(double T, double h, double ct, const std::vector<std::pair<double, std::string>>& required);

/// Fully resolved experiment.
struct ExperimentSetup {
  Variant variant = Variant::Unstable;
  std::string solution_id;
  std::vector<int> levels;
  double ct = 1.0;
  double T = 1.0;
  double T1 = 0.0;
  double T2 = 1.0;
  Region omega;
  Region window_region;
  std::vector<NormKind> norms;
  std::uint64_t seed = 0;
  SolveMethod method = SolveMethod::Auto;
  PerturbationTarget target = PerturbationTarget::Both;

  std::vector<NormWindow> windows() const;
  /// Throws Validation with the offending field ("section.key") in the message.
  void validate() const;
};

/// |u_h - pi_h u|_V, ||u_h - pi_h u||_omega, ||z_h||_W, their sum, and
/// ||u_h - u||_omega over (0, T).
struct Diagnostics {
  double primal_seminorm = 0.0;
  double omega_norm = 0.0;
  double dual_norm = 0.0;
  double triple = 0.0;
  double omega_error = 0.0;
};

struct LevelResult {
  int n = 0;
  double h = 0.0;
  double tau = 0.0;
  int slabs = 0;
  double delta = 0.0;
  std::vector<double> errors;  // one per window, same order as ExperimentSetup::windows()
  Diagnostics diagnostics;
  SolveReport solve;
  double noise_observation_l2 = 0.0;
  double noise_source_l2 = 0.0;
};

struct Failure {
  ErrorKind kind;
  int n;
  std::string message;
};

inline constexpr const char* kDiagnosticNames[] = {"V_seminorm", "omega_norm", "W_norm", "triple", "omega_error"};

struct ConvergenceReport {
  ExperimentSetup setup;
  double delta = 0.0;
  std::vector<LevelResult> levels;  // ordered by n; a prefix of setup.levels on failure
  std::vector<std::optional<RateFit>> rates;             // per window
  std::vector<std::optional<RateFit>> diagnostic_rates;  // per kDiagnosticNames entry
  std::optional<Failure> failure;

  bool complete() const { return !failure.has_value(); }
};

/// Convergence sweep with noise amplitude `delta`. Levels run on up to
/// worker_threads() threads; aggregation is ordered by n. A failing level
/// keeps the levels below it and records the failure.
ConvergenceReport run_convergence(const ExperimentSetup& setup, double delta);

struct Stagnation {
  int n = 0;
  double h = 0.0;
  double error = 0.0;
};

struct PerturbationStudy {
  ExperimentSetup setup;
  std::vector<double> deltas;
  /// results[d][l] for delta d and level l.
  std::vector<std::vector<LevelResult>> results;
  /// hstar[d][w]: argmin over levels of the error in window w.
  std::vector<std::vector<Stagnation>> hstar;
  std::optional<Failure> failure;

  bool complete() const { return !failure.has_value(); }
};

/// n x delta error matrix. Each level is assembled and factored once and
/// solved for every delta.
PerturbationStudy run_perturbation_study(const ExperimentSetup& setup, const std::vector<double>& deltas);

/// HEATDA_THREADS if set to a positive integer, otherwise the hardware count.
int worker_threads();

/// CSV with header "variant,solution,n,h,tau,delta,norm_kind,window,value",
/// preceded by `echo` as '#' comment lines.
std::string convergence_csv(const ConvergenceReport& report, std::string_view echo);
std::string perturbation_csv(const PerturbationStudy& study, std::string_view echo);

/// Log-log line chart of error against h, one line per series.
struct ChartSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};
std::string loglog_svg(const std::string& title, const std::vector<ChartSeries>& series);

/// Charts per norm kind: (kind, svg).
std::vector<std::pair<std::string, std::string>> convergence_charts(const ConvergenceReport& report);
std::vector<std::pair<std::string, std::string>> perturbation_charts(const PerturbationStudy& study);

/// Writes to a temporary sibling and renames over `path`. Throws Io.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace heatda
