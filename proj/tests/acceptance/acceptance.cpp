// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: heatda_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "heatda/config.hpp"
#include "heatda/verify.hpp"

using namespace heatda;

namespace {

constexpr std::uint64_t kSeed = 1;
const std::vector<int> kLevels{8, 16, 32, 64};

struct Outcome {
  bool passed;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> body;
};

std::string rate_text(const std::optional<RateFit>& fit) {
  return fit ? fmt::format("{:.4f}", fit->rate) : std::string("n/a");
}

bool strictly_decreasing(const std::vector<LevelResult>& levels, std::size_t window) {
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i].errors[window] < levels[i - 1].errors[window])) return false;
  }
  return true;
}

std::string error_list(const std::vector<LevelResult>& levels, std::size_t window) {
  std::string out;
  for (const auto& l : levels) out += fmt::format("{}{:.4e}", out.empty() ? "" : " ", l.errors[window]);
  return out;
}

Outcome coercivity() {
  double worst = 0.0;
  for (Variant v : {Variant::Unstable, Variant::Stable}) {
    for (int n : {4, 8}) {
      for (int slabs : {4, 8}) worst = std::max(worst, verify::coercivity_identity_error(v, n, slabs, 50, kSeed));
    }
  }
  return {worst <= 1e-12, fmt::format("max relative error {:.2e} (tol 1e-12)", worst)};
}

Outcome integration_by_parts() {
  double worst = 0.0;
  for (int n : {4, 8, 16}) worst = std::max(worst, verify::ibp_identity_error(n, 20, kSeed));
  return {worst <= 1e-12, fmt::format("max relative error {:.2e} (tol 1e-12)", worst)};
}

Outcome interpolation() {
  const verify::InterpolationStudy s = verify::interpolation_study(kLevels);
  const double l2 = s.nodal_l2.fit.rate, h1 = s.nodal_h1.fit.rate, ritz = s.ritz_h1.fit.rate;
  const bool ok = std::abs(l2 - 2.0) <= 0.15 && std::abs(h1 - 1.0) <= 0.15 && std::abs(ritz - 1.0) <= 0.15;
  return {ok, fmt::format("nodal L2 {:.4f} (2+-0.15), nodal H1 {:.4f} (1+-0.15), Ritz H1 {:.4f} (1+-0.15)", l2, h1,
                          ritz)};
}

Outcome jump_scaling() {
  const double rate = verify::jump_scaling(kLevels).fit.rate;
  return {std::abs(rate - 2.0) <= 0.3, fmt::format("rate {:.4f} (2+-0.3)", rate)};
}

Outcome poincare() {
  const verify::PoincareStudy p =
      verify::poincare_study(kLevels, RunConfig::defaults(Variant::Unstable).omega, 20, kSeed);
  std::string q;
  for (double v : p.max_quotient) q += fmt::format("{}{:.4f}", q.empty() ? "" : " ", v);
  const double growth = p.max_quotient.back() / p.max_quotient.front();
  return {growth <= 1.5, fmt::format("max quotient per level [{}], C = {:.4f}, growth n=8->64 {:.3f} (<= 1.5)", q,
                                     *std::max_element(p.max_quotient.begin(), p.max_quotient.end()), growth)};
}

Outcome stable_rates() {
  const ExperimentSetup s = RunConfig::defaults(Variant::Stable).setup();
  const ConvergenceReport r = run_convergence(s, 0.0);
  if (!r.complete()) return {false, "sweep failed: " + r.failure->message};
  bool ok = true;
  std::string detail;
  for (std::size_t w = 0; w < s.norms.size(); ++w) {
    ok = ok && r.rates[w] && r.rates[w]->rate >= 0.9;
    detail += fmt::format("{}{} rate {}", detail.empty() ? "" : ", ", to_string(s.norms[w]), rate_text(r.rates[w]));
  }
  return {ok, detail + " (each >= 0.9)"};
}

Outcome unstable_rates() {
  const ExperimentSetup s = RunConfig::defaults(Variant::Unstable).setup();
  const ConvergenceReport r = run_convergence(s, 0.0);
  if (!r.complete()) return {false, "sweep failed: " + r.failure->message};
  const bool decreasing = strictly_decreasing(r.levels, 0);
  const auto& fit = r.rates[0];
  const auto& triple = r.diagnostic_rates[3];
  const bool in_band = fit && fit->rate >= 0.25 && fit->rate <= 1.1;
  const bool triple_ok = triple && triple->rate >= 0.9;
  return {decreasing && in_band && triple_ok,
          fmt::format("L2H1 errors [{}] {}, rate {} (in [0.25, 1.1]), triple-norm rate {} (>= 0.9)",
                      error_list(r.levels, 0), decreasing ? "decreasing" : "NOT decreasing", rate_text(fit),
                      rate_text(triple))};
}

Outcome stagnation() {
  const ExperimentSetup s = RunConfig::defaults(Variant::Unstable).setup();
  const PerturbationStudy p = run_perturbation_study(s, {0.0, 1e-3});
  if (!p.complete()) return {false, "sweep failed: " + p.failure->message};
  const bool clean_decreasing = strictly_decreasing(p.results[0], 0);
  const auto& noisy = p.results[1];
  std::size_t best = 0;
  for (std::size_t i = 1; i < noisy.size(); ++i) {
    if (noisy[i].errors[0] < noisy[best].errors[0]) best = i;
  }
  const bool interior = best > 0 && best + 1 < noisy.size();
  const double finest = noisy.back().errors[0], minimum = noisy[best].errors[0];
  const bool no_gain = finest >= 0.9 * minimum;
  return {clean_decreasing && interior && no_gain,
          fmt::format("delta=0 [{}] {}; delta=1e-3 [{}] minimum at n={} ({}), e(64)/min {:.4f} (>= 0.9)",
                      error_list(p.results[0], 0), clean_decreasing ? "decreasing" : "NOT decreasing",
                      error_list(noisy, 0), noisy[best].n, interior ? "interior" : "NOT interior", finest / minimum)};
}

Outcome zero_data() {
  double worst = 0.0, residual = 0.0;
  for (Variant v : {Variant::Unstable, Variant::Stable}) {
    for (SolveMethod m : {SolveMethod::Direct, SolveMethod::Iterative}) {
      const verify::ZeroDataResult r = verify::zero_data_solve(v, 8, 8, m);
      worst = std::max(worst, r.max_abs);
      residual = std::max(residual, r.residual);
    }
  }
  return {worst == 0.0 && residual == 0.0,
          fmt::format("max |x| {:.1e}, residual {:.1e} (both exactly 0)", worst, residual)};
}

Outcome alpha() {
  bool ok = true;
  std::string detail;
  for (int n : {8, 16}) {
    const verify::AlphaScan s = verify::alpha_scan(n, 20, kSeed);
    ok = ok && s.best_c >= 0.1;
    detail += fmt::format("{}n={}: best alpha {:g}, c {:.4f}", detail.empty() ? "" : ", ", n, s.best_alpha, s.best_c);
  }
  return {ok, detail + " (c >= 0.1)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "coercivity identity", 10, coercivity},
      {2, "integration-by-parts identity", 10, integration_by_parts},
      {3, "interpolation rates", 30, interpolation},
      {4, "jump stabilizer scaling", 30, jump_scaling},
      {5, "discrete Poincare constant", 60, poincare},
      {6, "StableModel S1 rates", 300, stable_rates},
      {7, "UnstableModel U1 convergence", 600, unstable_rates},
      {8, "perturbation stagnation", 600, stagnation},
      {9, "zero-data well-posedness", 5, zero_data},
      {10, "StableModel alpha construction", 30, alpha},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, fmt::format("error: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.limit_seconds;
    const bool passed = o.passed && in_time;
    if (!passed) ++failed;
    std::printf("%s [%d] %s: %s; %.1f s (limit %.0f s)%s\n", passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), seconds, c.limit_seconds, in_time ? "" : " OVER TIME");
    std::fflush(stdout);
  }
  std::printf("%d criterion(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
