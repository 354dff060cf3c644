#include <doctest.h>

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heatda/analysis.hpp"
#include "heatda/random.hpp"
#include "heatda/solutions.hpp"

using namespace heatda;

TEST_CASE("fit_rate") {
  SUBCASE("exact power laws") {
    const RateFit one = fit_rate({{1.0 / 8, 1.0 / 8}, {1.0 / 16, 1.0 / 16}, {1.0 / 32, 1.0 / 32}});
    CHECK(one.rate == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(one.residual == doctest::Approx(0.0).epsilon(1e-12));
    std::vector<std::pair<double, double>> squares;
    for (double h : {0.5, 0.25, 0.125, 0.0625}) squares.emplace_back(h, h * h);
    CHECK(fit_rate(squares).rate == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("noisy data") {
    const CounterRng rng(11);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 5; ++i) {
      const double h = std::pow(0.5, i + 2);
      pts.emplace_back(h, 3.0 * std::pow(h, 0.6) * (1.0 + rng.uniform(i, -0.01, 0.01)));
    }
    const RateFit fit = fit_rate(pts);
    CHECK(std::abs(fit.rate - 0.6) <= 0.05);
    CHECK(fit.residual < 0.01);
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(fit_rate({{0.5, 1.0}, {0.25, 0.5}}), Error);
    CHECK_THROWS_AS(fit_rate({{0.5, 1.0}, {0.25, 0.0}, {0.125, 0.1}}), Error);
    CHECK_THROWS_AS(fit_rate({{0.5, 1.0}, {0.5, 0.5}, {0.5, 0.1}}), Error);
  }
}

TEST_CASE("manufactured solutions satisfy the heat equation") {
  const CounterRng rng(4);
  for (const ManufacturedSolution& s : builtin_solutions()) {
    for (int i = 0; i < 100; ++i) {
      const double t = rng.uniform(3 * i), x = rng.uniform(3 * i + 1), y = rng.uniform(3 * i + 2);
      CHECK(std::abs(s.heat_residual(t, x, y)) <= 1e-10 * std::max(1.0, std::abs(s.f(t, x, y))));
    }
  }
  CHECK(find_solution("S1").boundary_compatible);
  CHECK(find_solution("S2").boundary_compatible);
  CHECK_FALSE(find_solution("U1").boundary_compatible);
  CHECK_FALSE(find_solution("U2").boundary_compatible);
  CHECK_THROWS_AS(find_solution("nope"), Error);
  CHECK(std::abs(find_solution("S1").heat_residual(0.3, 0.2, 0.7)) <= 1e-12);
}

TEST_CASE("time_slabs") {
  const double h = std::sqrt(2.0) / 8;
  const int n = time_slabs(1.0, h, 1.0, {{0.25, "time.T1"}, {0.75, "time.T2"}});
  CHECK(n >= 1.0 / h);
  CHECK(n % 4 == 0);
  CHECK(time_slabs(1.0, h, 1.0, {}) == static_cast<int>(std::ceil(1.0 / h)));
  try {
    time_slabs(1.0, h, 1.0, {{1.0 / 3.0 + 1e-4, "time.T1"}});
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    CHECK(std::string(e.what()).find("time.T1") != std::string::npos);
  }
}

namespace {

ExperimentSetup small_stable() {
  ExperimentSetup s;
  s.variant = Variant::Stable;
  s.solution_id = "S2";
  s.levels = {4, 8, 12, 16};
  s.T = 0.5;
  s.T1 = 0.25;
  s.T2 = 0.5;
  s.omega = {0.25, 0.75, 0.25, 0.75};
  s.window_region = Region::unit_square();
  s.norms = {NormKind::L2H1, NormKind::CinT_L2};
  s.seed = 1;
  return s;
}

}  // namespace

TEST_CASE("setup validation") {
  ExperimentSetup s = small_stable();
  CHECK_NOTHROW(s.validate());
  s.levels = {4, 8, 16};
  CHECK_THROWS_AS(s.validate(), Error);
  s = small_stable();
  s.levels = {4, 8, 8, 16};
  CHECK_THROWS_AS(s.validate(), Error);
  s = small_stable();
  s.solution_id = "U1";
  CHECK_THROWS_AS(s.validate(), Error);
  s = small_stable();
  s.levels = {4, 6, 8, 16};
  CHECK_THROWS_AS(s.validate(), Error);  // omega corners miss the n = 6 grid
  s = small_stable();
  s.window_region = {0.25, 0.75, 0.25, 0.75};
  s.norms = {NormKind::H1Hm1};
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("convergence sweep on a small stable problem") {
  const ExperimentSetup s = small_stable();
  const ConvergenceReport r = run_convergence(s, 0.0);
  REQUIRE(r.complete());
  REQUIRE(r.levels.size() == 4);
  for (std::size_t w = 0; w < s.norms.size(); ++w) {
    for (std::size_t i = 1; i < r.levels.size(); ++i) CHECK(r.levels[i].errors[w] < r.levels[i - 1].errors[w]);
    REQUIRE(r.rates[w].has_value());
    CHECK(r.rates[w]->rate > 0.7);
  }
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    CHECK(r.levels[i].n == s.levels[i]);
    CHECK(r.levels[i].h == doctest::Approx(std::sqrt(2.0) / s.levels[i]));
    CHECK(r.levels[i].tau <= r.levels[i].h * (1 + 1e-12));
  }

  SUBCASE("continuity in the data") {
    const ConvergenceReport tiny = run_convergence(s, 1e-12);
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
      for (std::size_t w = 0; w < s.norms.size(); ++w) {
        CHECK(std::abs(tiny.levels[i].errors[w] - r.levels[i].errors[w]) <= 1e-9);
      }
    }
  }
  SUBCASE("perturbation study reproduces the delta = 0 column") {
    const PerturbationStudy p = run_perturbation_study(s, {0.0, 1e-2});
    REQUIRE(p.complete());
    REQUIRE(p.results.size() == 2);
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
      CHECK(p.results[0][i].errors == r.levels[i].errors);
    }
    REQUIRE(p.hstar.size() == 2);
    for (std::size_t w = 0; w < s.norms.size(); ++w) {
      double best = 1e300;
      for (const auto& l : p.results[1]) best = std::min(best, l.errors[w]);
      CHECK(p.hstar[1][w].error == best);
    }
  }
  SUBCASE("CSV structure") {
    const std::string csv = convergence_csv(r, "a = 1\nb = 2");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# a = 1");
    std::getline(in, line);
    CHECK(line == "# b = 2");
    std::getline(in, line);
    CHECK(line == "# status: complete");
    std::getline(in, line);
    CHECK(line == "variant,solution,n,h,tau,delta,norm_kind,window,value");
    int level_rows = 0, rate_rows = 0;
    while (std::getline(in, line)) {
      CHECK(std::count(line.begin(), line.end(), ',') == 8);
      if (line.rfind("stable,S2,rate,", 0) == 0) ++rate_rows;
      else if (line.rfind("stable,S2,", 0) == 0 && std::isdigit(static_cast<unsigned char>(line[10])) &&
               line.find(",L2H1,") != std::string::npos) {
        ++level_rows;
      }
    }
    CHECK(level_rows == 4);
    CHECK(rate_rows == static_cast<int>(s.norms.size() + std::size(kDiagnosticNames)));
    CHECK(convergence_csv(r, "x") == convergence_csv(r, "x"));
  }
  SUBCASE("charts") {
    const auto charts = convergence_charts(r);
    REQUIRE(charts.size() == s.norms.size());
    CHECK(charts[0].first == "L2H1");
    CHECK(charts[0].second.rfind("<svg", 0) == 0);
    CHECK(charts[0].second.find("</svg>") != std::string::npos);
  }
}

TEST_CASE("failed sweeps are marked in the CSV") {
  ConvergenceReport r;
  r.setup = small_stable();
  r.rates.assign(r.setup.norms.size(), std::nullopt);
  r.diagnostic_rates.assign(std::size(kDiagnosticNames), std::nullopt);
  r.failure = Failure{ErrorKind::SolverTolerance, 16, "tolerance not reached\nat level"};
  CHECK_FALSE(r.complete());
  const std::string csv = convergence_csv(r, "");
  CHECK(csv.find("# status: failed at n = 16 (solver tolerance): tolerance not reached at level\n") !=
        std::string::npos);
  CHECK(csv.find("variant,solution,n,h,tau,delta,norm_kind,window,value\n") != std::string::npos);
}

TEST_CASE("write_file_atomic") {
  const auto dir = std::filesystem::temp_directory_path() / "heatda_atomic_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.csv").string();
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == "second\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  write_file_atomic((dir / "nested" / "x.csv").string(), "x");
  CHECK(std::filesystem::exists(dir / "nested" / "x.csv"));
  CHECK_THROWS_AS(write_file_atomic((dir / "out.csv" / "x.csv").string(), "x"), Error);
  std::filesystem::remove_all(dir);
}
