#include <doctest.h>

#include <algorithm>

#include "heatda/verify.hpp"

using namespace heatda;

TEST_CASE("quick verification passes") {
  std::vector<std::string> seen;
  const auto results = verify::run_checks({}, [&](const verify::CheckResult& r) { seen.push_back(r.name); });
  REQUIRE_FALSE(results.empty());
  CHECK(seen.size() == results.size());
  for (const auto& r : results) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("a corrupted constraint transpose is caught") {
  verify::Options options;
  options.corrupt_constraint_transpose = true;
  const auto results = verify::run_checks(options);
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; });
  CHECK(failed > 0);
  for (const auto& r : results) {
    if (!r.passed) CHECK(r.name.find("coercivity") != std::string::npos);
  }
}

TEST_CASE("measurements") {
  CHECK(verify::coercivity_identity_error(Variant::Unstable, 4, 4, 10, 3) <= 1e-12);
  CHECK(verify::coercivity_identity_error(Variant::Unstable, 4, 4, 10, 3, true) > 1e-3);
  CHECK(verify::ibp_identity_error(4, 10, 3) <= 1e-12);
  CHECK(verify::max_asymmetry(Variant::Stable, 4, 4) <= 1e-13);
  const auto zero = verify::zero_data_solve(Variant::Unstable, 8, 4, SolveMethod::Direct);
  CHECK(zero.max_abs == 0.0);
  CHECK(zero.residual == 0.0);
}

TEST_CASE("level names") {
  CHECK(verify::parse_level("quick") == verify::Level::Quick);
  CHECK(verify::parse_level("full") == verify::Level::Full);
  CHECK(std::string(verify::to_string(verify::Level::Full)) == "full");
  CHECK_THROWS(verify::parse_level("medium"));
}
