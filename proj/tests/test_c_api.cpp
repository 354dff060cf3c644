#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "heatda/heatda.h"

namespace {

const char* kSmallStable =
    "[problem]\n"
    "variant = StableModel\n"
    "solution = S2\n"
    "boundary_condition = dirichlet\n"
    "[discretization]\n"
    "levels = 4, 8, 12, 16\n"
    "[output]\n"
    "norms = L2H1, CinT_L2\n";

struct Config {
  heatda_config* ptr = nullptr;
  ~Config() { heatda_config_destroy(ptr); }
};

struct Report {
  heatda_report* ptr = nullptr;
  ~Report() { heatda_report_destroy(ptr); }
};

std::string take(char* text) {
  std::string s = text ? text : "";
  heatda_string_free(text);
  return s;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(heatda_status_name(HEATDA_OK)) == "ok");
  CHECK(std::strlen(heatda_status_name(HEATDA_ERR_SOLVER_SINGULAR)) > 0);
  CHECK(std::strlen(heatda_version()) > 0);
}

TEST_CASE("meshes") {
  heatda_mesh* mesh = nullptr;
  REQUIRE(heatda_mesh_create(4, &mesh) == HEATDA_OK);
  CHECK(std::string(heatda_last_error()).empty());
  int nv = 0, nt = 0, nf = 0;
  double h = 0.0;
  REQUIRE(heatda_mesh_info(mesh, &nv, &nt, &nf, &h) == HEATDA_OK);
  CHECK(nv == 25);
  CHECK(nt == 32);
  CHECK(nf == 3 * 16 - 2 * 4);
  CHECK(h == doctest::Approx(0.3535533905932738));
  char* text = nullptr;
  REQUIRE(heatda_mesh_dump(mesh, &text) == HEATDA_OK);
  CHECK(take(text).rfind("25 32 40\n", 0) == 0);
  heatda_mesh_destroy(mesh);

  heatda_mesh* bad = nullptr;
  CHECK(heatda_mesh_create(1, &bad) == HEATDA_ERR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  CHECK(std::strlen(heatda_last_error()) > 0);
  CHECK(heatda_mesh_create(4, nullptr) == HEATDA_ERR_INVALID_ARGUMENT);
}

TEST_CASE("configs") {
  Config c;
  CHECK(heatda_config_parse("[time]\nT1 = 0.3333\n", "x.ini", &c.ptr) == HEATDA_ERR_VALIDATION);
  CHECK(std::string(heatda_last_error()).find("x.ini:2: time.T1") != std::string::npos);
  CHECK(heatda_config_load("/nonexistent.ini", &c.ptr) == HEATDA_ERR_IO);
  REQUIRE(heatda_config_parse(kSmallStable, nullptr, &c.ptr) == HEATDA_OK);
  char* text = nullptr;
  REQUIRE(heatda_config_render(c.ptr, &text) == HEATDA_OK);
  const std::string rendered = take(text);
  CHECK(rendered.find("levels = 4, 8, 12, 16") != std::string::npos);
}

TEST_CASE("converge through the C interface") {
  Config c;
  REQUIRE(heatda_config_parse(kSmallStable, nullptr, &c.ptr) == HEATDA_OK);
  Report r;
  REQUIRE(heatda_converge(c.ptr, &r.ptr) == HEATDA_OK);
  const char* message = nullptr;
  CHECK(heatda_report_status(r.ptr, &message) == HEATDA_OK);
  int deltas = 0, levels = 0, windows = 0;
  REQUIRE(heatda_report_shape(r.ptr, &deltas, &levels, &windows) == HEATDA_OK);
  CHECK(deltas == 1);
  CHECK(levels == 4);
  CHECK(windows == 2);
  CHECK(heatda_report_level_n(r.ptr, 3) == 16);
  CHECK(heatda_report_level_n(r.ptr, 4) == 0);
  CHECK(std::string(heatda_report_window_label(r.ptr, 0)).rfind("L2H1", 0) == 0);
  CHECK(std::string(heatda_report_window_label(r.ptr, 5)).empty());
  double previous = 1e300;
  for (int l = 0; l < levels; ++l) {
    double e = 0.0;
    REQUIRE(heatda_report_error(r.ptr, 0, l, 0, &e) == HEATDA_OK);
    CHECK(e < previous);
    previous = e;
  }
  double e = 0.0;
  CHECK(heatda_report_error(r.ptr, 0, 9, 0, &e) == HEATDA_ERR_INVALID_ARGUMENT);
  double rate = 0.0;
  REQUIRE(heatda_report_rate(r.ptr, 0, 0, &rate) == HEATDA_OK);
  CHECK(rate > 0.7);
  char* csv = nullptr;
  REQUIRE(heatda_report_csv(r.ptr, &csv) == HEATDA_OK);
  const std::string text = take(csv);
  CHECK(text.rfind("# command = converge\n", 0) == 0);
  CHECK(std::string(heatda_report_csv_path(r.ptr)) == "results/report_converge.csv");
}

TEST_CASE("converge rejects delta lists") {
  Config c;
  const std::string text = std::string(kSmallStable) + "[data]\ndelta = 0, 1e-3\n";
  REQUIRE(heatda_config_parse(text.c_str(), nullptr, &c.ptr) == HEATDA_OK);
  Report r;
  CHECK(heatda_converge(c.ptr, &r.ptr) == HEATDA_ERR_VALIDATION);
  CHECK(r.ptr == nullptr);
  CHECK(std::string(heatda_last_error()).find("data.delta") != std::string::npos);
  Report p;
  REQUIRE(heatda_perturb(c.ptr, &p.ptr) == HEATDA_OK);
  int deltas = 0, levels = 0, windows = 0;
  REQUIRE(heatda_report_shape(p.ptr, &deltas, &levels, &windows) == HEATDA_OK);
  CHECK(deltas * levels == 8);
}

TEST_CASE("writing reports") {
  const auto dir = std::filesystem::temp_directory_path() / "heatda_c_api_test";
  std::filesystem::remove_all(dir);
  Config c;
  const std::string text = std::string(kSmallStable) + "directory = " + dir.string() + "\nname = r\nsvg = true\n";
  REQUIRE(heatda_config_parse(text.c_str(), nullptr, &c.ptr) == HEATDA_OK);
  Report r;
  REQUIRE(heatda_converge(c.ptr, &r.ptr) == HEATDA_OK);
  REQUIRE(heatda_report_write(r.ptr) == HEATDA_OK);
  CHECK(std::filesystem::exists(dir / "r_converge.csv"));
  CHECK(std::filesystem::exists(dir / "r_converge_L2H1.svg"));
  std::filesystem::remove_all(dir);
}

namespace {

struct Tally {
  int calls = 0;
  int failures = 0;
};

void count_check(const char*, int passed, const char*, double, void* user) {
  auto* t = static_cast<Tally*>(user);
  ++t->calls;
  if (!passed) ++t->failures;
}

}  // namespace

TEST_CASE("verification through the C interface") {
  Tally tally;
  int failed = -1;
  REQUIRE(heatda_verify(HEATDA_VERIFY_QUICK, 1, 0u, count_check, &tally, &failed) == HEATDA_OK);
  CHECK(failed == 0);
  CHECK(tally.calls > 0);
  Tally broken;
  REQUIRE(heatda_verify(HEATDA_VERIFY_QUICK, 1, HEATDA_FAULT_CORRUPT_CONSTRAINT_TRANSPOSE, count_check, &broken,
                        &failed) == HEATDA_OK);
  CHECK(failed > 0);
  CHECK(failed == broken.failures);
}
