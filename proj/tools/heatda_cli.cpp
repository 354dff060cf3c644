// Command-line front end over the C API.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "heatda/heatda.h"

namespace {

enum Exit { kOk = 0, kFailed = 1, kInvalid = 2, kSolver = 3, kOutput = 4 };

int report_error(heatda_status status, const char* context) {
  std::fprintf(stderr, "heatda: %s: %s\n", context, heatda_last_error());
  switch (status) {
    case HEATDA_ERR_VALIDATION:
    case HEATDA_ERR_INVALID_ARGUMENT:
    case HEATDA_ERR_BOUNDARY_VIOLATION:
      return kInvalid;
    case HEATDA_ERR_IO:
      return kOutput;
    case HEATDA_ERR_SOLVER_SINGULAR:
    case HEATDA_ERR_SOLVER_TOLERANCE:
    case HEATDA_ERR_ASSEMBLY_INVARIANT:
      return kSolver;
    default:
      return kFailed;
  }
}

void print_summary(const heatda_report* report) {
  int deltas = 0, levels = 0, windows = 0;
  if (heatda_report_shape(report, &deltas, &levels, &windows) != HEATDA_OK) return;
  for (int w = 0; w < windows; ++w) {
    std::printf("%s\n", heatda_report_window_label(report, w));
    for (int d = 0; d < deltas; ++d) {
      if (deltas > 1) std::printf("  delta #%d\n", d);
      for (int l = 0; l < levels; ++l) {
        double e = 0.0;
        if (heatda_report_error(report, d, l, w, &e) == HEATDA_OK) {
          std::printf("  n = %-4d %.6e\n", heatda_report_level_n(report, l), e);
        }
      }
      double rate = 0.0;
      if (heatda_report_rate(report, d, w, &rate) == HEATDA_OK) std::printf("  rate     %.4f\n", rate);
    }
  }
}

using Runner = heatda_status (*)(const heatda_config*, heatda_report**);

int run_study(const std::string& path, Runner runner) {
  heatda_config* config = nullptr;
  heatda_status status = heatda_config_load(path.c_str(), &config);
  if (status != HEATDA_OK) {
    std::fprintf(stderr, "heatda: %s\n", heatda_last_error());
    return kInvalid;
  }
  heatda_report* report = nullptr;
  status = runner(config, &report);
  heatda_config_destroy(config);
  if (status != HEATDA_OK) return report_error(status, path.c_str());

  int code = kOk;
  const char* message = nullptr;
  const heatda_status outcome = heatda_report_status(report, &message);
  print_summary(report);
  if (heatda_report_write(report) != HEATDA_OK) {
    std::fprintf(stderr, "heatda: cannot write report: %s\n", heatda_last_error());
    code = kOutput;
  } else {
    std::printf("wrote %s\n", heatda_report_csv_path(report));
  }
  if (outcome != HEATDA_OK) {
    std::fprintf(stderr, "heatda: %s: %s (partial report kept)\n", heatda_status_name(outcome), message);
    code = kSolver;
  }
  heatda_report_destroy(report);
  return code;
}

void print_check(const char* name, int passed, const char* detail, double seconds, void*) {
  std::printf("%-4s  %-42s %8.2fs  %s\n", passed ? "PASS" : "FAIL", name, seconds, detail);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilized space-time finite elements for heat-equation data assimilation"};
  app.require_subcommand(1);

  std::string config_path;
  auto* converge = app.add_subcommand("converge", "Run a convergence sweep and write the report CSV");
  converge->add_option("config", config_path, "Configuration file")->required();
  auto* perturb = app.add_subcommand("perturb", "Run a perturbation study (levels x delta errors)");
  perturb->add_option("config", config_path, "Configuration file")->required();

  std::string level = "quick";
  std::uint64_t seed = 1;
  std::string fault;
  auto* verify = app.add_subcommand("verify", "Run the invariant verification suite");
  verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--seed", seed, "Seed for random test fields");
  verify->add_option("--fault", fault, "Inject a known defect (test fixture)")
      ->check(CLI::IsMember({"corrupt-transpose"}))
      ->group("");

  int n = 0;
  std::string dump_path;
  auto* dump = app.add_subcommand("mesh-dump", "Write the structured mesh with n subdivisions as text");
  dump->add_option("n", n, "Subdivisions per side")->required();
  dump->add_option("path", dump_path, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  if (*converge) return run_study(config_path, heatda_converge);
  if (*perturb) return run_study(config_path, heatda_perturb);
  if (*verify) {
    int failed = 0;
    const unsigned faults = fault == "corrupt-transpose" ? HEATDA_FAULT_CORRUPT_CONSTRAINT_TRANSPOSE : 0u;
    const heatda_status status = heatda_verify(level == "full" ? HEATDA_VERIFY_FULL : HEATDA_VERIFY_QUICK, seed,
                                               faults, print_check, nullptr, &failed);
    if (status != HEATDA_OK) return report_error(status, "verify");
    std::printf("%s: %d check(s) failed\n", failed == 0 ? "ok" : "FAILED", failed);
    return failed == 0 ? kOk : kFailed;
  }
  if (*dump) {
    heatda_mesh* mesh = nullptr;
    heatda_status status = heatda_mesh_create(n, &mesh);
    if (status != HEATDA_OK) return report_error(status, "mesh-dump");
    status = heatda_mesh_dump_file(mesh, dump_path.c_str());
    heatda_mesh_destroy(mesh);
    if (status != HEATDA_OK) return report_error(status, "mesh-dump");
    return kOk;
  }
  return kInvalid;
}
