#include "heatda/heatda.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "heatda/config.hpp"
#include "heatda/mesh.hpp"
#include "heatda/verify.hpp"

struct heatda_mesh {
  heatda::TriMesh mesh;
};

struct heatda_config {
  heatda::RunConfig config;
};

struct heatda_report {
  heatda::RunConfig config;
  std::string command;
  std::optional<heatda::ConvergenceReport> convergence;
  std::optional<heatda::PerturbationStudy> perturbation;
  std::string csv;
  std::string csv_path;
  std::vector<std::string> window_labels;
};

namespace {

thread_local std::string last_error;

heatda_status status_of(heatda::ErrorKind kind) {
  using heatda::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidArgument: return HEATDA_ERR_INVALID_ARGUMENT;
    case ErrorKind::Structure: return HEATDA_ERR_MESH_STRUCTURE;
    case ErrorKind::BoundaryViolation: return HEATDA_ERR_BOUNDARY_VIOLATION;
    case ErrorKind::DegenerateMesh: return HEATDA_ERR_DEGENERATE_MESH;
    case ErrorKind::AssemblyInvariant: return HEATDA_ERR_ASSEMBLY_INVARIANT;
    case ErrorKind::SolverSingular: return HEATDA_ERR_SOLVER_SINGULAR;
    case ErrorKind::SolverTolerance: return HEATDA_ERR_SOLVER_TOLERANCE;
    case ErrorKind::Validation: return HEATDA_ERR_VALIDATION;
    case ErrorKind::Io: return HEATDA_ERR_IO;
  }
  return HEATDA_ERR_INTERNAL;
}

template <typename Body>
heatda_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return HEATDA_OK;
  } catch (const heatda::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return HEATDA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return HEATDA_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) heatda::fail(heatda::ErrorKind::InvalidArgument, fmt::format("{} must not be null", what));
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> window_labels(const heatda::RunConfig& config) {
  std::vector<std::string> out;
  for (const auto& w : config.setup().windows()) out.push_back(fmt::format("{} {}", heatda::to_string(w.kind), w.label()));
  return out;
}

std::string echo(const heatda::RunConfig& config, const std::string& command) {
  return fmt::format("command = {}\n{}", command, config.render());
}

const std::vector<heatda::LevelResult>& levels_of(const heatda_report& r, int delta) {
  if (r.convergence) return r.convergence->levels;
  return r.perturbation->results.at(static_cast<std::size_t>(delta));
}

int delta_count(const heatda_report& r) {
  return r.convergence ? 1 : static_cast<int>(r.perturbation->deltas.size());
}

void check_index(int i, int count, const char* what) {
  if (i < 0 || i >= count) {
    heatda::fail(heatda::ErrorKind::InvalidArgument, fmt::format("{} index {} out of range [0, {})", what, i, count));
  }
}

}  // namespace

extern "C" {

const char* heatda_last_error(void) { return last_error.c_str(); }

const char* heatda_status_name(heatda_status status) {
  switch (status) {
    case HEATDA_OK: return "ok";
    case HEATDA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HEATDA_ERR_MESH_STRUCTURE: return "mesh structure";
    case HEATDA_ERR_BOUNDARY_VIOLATION: return "boundary violation";
    case HEATDA_ERR_DEGENERATE_MESH: return "degenerate mesh";
    case HEATDA_ERR_ASSEMBLY_INVARIANT: return "assembly invariant";
    case HEATDA_ERR_SOLVER_SINGULAR: return "solver failure: system singular";
    case HEATDA_ERR_SOLVER_TOLERANCE: return "solver failure: tolerance not reached";
    case HEATDA_ERR_VALIDATION: return "validation";
    case HEATDA_ERR_IO: return "i/o";
    case HEATDA_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* heatda_version(void) { return "1.0.0"; }

void heatda_string_free(char* text) { std::free(text); }

heatda_status heatda_mesh_create(int n, heatda_mesh** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = new heatda_mesh{heatda::TriMesh::structured(n)};
  });
}

void heatda_mesh_destroy(heatda_mesh* mesh) { delete mesh; }

heatda_status heatda_mesh_info(const heatda_mesh* mesh, int* vertices, int* triangles, int* faces, double* h) {
  return guarded([&] {
    need(mesh, "mesh");
    if (vertices) *vertices = mesh->mesh.num_vertices();
    if (triangles) *triangles = mesh->mesh.num_triangles();
    if (faces) *faces = static_cast<int>(mesh->mesh.internal_faces().size());
    if (h) *h = mesh->mesh.h();
  });
}

heatda_status heatda_mesh_dump(const heatda_mesh* mesh, char** text) {
  return guarded([&] {
    need(mesh, "mesh");
    need(text, "text");
    std::ostringstream out;
    heatda::write_mesh_dump(mesh->mesh, out);
    *text = duplicate(out.str());
  });
}

heatda_status heatda_mesh_dump_file(const heatda_mesh* mesh, const char* path) {
  return guarded([&] {
    need(mesh, "mesh");
    need(path, "path");
    std::ostringstream out;
    heatda::write_mesh_dump(mesh->mesh, out);
    heatda::write_file_atomic(path, out.str());
  });
}

heatda_status heatda_config_load(const char* path, heatda_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new heatda_config{heatda::load_config(path)};
  });
}

heatda_status heatda_config_parse(const char* text, const char* source, heatda_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = nullptr;
    *out = new heatda_config{heatda::parse_config(text, source ? source : "<config>")};
  });
}

void heatda_config_destroy(heatda_config* config) { delete config; }

heatda_status heatda_config_render(const heatda_config* config, char** text) {
  return guarded([&] {
    need(config, "config");
    need(text, "text");
    *text = duplicate(config->config.render());
  });
}

heatda_status heatda_converge(const heatda_config* config, heatda_report** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = nullptr;
    const heatda::RunConfig& c = config->config;
    if (c.deltas.size() != 1) {
      heatda::fail(heatda::ErrorKind::Validation,
                   fmt::format("data.delta: converge takes a single amplitude, got {}", c.deltas.size()));
    }
    auto report = std::make_unique<heatda_report>();
    report->config = c;
    report->command = "converge";
    report->convergence = heatda::run_convergence(c.setup(), c.deltas.front());
    report->csv = heatda::convergence_csv(*report->convergence, echo(c, report->command));
    report->csv_path = c.csv_path(report->command);
    report->window_labels = window_labels(c);
    *out = report.release();
  });
}

heatda_status heatda_perturb(const heatda_config* config, heatda_report** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = nullptr;
    const heatda::RunConfig& c = config->config;
    auto report = std::make_unique<heatda_report>();
    report->config = c;
    report->command = "perturb";
    report->perturbation = heatda::run_perturbation_study(c.setup(), c.deltas);
    report->csv = heatda::perturbation_csv(*report->perturbation, echo(c, report->command));
    report->csv_path = c.csv_path(report->command);
    report->window_labels = window_labels(c);
    *out = report.release();
  });
}

void heatda_report_destroy(heatda_report* report) { delete report; }

heatda_status heatda_report_status(const heatda_report* report, const char** message) {
  if (report == nullptr) {
    last_error = "report must not be null";
    return HEATDA_ERR_INVALID_ARGUMENT;
  }
  const auto& failure = report->convergence ? report->convergence->failure : report->perturbation->failure;
  if (message) *message = failure ? failure->message.c_str() : "";
  return failure ? status_of(failure->kind) : HEATDA_OK;
}

heatda_status heatda_report_csv(const heatda_report* report, char** csv) {
  return guarded([&] {
    need(report, "report");
    need(csv, "csv");
    *csv = duplicate(report->csv);
  });
}

heatda_status heatda_report_write(const heatda_report* report) {
  return guarded([&] {
    need(report, "report");
    const heatda::RunConfig& c = report->config;
    std::error_code ec;
    std::filesystem::create_directories(c.directory, ec);
    if (ec) {
      heatda::fail(heatda::ErrorKind::Io,
                   fmt::format("cannot create output directory {}: {}", c.directory, ec.message()));
    }
    heatda::write_file_atomic(report->csv_path, report->csv);
    if (!c.svg) return;
    const auto charts = report->convergence ? heatda::convergence_charts(*report->convergence)
                                            : heatda::perturbation_charts(*report->perturbation);
    for (const auto& [kind, svg] : charts) heatda::write_file_atomic(c.svg_path(report->command, kind), svg);
  });
}

const char* heatda_report_csv_path(const heatda_report* report) {
  return report ? report->csv_path.c_str() : "";
}

heatda_status heatda_report_shape(const heatda_report* report, int* deltas, int* levels, int* windows) {
  return guarded([&] {
    need(report, "report");
    if (deltas) *deltas = delta_count(*report);
    if (levels) *levels = static_cast<int>(levels_of(*report, 0).size());
    if (windows) *windows = static_cast<int>(report->window_labels.size());
  });
}

heatda_status heatda_report_error(const heatda_report* report, int delta, int level, int window, double* value) {
  return guarded([&] {
    need(report, "report");
    need(value, "value");
    check_index(delta, delta_count(*report), "delta");
    const auto& levels = levels_of(*report, delta);
    check_index(level, static_cast<int>(levels.size()), "level");
    check_index(window, static_cast<int>(levels[level].errors.size()), "window");
    *value = levels[level].errors[window];
  });
}

const char* heatda_report_window_label(const heatda_report* report, int window) {
  if (report == nullptr || window < 0 || window >= static_cast<int>(report->window_labels.size())) return "";
  return report->window_labels[window].c_str();
}

int heatda_report_level_n(const heatda_report* report, int level) {
  if (report == nullptr) return 0;
  const auto& levels = levels_of(*report, 0);
  if (level < 0 || level >= static_cast<int>(levels.size())) return 0;
  return levels[level].n;
}

heatda_status heatda_report_rate(const heatda_report* report, int delta, int window, double* rate) {
  return guarded([&] {
    need(report, "report");
    need(rate, "rate");
    check_index(delta, delta_count(*report), "delta");
    const auto& levels = levels_of(*report, delta);
    const int windows = static_cast<int>(report->window_labels.size());
    check_index(window, windows, "window");
    std::vector<std::pair<double, double>> points;
    for (const auto& l : levels) points.emplace_back(l.h, l.errors[window]);
    *rate = heatda::fit_rate(points).rate;
  });
}

heatda_status heatda_verify(heatda_verify_level level, uint64_t seed, unsigned faults, heatda_check_callback on_check,
                            void* user, int* failed) {
  return guarded([&] {
    if (level != HEATDA_VERIFY_QUICK && level != HEATDA_VERIFY_FULL) {
      heatda::fail(heatda::ErrorKind::InvalidArgument, fmt::format("unknown verify level {}", static_cast<int>(level)));
    }
    heatda::verify::Options options;
    options.level = level == HEATDA_VERIFY_FULL ? heatda::verify::Level::Full : heatda::verify::Level::Quick;
    options.seed = seed;
    options.corrupt_constraint_transpose = (faults & HEATDA_FAULT_CORRUPT_CONSTRAINT_TRANSPOSE) != 0;
    int count = 0;
    heatda::verify::run_checks(options, [&](const heatda::verify::CheckResult& r) {
      if (!r.passed) ++count;
      if (on_check) on_check(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), r.seconds, user);
    });
    if (failed) *failed = count;
  });
}

}  // extern "C"
