#include "heatda/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include <fmt/format.h>

namespace heatda {

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  require(points.size() >= 3, ErrorKind::InvalidArgument, "rate fit needs at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [h, e] : points) {
    require(h > 0.0 && std::isfinite(h), ErrorKind::InvalidArgument, fmt::format("rate fit: h = {} is not positive", h));
    require(e > 0.0 && std::isfinite(e), ErrorKind::InvalidArgument,
            fmt::format("rate fit: error = {} is not positive", e));
    sx += std::log(h);
    sy += std::log(e);
  }
  const double m = static_cast<double>(points.size());
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [h, e] : points) {
    sxx += (std::log(h) - mx) * (std::log(h) - mx);
    sxy += (std::log(h) - mx) * (std::log(e) - my);
  }
  require(sxx > 0.0, ErrorKind::InvalidArgument, "rate fit needs at least two distinct h");
  RateFit fit;
  fit.rate = sxy / sxx;
  fit.intercept = my - fit.rate * mx;
  double ss = 0.0;
  for (const auto& [h, e] : points) {
    const double d = std::log(e) - (fit.intercept + fit.rate * std::log(h));
    ss += d * d;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

namespace {

bool lands_on_grid(double t, double T, int slabs) {
  const double k = t * slabs / T;
  return std::abs(k - std::round(k)) <= 1e-9 * std::max(1.0, k);
}

}  // namespace

int time_slabs(double T, double h, double ct, const std::vector<std::pair<double, std::string>>& required) {
  require(T > 0.0 && h > 0.0 && ct > 0.0, ErrorKind::InvalidArgument, "time_slabs needs positive T, h and ct");
  const int first = std::max(1, static_cast<int>(std::ceil(T / (ct * h) - 1e-9)));
  const int last = 4 * first + 8;
  for (int slabs = first; slabs <= last; ++slabs) {
    bool ok = true;
    for (const auto& [t, field] : required) ok = ok && lands_on_grid(t, T, slabs);
    if (ok) return slabs;
  }
  for (const auto& [t, field] : required) {
    bool any = false;
    for (int slabs = first; slabs <= last && !any; ++slabs) any = lands_on_grid(t, T, slabs);
    if (!any) {
      fail(ErrorKind::Validation, fmt::format("{}: {:g} is not on the time grid for any tau <= {:g} (T = {:g})", field,
                                              t, ct * h, T));
    }
  }
  fail(ErrorKind::Validation,
       fmt::format("time.T2: T1 and T2 never land on a common time grid for tau <= {:g} (T = {:g})", ct * h, T));
}

std::vector<NormWindow> ExperimentSetup::windows() const {
  std::vector<NormWindow> out;
  for (NormKind kind : norms) out.push_back({T1, T2, window_region, kind});
  return out;
}

namespace {

std::vector<std::pair<double, std::string>> required_times(const ExperimentSetup& s) {
  return {{s.T1, "time.T1"}, {s.T2, "time.T2"}};
}

bool inside(const Region& inner, const Region& outer) {
  return inner.x0 >= outer.x0 && inner.x1 <= outer.x1 && inner.y0 >= outer.y0 && inner.y1 <= outer.y1;
}

}  // namespace

void ExperimentSetup::validate() const {
  auto check = [](bool ok, const std::string& message) { require(ok, ErrorKind::Validation, message); };
  check(levels.size() >= 4, fmt::format("discretization.levels: need at least 4 mesh levels, got {}", levels.size()));
  for (std::size_t i = 0; i < levels.size(); ++i) {
    check(levels[i] >= 2, fmt::format("discretization.levels: n = {} is below 2", levels[i]));
    check(i == 0 || levels[i] > levels[i - 1], "discretization.levels: must be strictly increasing");
  }
  check(ct > 0.0 && std::isfinite(ct), "discretization.ct: must be positive");
  check(T > 0.0 && std::isfinite(T), "time.T: must be positive");
  check(T1 >= 0.0 && T1 < T2, "time.T1: need 0 <= T1 < T2");
  check(T2 <= T, "time.T2: need T2 <= T");
  check(!norms.empty(), "output.norms: select at least one norm");

  const Region square = Region::unit_square();
  check(!omega.empty() && inside(omega, square), "geometry.omega: must be a non-empty box inside the unit square");
  check(!window_region.empty() && inside(window_region, square),
        "geometry.B: must be a non-empty box inside the unit square");

  const ManufacturedSolution& solution = [&]() -> const ManufacturedSolution& {
    try {
      return find_solution(solution_id);
    } catch (const Error& e) {
      fail(ErrorKind::Validation, fmt::format("problem.solution: {}", e.what()));
    }
  }();
  if (variant == Variant::Stable) {
    check(solution.boundary_compatible,
          fmt::format("problem.solution: StableModel needs a boundary-compatible solution, '{}' is not", solution_id));
  } else {
    check(inside(omega, window_region), "geometry.omega: UnstableModel needs omega inside B");
    check(window_region.x0 > 0.0 && window_region.x1 < 1.0 && window_region.y0 > 0.0 && window_region.y1 < 1.0,
          "geometry.B: UnstableModel needs the closure of B inside the open unit square");
  }
  for (NormKind kind : norms) {
    if (kind == NormKind::H1Hm1) {
      check(window_region.is_unit_square(), "output.norms: H1Hm1 is only defined with geometry.B = the unit square");
    }
  }

  for (int n : levels) {
    check(omega.aligned_with(n), fmt::format("geometry.omega: corners are not grid lines at n = {}", n));
    check(window_region.aligned_with(n), fmt::format("geometry.B: corners are not grid lines at n = {}", n));
    time_slabs(T, std::sqrt(2.0) / n, ct, required_times(*this));
  }
}

int worker_threads() {
  if (const char* env = std::getenv("HEATDA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

SpaceTimeField reference_projection(const ExperimentSetup& s, const ManufacturedSolution& solution,
                                    const TriMesh& mesh, const TimeGrid& grid, const StabilizerPair& pair,
                                    const DirichletLaplacian& laplacian) {
  if (s.variant == Variant::Unstable) {
    return nodal_interpolate(solution.u, mesh, grid, SpaceKind::Full, TimeBasis::P1Continuous);
  }
  SpaceTimeField out(TimeBasis::P1Continuous, pair.primal_dofs(), grid);
  for (int k = 0; k <= grid.slabs(); ++k) {
    const double t = grid.node(k);
    const SpatialFunction f{[&](double x, double y) { return solution.u(t, x, y); },
                            [&](double x, double y) { return Point{solution.u_x(t, x, y), solution.u_y(t, x, y)}; }};
    out.coefficients().row(k) = ritz_project(f, mesh, laplacian).transpose();
  }
  return out;
}

// One mesh level: assemble and factor once, solve for every delta.
std::vector<LevelResult> run_level(const ExperimentSetup& s, int n, const std::vector<double>& deltas) {
  const TriMesh mesh = TriMesh::structured(n);
  const TimeGrid grid(s.T, time_slabs(s.T, mesh.h(), s.ct, required_times(s)));
  const SpatialForms forms = SpatialForms::build(mesh, s.omega);
  const StabilizerPair pair = build_stabilizers(s.variant, mesh, grid, forms);
  const ManufacturedSolution& solution = find_solution(s.solution_id);
  DataSpec data{s.solution_id, 0.0, s.seed, s.target};
  const SaddleSystem system = assemble_system(mesh, grid, pair, s.omega, solution, data);
  const SaddleSolver solver(system, s.method);

  const ExactField exact = solution.exact();
  const DirichletLaplacian laplacian(mesh);
  const SpaceTimeField reference = reference_projection(s, solution, mesh, grid, pair, laplacian);
  const std::vector<NormWindow> windows = s.windows();
  const NormWindow omega_window{0.0, s.T, s.omega, NormKind::L2L2};

  std::vector<LevelResult> out;
  for (double delta : deltas) {
    data.delta = delta;
    const Eigen::VectorXd rhs = delta == 0.0 ? system.rhs : assemble_rhs(mesh, system, s.omega, solution, data);
    const SaddleSolution sol = solver.solve(rhs);

    LevelResult r;
    r.n = n;
    r.h = mesh.h();
    r.tau = grid.tau();
    r.slabs = grid.slabs();
    r.delta = delta;
    r.solve = sol.report;
    const ErrorSource error{&sol.primal, &exact};
    for (const NormWindow& w : windows) r.errors.push_back(error_norm(error, w, mesh, grid, &laplacian));

    SpaceTimeField diff = sol.primal;
    diff.flat() -= reference.flat();
    Diagnostics& d = r.diagnostics;
    d.primal_seminorm = pair.primal_seminorm(diff);
    d.omega_norm = std::sqrt(std::max(0.0, omega_form(diff, diff, forms)));
    d.dual_norm = pair.dual_norm(sol.dual);
    d.triple = d.primal_seminorm + d.omega_norm + d.dual_norm;
    d.omega_error = error_norm(error, omega_window, mesh, grid, &laplacian);

    if (delta > 0.0) {
      const Perturbation noise = apply_perturbation(data, mesh, grid, s.omega);
      r.noise_observation_l2 = noise.observation_l2;
      r.noise_source_l2 = noise.source_l2;
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct LevelOutcome {
  std::vector<LevelResult> results;
  std::optional<Failure> failure;
  std::exception_ptr unexpected;
};

// Runs every level on a small pool and returns outcomes in level order.
std::vector<LevelOutcome> run_levels(const ExperimentSetup& s, const std::vector<double>& deltas) {
  std::vector<LevelOutcome> outcomes(s.levels.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{s.levels.size()};
  auto worker = [&]() {
    for (std::size_t i = next++; i < s.levels.size(); i = next++) {
      if (i > first_failure) continue;
      try {
        outcomes[i].results = run_level(s, s.levels[i], deltas);
      } catch (const Error& e) {
        outcomes[i].failure = Failure{e.kind(), s.levels[i], e.what()};
        std::size_t seen = first_failure;
        while (i < seen && !first_failure.compare_exchange_weak(seen, i)) {
        }
      } catch (...) {
        outcomes[i].unexpected = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(worker_threads(), static_cast<int>(s.levels.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& o : outcomes) {
    if (o.failure) break;
    if (o.unexpected) std::rethrow_exception(o.unexpected);
  }
  return outcomes;
}

std::optional<RateFit> try_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) return std::nullopt;
  try {
    return fit_rate(points);
  } catch (const Error&) {
    return std::nullopt;
  }
}

double diagnostic_value(const Diagnostics& d, std::size_t i) {
  switch (i) {
    case 0: return d.primal_seminorm;
    case 1: return d.omega_norm;
    case 2: return d.dual_norm;
    case 3: return d.triple;
    default: return d.omega_error;
  }
}

constexpr std::size_t kDiagnosticCount = std::size(kDiagnosticNames);

}  // namespace

ConvergenceReport run_convergence(const ExperimentSetup& setup, double delta) {
  setup.validate();
  require(delta >= 0.0 && std::isfinite(delta), ErrorKind::Validation, "data.delta: must be non-negative");
  ConvergenceReport report;
  report.setup = setup;
  report.delta = delta;
  for (auto& outcome : run_levels(setup, {delta})) {
    if (outcome.failure) {
      report.failure = outcome.failure;
      break;
    }
    report.levels.push_back(std::move(outcome.results.front()));
  }
  const std::size_t nw = setup.norms.size();
  for (std::size_t w = 0; w < nw; ++w) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& l : report.levels) pts.emplace_back(l.h, l.errors[w]);
    report.rates.push_back(try_fit(pts));
  }
  for (std::size_t i = 0; i < kDiagnosticCount; ++i) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& l : report.levels) pts.emplace_back(l.h, diagnostic_value(l.diagnostics, i));
    report.diagnostic_rates.push_back(try_fit(pts));
  }
  return report;
}

PerturbationStudy run_perturbation_study(const ExperimentSetup& setup, const std::vector<double>& deltas) {
  setup.validate();
  require(!deltas.empty(), ErrorKind::Validation, "data.delta: list is empty");
  for (double d : deltas) {
    require(d >= 0.0 && std::isfinite(d), ErrorKind::Validation, "data.delta: amplitudes must be non-negative");
  }
  PerturbationStudy study;
  study.setup = setup;
  study.deltas = deltas;
  study.results.assign(deltas.size(), {});
  for (auto& outcome : run_levels(setup, deltas)) {
    if (outcome.failure) {
      study.failure = outcome.failure;
      break;
    }
    for (std::size_t d = 0; d < deltas.size(); ++d) study.results[d].push_back(std::move(outcome.results[d]));
  }
  for (const auto& column : study.results) {
    std::vector<Stagnation> best(setup.norms.size());
    for (std::size_t w = 0; w < setup.norms.size(); ++w) {
      best[w].error = std::numeric_limits<double>::infinity();
      for (const auto& l : column) {
        if (l.errors[w] < best[w].error) best[w] = {l.n, l.h, l.errors[w]};
      }
    }
    study.hstar.push_back(std::move(best));
  }
  return study;
}

// ---------------------------------------------------------------------------
// Reports.

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

void append_echo(std::string& out, std::string_view echo) {
  std::size_t start = 0;
  while (start < echo.size()) {
    std::size_t end = echo.find('\n', start);
    if (end == std::string_view::npos) end = echo.size();
    out += "# ";
    out += echo.substr(start, end - start);
    out += '\n';
    start = end + 1;
  }
}

struct RowWriter {
  std::string& out;
  std::string prefix;

  void row(const std::string& n, const std::string& h, const std::string& tau, double delta, std::string_view kind,
           std::string_view window, double value) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", prefix, n, h, tau, num(delta), kind, window, num(value));
  }
};

void level_rows(RowWriter& w, const ExperimentSetup& s, const LevelResult& l) {
  const std::vector<NormWindow> windows = s.windows();
  const std::string n = std::to_string(l.n), h = num(l.h), tau = num(l.tau);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    w.row(n, h, tau, l.delta, to_string(windows[i].kind), windows[i].label(), l.errors[i]);
  }
  const std::string omega_label = NormWindow{0.0, s.T, s.omega, NormKind::L2L2}.label();
  for (std::size_t i = 0; i < kDiagnosticCount; ++i) {
    w.row(n, h, tau, l.delta, kDiagnosticNames[i], i + 1 == kDiagnosticCount ? omega_label : "pair",
          diagnostic_value(l.diagnostics, i));
  }
}

void rate_rows(RowWriter& w, double delta, std::string_view kind, std::string_view window,
               const std::optional<RateFit>& fit) {
  if (!fit) return;
  w.row("rate", "", "", delta, kind, window, fit->rate);
  w.row("fit_residual", "", "", delta, kind, window, fit->residual);
}

const char* kHeader = "variant,solution,n,h,tau,delta,norm_kind,window,value\n";

std::string status_line(const std::optional<Failure>& failure) {
  if (!failure) return "# status: complete\n";
  std::string msg = failure->message;
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return fmt::format("# status: failed at n = {} ({}): {}\n", failure->n, to_string(failure->kind), msg);
}

}  // namespace

std::string convergence_csv(const ConvergenceReport& report, std::string_view echo) {
  const ExperimentSetup& s = report.setup;
  std::string out;
  append_echo(out, echo);
  out += status_line(report.failure);
  out += kHeader;
  RowWriter w{out, fmt::format("{},{}", to_string(s.variant), s.solution_id)};
  for (const auto& l : report.levels) level_rows(w, s, l);
  const std::vector<NormWindow> windows = s.windows();
  for (std::size_t i = 0; i < windows.size(); ++i) {
    rate_rows(w, report.delta, to_string(windows[i].kind), windows[i].label(), report.rates[i]);
  }
  const std::string omega_label = NormWindow{0.0, s.T, s.omega, NormKind::L2L2}.label();
  for (std::size_t i = 0; i < kDiagnosticCount; ++i) {
    rate_rows(w, report.delta, kDiagnosticNames[i], i + 1 == kDiagnosticCount ? omega_label : "pair",
              report.diagnostic_rates[i]);
  }
  return out;
}

std::string perturbation_csv(const PerturbationStudy& study, std::string_view echo) {
  const ExperimentSetup& s = study.setup;
  std::string out;
  append_echo(out, echo);
  out += status_line(study.failure);
  out += kHeader;
  RowWriter w{out, fmt::format("{},{}", to_string(s.variant), s.solution_id)};
  const std::vector<NormWindow> windows = s.windows();
  for (std::size_t d = 0; d < study.deltas.size(); ++d) {
    for (const auto& l : study.results[d]) {
      for (std::size_t i = 0; i < windows.size(); ++i) {
        w.row(std::to_string(l.n), num(l.h), num(l.tau), l.delta, to_string(windows[i].kind), windows[i].label(),
              l.errors[i]);
      }
    }
  }
  for (std::size_t d = 0; d < study.deltas.size(); ++d) {
    if (study.deltas[d] <= 0.0 || study.results[d].empty()) continue;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const Stagnation& st = study.hstar[d][i];
      const auto& level = *std::find_if(study.results[d].begin(), study.results[d].end(),
                                        [&](const LevelResult& l) { return l.n == st.n; });
      w.row("hstar", num(st.h), num(level.tau), study.deltas[d], to_string(windows[i].kind), windows[i].label(),
            st.error);
    }
  }
  return out;
}

std::string loglog_svg(const std::string& title, const std::vector<ChartSeries>& series) {
  constexpr double width = 640, height = 480, left = 80, right = 170, top = 40, bottom = 60;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (x <= 0.0 || y <= 0.0) continue;
      xmin = std::min(xmin, std::log10(x));
      xmax = std::max(xmax, std::log10(x));
      ymin = std::min(ymin, std::log10(y));
      ymax = std::max(ymax, std::log10(y));
    }
  }
  if (!(xmin <= xmax)) xmin = -2, xmax = 0, ymin = -2, ymax = 0;
  xmin = std::floor(xmin), xmax = std::max(std::ceil(xmax), xmin + 1);
  ymin = std::floor(ymin), ymax = std::max(std::ceil(ymax), ymin + 1);
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * ph; };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" font-size=\"14\">{3}</text>\n",
      width, height, left, title);
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left, top,
                     pw, ph);
  for (double e = xmin; e <= xmax + 1e-9; e += 1.0) {
    out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1}\" x2=\"{0:.1f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n", px(e), top,
                       top + ph);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">1e{:g}</text>\n", px(e), top + ph + 18, e);
  }
  for (double e = ymin; e <= ymax + 1e-9; e += 1.0) {
    out += fmt::format("<line x1=\"{1}\" y1=\"{0:.1f}\" x2=\"{2}\" y2=\"{0:.1f}\" stroke=\"#ddd\"/>\n", py(e), left,
                       left + pw);
    out += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">1e{:g}</text>\n", left - 6, py(e) + 4, e);
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">h</text>\n", left + pw / 2, height - 16);
  out += fmt::format("<text x=\"18\" y=\"{:.1f}\" transform=\"rotate(-90 18 {:.1f})\" text-anchor=\"middle\">error</text>\n",
                     top + ph / 2, top + ph / 2);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = colors[i % std::size(colors)];
    std::string pts;
    for (const auto& [x, y] : series[i].points) {
      if (x <= 0.0 || y <= 0.0) continue;
      pts += fmt::format("{:.1f},{:.1f} ", px(std::log10(x)), py(std::log10(y)));
      out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n", px(std::log10(x)),
                         py(std::log10(y)), color);
    }
    out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", pts, color);
    const double ly = top + 10 + 18.0 * static_cast<double>(i);
    out += fmt::format("<line x1=\"{0}\" y1=\"{1:.1f}\" x2=\"{2}\" y2=\"{1:.1f}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                       left + pw + 10, ly, left + pw + 30, color);
    out += fmt::format("<text x=\"{}\" y=\"{:.1f}\">{}</text>\n", left + pw + 36, ly + 4, series[i].name);
  }
  out += "</svg>\n";
  return out;
}

std::vector<std::pair<std::string, std::string>> convergence_charts(const ConvergenceReport& report) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto windows = report.setup.windows();
  for (std::size_t i = 0; i < windows.size(); ++i) {
    ChartSeries series{fmt::format("delta={:g}", report.delta), {}};
    for (const auto& l : report.levels) series.points.emplace_back(l.h, l.errors[i]);
    const std::string kind = to_string(windows[i].kind);
    out.emplace_back(kind, loglog_svg(fmt::format("{} {} {} on {}", to_string(report.setup.variant),
                                                  report.setup.solution_id, kind, windows[i].label()),
                                      {series}));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> perturbation_charts(const PerturbationStudy& study) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto windows = study.setup.windows();
  for (std::size_t i = 0; i < windows.size(); ++i) {
    std::vector<ChartSeries> series;
    for (std::size_t d = 0; d < study.deltas.size(); ++d) {
      ChartSeries s{fmt::format("delta={:g}", study.deltas[d]), {}};
      for (const auto& l : study.results[d]) s.points.emplace_back(l.h, l.errors[i]);
      series.push_back(std::move(s));
    }
    const std::string kind = to_string(windows[i].kind);
    out.emplace_back(kind, loglog_svg(fmt::format("{} {} {} on {}", to_string(study.setup.variant),
                                                  study.setup.solution_id, kind, windows[i].label()),
                                      series));
  }
  return out;
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) fail(ErrorKind::Io, fmt::format("cannot create directory {}: {}", target.parent_path().string(), ec.message()));
  }
  const fs::path temp = target.string() + fmt::format(".tmp{}", std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, fmt::format("cannot open {} for writing", temp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorKind::Io, fmt::format("write to {} failed", temp.string()));
  }
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    fail(ErrorKind::Io, fmt::format("cannot move report into place at {}", path));
  }
}

}  // namespace heatda
