#include "heatda/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "heatda/config.hpp"
#include "heatda/quadrature.hpp"
#include "heatda/random.hpp"
#include "heatda/solutions.hpp"

namespace heatda::verify {

namespace {

constexpr double kPi = 3.14159265358979323846;

void fill_random(SpaceTimeField& f, const CounterRng& rng) {
  auto flat = f.flat();
  for (Eigen::Index i = 0; i < flat.size(); ++i) flat[i] = rng.uniform(static_cast<std::uint64_t>(i), -1.0, 1.0);
}

Eigen::VectorXd random_vector(Eigen::Index size, const CounterRng& rng) {
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = rng.uniform(static_cast<std::uint64_t>(i), -1.0, 1.0);
  return v;
}

Eigen::VectorXd stack(const SpaceTimeField& u, const SpaceTimeField& z) {
  Eigen::VectorXd x(u.flat().size() + z.flat().size());
  x << u.flat(), z.flat();
  return x;
}

double max_abs(const SparseMatrix& m) {
  double worst = 0.0;
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

double asymmetry(const SparseMatrix& m) { return max_abs(SparseMatrix(m - SparseMatrix(m.transpose()))); }

SpatialFunction sine_mode(double a, double b) {
  return {[a, b](double x, double y) { return std::sin(a * kPi * x) * std::sin(b * kPi * y); },
          [a, b](double x, double y) {
            return Point{a * kPi * std::cos(a * kPi * x) * std::sin(b * kPi * y),
                         b * kPi * std::sin(a * kPi * x) * std::cos(b * kPi * y)};
          }};
}

struct SpatialErrors {
  double l2 = 0.0;
  double h1_semi = 0.0;
};

// Error of a vertex-indexed P1 function against f by the 7-point rule.
SpatialErrors spatial_errors(const SpatialFunction& f, const TriMesh& mesh, const Eigen::VectorXd& vertex_values) {
  SpatialErrors e;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& grads = mesh.basis_gradients(t);
    Point gh{0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
      gh.x += vertex_values[tri[k]] * grads[k].x;
      gh.y += vertex_values[tri[k]] * grads[k].y;
    }
    for (const auto& q : quadrature::triangle_order5()) {
      const Point p = mesh.map(t, q.bary);
      double vh = 0.0;
      for (int k = 0; k < 3; ++k) vh += q.bary[k] * vertex_values[tri[k]];
      const Point g = f.gradient(p.x, p.y);
      const double w = mesh.area(t) * q.weight;
      e.l2 += w * std::pow(vh - f.value(p.x, p.y), 2);
      e.h1_semi += w * (std::pow(gh.x - g.x, 2) + std::pow(gh.y - g.y, 2));
    }
  }
  e.l2 = std::sqrt(e.l2);
  e.h1_semi = std::sqrt(e.h1_semi);
  return e;
}

Eigen::VectorXd expand(const Eigen::VectorXd& dof_values, const DofMap& dofs) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.num_vertices());
  for (int d = 0; d < dofs.size(); ++d) out[dofs.vertex(d)] = dof_values[d];
  return out;
}

Eigen::VectorXd vertex_interpolant(const SpatialFunction& f, const TriMesh& mesh) {
  return nodal_interpolate(f.value, mesh, DofMap(mesh, SpaceKind::Full));
}

LevelSeries finish(std::vector<std::pair<double, double>> points) {
  LevelSeries s;
  s.points = std::move(points);
  s.fit = fit_rate(s.points);
  return s;
}

int default_slabs(double T, double h) { return time_slabs(T, h, 1.0, {}); }

struct Instance {
  TriMesh mesh;
  TimeGrid grid;
  SpatialForms forms;
  StabilizerPair pair;

  Instance(Variant variant, int n, int slabs, const Region& omega)
      : mesh(TriMesh::structured(n)),
        grid(1.0, slabs),
        forms(SpatialForms::build(mesh, omega)),
        pair(build_stabilizers(variant, mesh, grid, forms)) {}
};

Region default_omega(Variant variant) { return RunConfig::defaults(variant).omega; }

// Pieces of int_0^T [(d_t u, w) + a(u, w)] dt with w = z - pi_h z, where z is
// smooth and pi_h z is taken pointwise in time (Ritz on W_h or nodal).
struct GSplit {
  double mass = 0.0;
  double stiffness = 0.0;
  double stiffness_scale = 0.0;  // int sum_K |a_K(u, w)| dt
};

GSplit constraint_defect(const SpaceTimeField& u, const ManufacturedSolution& z, bool ritz, const TriMesh& mesh,
                         const DirichletLaplacian& laplacian) {
  GSplit out;
  const TimeGrid& grid = u.grid();
  const double tau = grid.tau();
  for (int k = 0; k < grid.slabs(); ++k) {
    const Eigen::VectorXd u0 = u.vertex_values(k);
    const Eigen::VectorXd u1 = u.vertex_values(k + 1);
    const Eigen::VectorXd du = (u1 - u0) / tau;
    for (const auto& tq : quadrature::gauss3()) {
      const double t = grid.node(k) + tq.s * tau;
      const SpatialFunction zt{[&](double x, double y) { return z.u(t, x, y); },
                               [&](double x, double y) { return Point{z.u_x(t, x, y), z.u_y(t, x, y)}; }};
      const Eigen::VectorXd pz = ritz ? expand(ritz_project(zt, mesh, laplacian), laplacian.dofs())
                                      : vertex_interpolant(zt, mesh);
      const Eigen::VectorXd ut = (1.0 - tq.s) * u0 + tq.s * u1;
      for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        const auto& verts = mesh.triangles()[tri];
        const auto& grads = mesh.basis_gradients(tri);
        Point gu{0.0, 0.0}, gp{0.0, 0.0};
        for (int j = 0; j < 3; ++j) {
          gu.x += ut[verts[j]] * grads[j].x;
          gu.y += ut[verts[j]] * grads[j].y;
          gp.x += pz[verts[j]] * grads[j].x;
          gp.y += pz[verts[j]] * grads[j].y;
        }
        double stiff_k = 0.0;
        for (const auto& q : quadrature::triangle_order5()) {
          const Point p = mesh.map(tri, q.bary);
          double dut = 0.0, pzv = 0.0;
          for (int j = 0; j < 3; ++j) {
            dut += q.bary[j] * du[verts[j]];
            pzv += q.bary[j] * pz[verts[j]];
          }
          const double w = tq.weight * tau * mesh.area(tri) * q.weight;
          out.mass += w * dut * (z.u(t, p.x, p.y) - pzv);
          stiff_k += w * (gu.x * (z.u_x(t, p.x, p.y) - gp.x) + gu.y * (z.u_y(t, p.x, p.y) - gp.y));
        }
        out.stiffness += stiff_k;
        out.stiffness_scale += std::abs(stiff_k);
      }
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

double ConstantTrack::growth() const {
  require(ratio.size() >= 2, ErrorKind::InvalidArgument, "constant tracking needs at least two levels");
  return ratio.back() / *std::max_element(ratio.begin(), ratio.end() - 1);
}

double coercivity_identity_error(Variant variant, int n, int slabs, int samples, std::uint64_t seed,
                                 bool corrupt_transpose) {
  const Instance in(variant, n, slabs, default_omega(variant));
  SaddleBlocks blocks = build_blocks(in.pair, in.forms);
  if (corrupt_transpose) blocks.constraint_transpose *= -1.0;
  const SparseMatrix a = compose_saddle_matrix(blocks);
  const CounterRng root(seed, 11);
  const double h2 = in.mesh.h() * in.mesh.h();
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    SpaceTimeField u = in.pair.make_primal();
    SpaceTimeField z = in.pair.make_dual();
    fill_random(u, root.split(2 * i));
    fill_random(z, root.split(2 * i + 1));
    SpaceTimeField mz = z;
    mz.flat() *= -1.0;
    const double lhs = stack(u, z).dot(a * stack(u, mz));
    double s = 0.0;
    if (variant == Variant::Unstable) {
      s = jump_time_form(u, u, in.forms) + h2 * time_derivative_form(u, u, in.forms);
    } else {
      const Eigen::VectorXd u0 = u.vertex_values(0);
      s = h2 * u0.dot(in.forms.stiffness * u0);
    }
    const double rhs = omega_form(u, u, in.forms) + s + stiffness_time_form(z, z, in.forms);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  return worst;
}

double ibp_identity_error(int n, int samples, std::uint64_t seed) {
  const TriMesh mesh = TriMesh::structured(n);
  const SparseMatrix k = stiffness_matrix(mesh);
  const CounterRng root(seed, 12);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Eigen::VectorXd u = random_vector(mesh.num_vertices(), root.split(2 * i));
    Eigen::VectorXd v = random_vector(mesh.num_vertices(), root.split(2 * i + 1));
    for (int p = 0; p < mesh.num_vertices(); ++p) {
      if (mesh.is_boundary(p)) v[p] = 0.0;
    }
    const double elementwise = v.dot(k * u);
    double faces = 0.0;
    for (const InternalFace& f : mesh.internal_faces()) {
      Point gl{0.0, 0.0}, gr{0.0, 0.0};
      for (int j = 0; j < 3; ++j) {
        const auto& l = mesh.basis_gradients(f.left)[j];
        const auto& r = mesh.basis_gradients(f.right)[j];
        gl.x += u[mesh.triangles()[f.left][j]] * l.x;
        gl.y += u[mesh.triangles()[f.left][j]] * l.y;
        gr.x += u[mesh.triangles()[f.right][j]] * r.x;
        gr.y += u[mesh.triangles()[f.right][j]] * r.y;
      }
      const double jump = f.normal.x * (gl.x - gr.x) + f.normal.y * (gl.y - gr.y);
      faces += f.length * jump * 0.5 * (v[f.vertices[0]] + v[f.vertices[1]]);
    }
    const double scale = std::sqrt(u.dot(k * u) * v.dot(k * v));
    worst = std::max(worst, std::abs(elementwise - faces) / scale);
  }
  return worst;
}

InterpolationStudy interpolation_study(const std::vector<int>& levels) {
  const SpatialFunction w = sine_mode(1.0, 1.0);
  std::vector<std::pair<double, double>> l2, h1, ritz;
  for (int n : levels) {
    const TriMesh mesh = TriMesh::structured(n);
    const SpatialErrors e = spatial_errors(w, mesh, vertex_interpolant(w, mesh));
    l2.emplace_back(mesh.h(), e.l2);
    h1.emplace_back(mesh.h(), std::hypot(e.l2, e.h1_semi));
    const DirichletLaplacian laplacian(mesh);
    const SpatialErrors r = spatial_errors(w, mesh, expand(ritz_project(w, mesh, laplacian), laplacian.dofs()));
    ritz.emplace_back(mesh.h(), std::hypot(r.l2, r.h1_semi));
  }
  return {finish(l2), finish(h1), finish(ritz)};
}

LevelSeries jump_scaling(const std::vector<int>& levels) {
  const SpatialFunction w = sine_mode(1.0, 1.0);
  std::vector<std::pair<double, double>> points;
  for (int n : levels) {
    const TriMesh mesh = TriMesh::structured(n);
    const Eigen::VectorXd iw = vertex_interpolant(w, mesh);
    points.emplace_back(mesh.h(), iw.dot(jump_stabilizer_matrix(mesh) * iw));
  }
  return finish(points);
}

PoincareStudy poincare_study(const std::vector<int>& levels, const Region& omega, int random_fields,
                             std::uint64_t seed) {
  const std::vector<std::function<double(double, double)>> library = {
      [](double, double) { return 1.0; },
      [](double x, double) { return x; },
      [](double x, double y) { return 2.0 * x - y + 0.5; },
      [](double x, double y) { return x * x + y * y; },
      [](double x, double y) { return std::exp(x + y); },
      [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); },
      [](double x, double y) { return std::cos(2.0 * kPi * x) * std::cos(kPi * y); },
      [](double x, double y) { return std::sin(3.0 * kPi * x) * y * y; },
      [](double x, double y) { return std::max(0.0, 0.3 - std::hypot(x - 0.1, y - 0.9)); },
      [](double x, double y) {
        // Smooth bump in [0, 0.3]^2, zero on omega.
        const double a = x < 0.3 ? x * (0.3 - x) : 0.0, b = y < 0.3 ? y * (0.3 - y) : 0.0;
        return a * a * b * b;
      },
  };
  PoincareStudy out;
  out.levels = levels;
  const CounterRng root(seed, 13);
  for (int n : levels) {
    const TriMesh mesh = TriMesh::structured(n);
    const std::vector<int> omega_triangles = triangles_in_region(mesh, omega);
    const SparseMatrix mass = mass_matrix(mesh);
    const SparseMatrix omega_mass = mass_matrix(mesh, &omega_triangles);
    const SparseMatrix jump = jump_stabilizer_matrix(mesh);
    const DofMap all(mesh, SpaceKind::Full);
    const auto quotient = [&](const Eigen::VectorXd& u) {
      return mesh.h() * std::sqrt(u.dot(mass * u)) /
             (std::sqrt(std::max(0.0, u.dot(jump * u))) + std::sqrt(u.dot(omega_mass * u)));
    };
    double worst = 0.0;
    for (const auto& f : library) worst = std::max(worst, quotient(nodal_interpolate(f, mesh, all)));
    for (int i = 0; i < random_fields; ++i) {
      worst = std::max(worst, quotient(random_vector(mesh.num_vertices(), root.split(i))));
    }
    out.max_quotient.push_back(worst);
  }
  return out;
}

double max_asymmetry(Variant variant, int n, int slabs) {
  const Instance in(variant, n, slabs, default_omega(variant));
  const SaddleBlocks blocks = build_blocks(in.pair, in.forms);
  double worst = 0.0;
  for (const SparseMatrix* m :
       {&in.forms.mass, &in.forms.stiffness, &in.forms.jump, &in.forms.omega_mass, &in.pair.primal(), &in.pair.dual(),
        &in.pair.time_derivative_gram(), &blocks.primal, &blocks.dual, &blocks.omega_mass}) {
    worst = std::max(worst, asymmetry(*m));
  }
  const SparseMatrix tm = time_mass_p1(in.grid);
  const SparseMatrix ts = time_stiffness_p1(in.grid);
  worst = std::max({worst, asymmetry(tm), asymmetry(ts), asymmetry(compose_saddle_matrix(blocks))});
  worst = std::max(worst, max_abs(SparseMatrix(blocks.constraint_transpose - SparseMatrix(blocks.constraint.transpose()))));
  return worst;
}

ZeroDataResult zero_data_solve(Variant variant, int n, int slabs, SolveMethod method) {
  const Region omega = default_omega(variant);
  const Instance in(variant, n, slabs, omega);
  const SaddleSystem system = assemble_system(in.mesh, in.grid, in.pair, omega, zero_solution(), DataSpec{});
  const SaddleSolution sol = solve(system, method);
  return {sol.state.cwiseAbs().maxCoeff(), sol.report.relative_residual};
}

AlphaScan alpha_scan(int n, int samples, std::uint64_t seed) {
  const RunConfig cfg = RunConfig::defaults(Variant::Stable);
  const TriMesh mesh = TriMesh::structured(n);
  const TimeGrid grid(cfg.T, default_slabs(cfg.T, mesh.h()));
  const SpatialForms forms = SpatialForms::build(mesh, cfg.omega);
  const StabilizerPair pair = build_stabilizers(Variant::Stable, mesh, grid, forms);
  const SparseMatrix a = compose_saddle_matrix(build_blocks(pair, forms));
  const double h2 = mesh.h() * mesh.h();

  struct Pair {
    Eigen::VectorXd x, y_base, dtu;
    double base = 0.0, dt = 0.0;
  };
  std::vector<Pair> pairs;
  const CounterRng root(seed, 14);
  for (int i = 0; i < samples; ++i) {
    SpaceTimeField u = pair.make_primal();
    SpaceTimeField z = pair.make_dual();
    fill_random(u, root.split(2 * i));
    fill_random(z, root.split(2 * i + 1));
    SpaceTimeField mz = z;
    mz.flat() *= -1.0;
    const SpaceTimeField du = time_derivative(u);
    SpaceTimeField zero = pair.make_primal();
    zero.flat().setZero();
    Pair p;
    p.x = stack(u, z);
    p.y_base = stack(u, mz);
    p.dtu = stack(zero, du);
    p.base = pair.s(u, u) + omega_form(u, u, forms) + pair.s_star(z, z);
    p.dt = h2 * time_derivative_form(u, u, forms);
    pairs.push_back(std::move(p));
  }

  AlphaScan scan;
  scan.best_c = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 12; ++k) {
    const double alpha = std::ldexp(1.0, -k);
    double c = std::numeric_limits<double>::infinity();
    for (const Pair& p : pairs) {
      const double value = p.x.dot(a * (p.y_base + alpha * h2 * p.dtu));
      c = std::min(c, value / (p.base + alpha * p.dt));
    }
    scan.alphas.push_back(alpha);
    scan.c.push_back(c);
    if (c > scan.best_c) {
      scan.best_c = c;
      scan.best_alpha = alpha;
    }
  }
  return scan;
}

ConstantTrack track_vs_upper(Variant variant, const std::string& solution_id, const std::vector<int>& levels) {
  const ManufacturedSolution& sol = find_solution(solution_id);
  ConstantTrack track{fmt::format("Vs_upper[{},{}]", to_string(variant), solution_id), levels, {}};
  for (int n : levels) {
    const TriMesh mesh = TriMesh::structured(n);
    const TimeGrid grid(1.0, default_slabs(1.0, mesh.h()));
    const StabilizerPair pair = build_stabilizers(variant, mesh, grid);
    SpaceTimeField pu = pair.make_primal();
    if (variant == Variant::Unstable) {
      pu = nodal_interpolate(sol.u, mesh, grid, SpaceKind::Full, TimeBasis::P1Continuous);
    } else {
      const DirichletLaplacian laplacian(mesh);
      for (int k = 0; k <= grid.slabs(); ++k) {
        const double t = grid.node(k);
        const SpatialFunction f{[&](double x, double y) { return sol.u(t, x, y); },
                                [&](double x, double y) { return Point{sol.u_x(t, x, y), sol.u_y(t, x, y)}; }};
        pu.coefficients().row(k) = ritz_project(f, mesh, laplacian).transpose();
      }
    }
    track.ratio.push_back(pair.primal_seminorm(pu) / (mesh.h() * solution_norms(sol, mesh, grid).star()));
  }
  return track;
}

ConstantTrack track_ds_upper(const std::string& solution_id, const std::vector<int>& levels) {
  const ManufacturedSolution& sol = find_solution(solution_id);
  ConstantTrack track{fmt::format("ds_upper[{}]", solution_id), levels, {}};
  for (int n : levels) {
    const TriMesh mesh = TriMesh::structured(n);
    const TimeGrid grid(1.0, default_slabs(1.0, mesh.h()));
    const StabilizerPair pair = build_stabilizers(Variant::Unstable, mesh, grid);
    const SpaceTimeField pz = nodal_interpolate(sol.u, mesh, grid, SpaceKind::Dirichlet, TimeBasis::P0Slabwise);
    track.ratio.push_back(pair.dual_norm(pz) / solution_norms(sol, mesh, grid).norm_0_1);
  }
  return track;
}

ConstantTrack track_v_lower(Variant variant, const std::string& solution_id, const std::vector<int>& levels,
                            int samples, std::uint64_t seed) {
  const ManufacturedSolution& sol = find_solution(solution_id);
  ConstantTrack track{fmt::format("V_lower[{},{}]", to_string(variant), solution_id), levels, {}};
  const CounterRng root(seed, 15);
  for (int n : levels) {
    const TriMesh mesh = TriMesh::structured(n);
    const TimeGrid grid(1.0, default_slabs(1.0, mesh.h()));
    const StabilizerPair pair = build_stabilizers(variant, mesh, grid);
    const DirichletLaplacian laplacian(mesh);
    const double z_norm = solution_norms(sol, mesh, grid).norm_0_1;
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      SpaceTimeField u = pair.make_primal();
      fill_random(u, root.split(static_cast<std::uint64_t>(n) * 1000 + i));
      const GSplit g = constraint_defect(u, sol, variant == Variant::Stable, mesh, laplacian);
      worst = std::max(worst, std::abs(g.mass + g.stiffness) / (pair.primal_seminorm(u) * z_norm));
    }
    track.ratio.push_back(worst);
  }
  return track;
}

RitzOrthogonality ritz_orthogonality(int n, int functions, std::uint64_t seed) {
  const TriMesh mesh = TriMesh::structured(n);
  const DirichletLaplacian laplacian(mesh);
  const DofMap& dofs = laplacian.dofs();
  const CounterRng rng(seed, 16);
  RitzOrthogonality out;
  for (int i = 0; i < functions; ++i) {
    const double a = 1.0 + std::floor(4.0 * rng.uniform(4 * i));
    const double b = 1.0 + std::floor(4.0 * rng.uniform(4 * i + 1));
    const double c = rng.uniform(4 * i + 2, 0.5, 2.0);
    const double d = rng.uniform(4 * i + 3, -1.0, 1.0);
    // f = sin(a pi x) sin(b pi y) (c + d x y)
    const SpatialFunction mode = sine_mode(a, b);
    const SpatialFunction f{[=](double x, double y) { return mode.value(x, y) * (c + d * x * y); },
                            [=](double x, double y) {
                              const Point g = mode.gradient(x, y);
                              const double m = mode.value(x, y);
                              return Point{g.x * (c + d * x * y) + m * d * y, g.y * (c + d * x * y) + m * d * x};
                            }};
    // Residual against an independently integrated load.
    Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs.size());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const auto& tri = mesh.triangles()[t];
      const auto& grads = mesh.basis_gradients(t);
      for (const auto& q : quadrature::triangle_order5()) {
        const Point p = mesh.map(t, q.bary);
        const Point g = f.gradient(p.x, p.y);
        for (int k = 0; k < 3; ++k) {
          const int dof = dofs.dof(tri[k]);
          if (dof >= 0) load[dof] += mesh.area(t) * q.weight * (g.x * grads[k].x + g.y * grads[k].y);
        }
      }
    }
    const Eigen::VectorXd rf = ritz_project(f, mesh, laplacian);
    out.residual = std::max(out.residual, (laplacian.matrix() * rf - load).cwiseAbs().maxCoeff() /
                                              load.cwiseAbs().maxCoeff());
  }

  const TimeGrid grid(1.0, default_slabs(1.0, mesh.h()));
  const StabilizerPair pair = build_stabilizers(Variant::Stable, mesh, grid);
  SpaceTimeField u = pair.make_primal();
  fill_random(u, CounterRng(seed, 17));
  for (const char* id : {"S1", "S2"}) {
    const GSplit g = constraint_defect(u, find_solution(id), true, mesh, laplacian);
    out.stiffness_term = std::max(out.stiffness_term, std::abs(g.stiffness) / g.stiffness_scale);
  }
  return out;
}

double constraint_linearity_error(int n, int slabs, int samples, std::uint64_t seed) {
  const Instance in(Variant::Unstable, n, slabs, default_omega(Variant::Unstable));
  const CounterRng root(seed, 18);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    SpaceTimeField u1 = in.pair.make_primal(), u2 = in.pair.make_primal();
    SpaceTimeField z1 = in.pair.make_dual(), z2 = in.pair.make_dual();
    fill_random(u1, root.split(4 * i));
    fill_random(u2, root.split(4 * i + 1));
    fill_random(z1, root.split(4 * i + 2));
    fill_random(z2, root.split(4 * i + 3));
    const double scale = root.split(4 * i).uniform(999, 0.5, 3.0);
    SpaceTimeField us = u1, zs = z1, su = u1, sz = z1;
    us.flat() += u2.flat();
    zs.flat() += z2.flat();
    su.flat() *= scale;
    sz.flat() *= scale;
    const double g11 = constraint_form_G(u1, z1, in.forms);
    const double ref = std::abs(constraint_form_G(u1, z1, in.forms)) + std::abs(constraint_form_G(u2, z1, in.forms)) +
                       std::abs(constraint_form_G(u1, z2, in.forms));
    const double defects[] = {
        constraint_form_G(us, z1, in.forms) - g11 - constraint_form_G(u2, z1, in.forms),
        constraint_form_G(u1, zs, in.forms) - g11 - constraint_form_G(u1, z2, in.forms),
        constraint_form_G(su, z1, in.forms) - scale * g11,
        constraint_form_G(u1, sz, in.forms) - scale * g11,
    };
    for (double d : defects) worst = std::max(worst, std::abs(d) / ref);
  }
  return worst;
}

double direct_iterative_gap(Variant variant, int n) {
  const RunConfig cfg = RunConfig::defaults(variant);
  const TriMesh mesh = TriMesh::structured(n);
  const TimeGrid grid(cfg.T, time_slabs(cfg.T, mesh.h(), cfg.ct, {{cfg.T1, "time.T1"}, {cfg.T2, "time.T2"}}));
  const SpatialForms forms = SpatialForms::build(mesh, cfg.omega);
  const StabilizerPair pair = build_stabilizers(variant, mesh, grid, forms);
  DataSpec data;
  data.solution_id = cfg.solution;
  const SaddleSystem system = assemble_system(mesh, grid, pair, cfg.omega, data);
  const SaddleSolution direct = solve(system, SolveMethod::Direct);
  const SaddleSolution iterative = solve(system, SolveMethod::Iterative);
  SpaceTimeField du = direct.primal, dz = direct.dual;
  du.flat() -= iterative.primal.flat();
  dz.flat() -= iterative.dual.flat();
  return triple_norm(du, dz, pair, forms);
}

// ---------------------------------------------------------------------------

const char* to_string(Level level) { return level == Level::Quick ? "quick" : "full"; }

Level parse_level(const std::string& name) {
  if (name == "quick") return Level::Quick;
  if (name == "full") return Level::Full;
  fail(ErrorKind::InvalidArgument, fmt::format("unknown verify level '{}' (expected quick or full)", name));
}

namespace {

class Suite {
 public:
  Suite(const CheckCallback& callback) : callback_(callback) {}

  template <typename Body>
  void run(const std::string& name, Body&& body) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    r.name = name;
    try {
      auto [passed, detail] = body();
      r.passed = passed;
      r.detail = std::move(detail);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = fmt::format("error: {}", e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (callback_) callback_(r);
    results_.push_back(std::move(r));
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  const CheckCallback& callback_;
  std::vector<CheckResult> results_;
};

using Outcome = std::pair<bool, std::string>;

Outcome bounded(const ConstantTrack& t, double limit) {
  std::string values;
  for (std::size_t i = 0; i < t.levels.size(); ++i) values += fmt::format(" n={}:{:.3g}", t.levels[i], t.ratio[i]);
  const double g = t.growth();
  return {std::isfinite(g) && g <= limit, fmt::format("growth {:.3f} (limit {}),{}", g, limit, values)};
}

}  // namespace

std::vector<CheckResult> run_checks(const Options& options, const CheckCallback& on_check) {
  Suite suite(on_check);
  const std::uint64_t seed = options.seed;
  const bool full = options.level == Level::Full;

  for (Variant v : {Variant::Unstable, Variant::Stable}) {
    for (int n : {4, 8}) {
      for (int slabs : {4, 8}) {
        suite.run(fmt::format("coercivity_identity[{},n={},N={}]", to_string(v), n, slabs), [&]() -> Outcome {
          const double e = coercivity_identity_error(v, n, slabs, 50, seed, options.corrupt_constraint_transpose);
          return {e <= 1e-12, fmt::format("max relative error {:.3e} (limit 1e-12)", e)};
        });
      }
    }
  }
  for (int n : full ? std::vector<int>{4, 8, 16} : std::vector<int>{4, 8}) {
    suite.run(fmt::format("ibp_identity[n={}]", n), [&]() -> Outcome {
      const double e = ibp_identity_error(n, 20, seed);
      return {e <= 1e-12, fmt::format("max relative error {:.3e} (limit 1e-12)", e)};
    });
  }
  for (Variant v : {Variant::Unstable, Variant::Stable}) {
    suite.run(fmt::format("symmetry[{},n=8,N=8]", to_string(v)), [&]() -> Outcome {
      const double e = max_asymmetry(v, 8, 8);
      return {e <= 1e-13, fmt::format("max |M - M^T| {:.3e} (limit 1e-13)", e)};
    });
  }
  suite.run("constraint_linearity[n=8,N=8]", [&]() -> Outcome {
    const double e = constraint_linearity_error(8, 8, 10, seed);
    return {e <= 1e-12, fmt::format("max relative defect {:.3e} (limit 1e-12)", e)};
  });
  for (Variant v : {Variant::Unstable, Variant::Stable}) {
    suite.run(fmt::format("zero_data[{},n=8,N=8]", to_string(v)), [&]() -> Outcome {
      const ZeroDataResult r = zero_data_solve(v, 8, 8, SolveMethod::Auto);
      return {r.max_abs == 0.0 && r.residual == 0.0,
              fmt::format("max |x| {:.3e}, residual {:.3e} (both must be 0)", r.max_abs, r.residual)};
    });
  }
  suite.run("ritz_orthogonality[n=8]", [&]() -> Outcome {
    const RitzOrthogonality r = ritz_orthogonality(8, 10, seed);
    return {r.residual <= 1e-10 && r.stiffness_term <= 1e-10,
            fmt::format("Ritz residual {:.3e}, stiffness part of G {:.3e} (limit 1e-10)", r.residual,
                        r.stiffness_term)};
  });
  if (!full) return suite.take();

  const std::vector<int> levels{8, 16, 32, 64};
  suite.run("interpolation_rates[sin sin]", [&]() -> Outcome {
    const InterpolationStudy s = interpolation_study(levels);
    const bool ok = std::abs(s.nodal_l2.fit.rate - 2.0) <= 0.15 && std::abs(s.nodal_h1.fit.rate - 1.0) <= 0.15 &&
                    std::abs(s.ritz_h1.fit.rate - 1.0) <= 0.15;
    return {ok, fmt::format("nodal L2 {:.3f} (2+-0.15), nodal H1 {:.3f} (1+-0.15), Ritz H1 {:.3f} (1+-0.15)",
                            s.nodal_l2.fit.rate, s.nodal_h1.fit.rate, s.ritz_h1.fit.rate)};
  });
  suite.run("jump_scaling[sin sin]", [&]() -> Outcome {
    const LevelSeries s = jump_scaling(levels);
    return {std::abs(s.fit.rate - 2.0) <= 0.3, fmt::format("rate {:.3f} (2+-0.3)", s.fit.rate)};
  });
  suite.run("discrete_poincare", [&]() -> Outcome {
    const PoincareStudy p = poincare_study(levels, default_omega(Variant::Unstable), 20, seed);
    std::string values;
    for (std::size_t i = 0; i < p.levels.size(); ++i) {
      values += fmt::format(" n={}:{:.3g}", p.levels[i], p.max_quotient[i]);
    }
    return {p.growth() <= 1.5, fmt::format("max quotient growth {:.3f} (limit 1.5),{}", p.growth(), values)};
  });
  for (int n : {8, 16}) {
    suite.run(fmt::format("alpha_construction[stable,n={}]", n), [&]() -> Outcome {
      const AlphaScan s = alpha_scan(n, 20, seed);
      return {s.best_c >= 0.1, fmt::format("best c {:.3f} at alpha 2^{} (limit 0.1), c {:.3f} at alpha 1", s.best_c,
                                           static_cast<int>(std::lround(std::log2(s.best_alpha))), s.c.front())};
    });
  }
  for (const auto& [v, id] : std::vector<std::pair<Variant, std::string>>{{Variant::Unstable, "U1"},
                                                                          {Variant::Unstable, "U2"},
                                                                          {Variant::Unstable, "S2"},
                                                                          {Variant::Stable, "S1"},
                                                                          {Variant::Stable, "S2"}}) {
    suite.run(fmt::format("Vs_upper[{},{}]", to_string(v), id),
              [&]() -> Outcome { return bounded(track_vs_upper(v, id, levels), 1.5); });
  }
  for (const char* id : {"S1", "S2"}) {
    suite.run(fmt::format("ds_upper[{}]", id), [&]() -> Outcome { return bounded(track_ds_upper(id, levels), 1.5); });
  }
  for (Variant v : {Variant::Unstable, Variant::Stable}) {
    suite.run(fmt::format("V_lower[{},S2]", to_string(v)),
              [&]() -> Outcome { return bounded(track_v_lower(v, "S2", {8, 16, 32}, 5, seed), 1.5); });
  }
  for (Variant v : {Variant::Unstable, Variant::Stable}) {
    for (int n : {8, 16}) {
      suite.run(fmt::format("direct_vs_iterative[{},n={}]", to_string(v), n), [&]() -> Outcome {
        const double gap = direct_iterative_gap(v, n);
        return {gap <= 1e-8, fmt::format("triple norm of difference {:.3e} (limit 1e-8)", gap)};
      });
    }
  }
  return suite.take();
}

}  // namespace heatda::verify
