#include "heatda/forms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "heatda/error.hpp"
#include "heatda/quadrature.hpp"

namespace heatda {

using Triplet = Eigen::Triplet<double>;

namespace {

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

void require_same_grid(const SpaceTimeField& a, const SpaceTimeField& b) {
  require(a.grid() == b.grid(), ErrorKind::InvalidArgument, "fields live on different time grids");
  require(a.dofs().num_vertices() == b.dofs().num_vertices(), ErrorKind::InvalidArgument,
          "fields live on different meshes");
}

void require_basis(const SpaceTimeField& f, TimeBasis basis, const char* what) {
  require(f.basis() == basis, ErrorKind::InvalidArgument,
          fmt::format("{} needs a {} field", what, basis == TimeBasis::P1Continuous ? "P1Continuous" : "P0Slabwise"));
}

// Vertex values of every time row.
std::vector<Eigen::VectorXd> rows_of(const SpaceTimeField& f) {
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(f.time_rows());
  for (int r = 0; r < f.time_rows(); ++r) rows.push_back(f.vertex_values(r));
  return rows;
}

// int over one slab of b(u(t), v(t)) for u, v linear in t.
double p1_slab_integral(const SparseMatrix& m, const std::vector<Eigen::VectorXd>& u,
                        const std::vector<Eigen::VectorXd>& v, double tau) {
  double total = 0.0;
  for (size_t k = 0; k + 1 < u.size(); ++k) {
    const Eigen::VectorXd mv0 = m * v[k];
    const Eigen::VectorXd mv1 = m * v[k + 1];
    total += tau / 6.0 * (2.0 * u[k].dot(mv0) + u[k].dot(mv1) + u[k + 1].dot(mv0) + 2.0 * u[k + 1].dot(mv1));
  }
  return total;
}

std::string format_coord(double c) { return fmt::format("{:g}", c); }

}  // namespace

SparseMatrix mass_matrix(const TriMesh& mesh, const std::vector<int>* triangles) {
  std::vector<Triplet> triplets;
  auto add = [&](int t) {
    const auto& tri = mesh.triangles()[t];
    const double a = mesh.area(t) / 12.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], i == j ? 2.0 * a : a);
    }
  };
  if (triangles) {
    for (int t : *triangles) add(t);
  } else {
    for (int t = 0; t < mesh.num_triangles(); ++t) add(t);
  }
  return from_triplets(mesh.num_vertices(), mesh.num_vertices(), triplets);
}

SparseMatrix stiffness_matrix(const TriMesh& mesh) {
  std::vector<Triplet> triplets;
  triplets.reserve(9 * static_cast<size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& g = mesh.basis_gradients(t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        triplets.emplace_back(tri[i], tri[j], mesh.area(t) * (g[i].x * g[j].x + g[i].y * g[j].y));
      }
    }
  }
  return from_triplets(mesh.num_vertices(), mesh.num_vertices(), triplets);
}

SparseMatrix jump_stabilizer_matrix(const TriMesh& mesh) {
  std::vector<Triplet> triplets;
  triplets.reserve(16 * mesh.internal_faces().size());
  for (const InternalFace& face : mesh.internal_faces()) {
    // Coefficients c_v with [n . grad u] = sum_v c_v u_v.
    std::map<int, double> coeff;
    auto accumulate = [&](int t, double sign) {
      const auto& tri = mesh.triangles()[t];
      const auto& g = mesh.basis_gradients(t);
      for (int k = 0; k < 3; ++k) coeff[tri[k]] += sign * (face.normal.x * g[k].x + face.normal.y * g[k].y);
    };
    accumulate(face.left, 1.0);
    accumulate(face.right, -1.0);
    const double weight = mesh.h() * face.length;
    for (const auto& [a, ca] : coeff) {
      for (const auto& [b, cb] : coeff) triplets.emplace_back(a, b, weight * ca * cb);
    }
  }
  return from_triplets(mesh.num_vertices(), mesh.num_vertices(), triplets);
}

SparseMatrix restrict_to(const SparseMatrix& vertex_matrix, const DofMap& rows, const DofMap& cols) {
  std::vector<Triplet> triplets;
  triplets.reserve(vertex_matrix.nonZeros());
  for (int c = 0; c < vertex_matrix.outerSize(); ++c) {
    const int dc = cols.dof(c);
    if (dc < 0) continue;
    for (SparseMatrix::InnerIterator it(vertex_matrix, c); it; ++it) {
      const int dr = rows.dof(static_cast<int>(it.row()));
      if (dr >= 0) triplets.emplace_back(dr, dc, it.value());
    }
  }
  return from_triplets(rows.size(), cols.size(), triplets);
}

SpatialForms SpatialForms::build(const TriMesh& mesh, const Region& omega) {
  SpatialForms forms;
  forms.mass = mass_matrix(mesh);
  forms.stiffness = stiffness_matrix(mesh);
  forms.jump = jump_stabilizer_matrix(mesh);
  const std::vector<int> omega_triangles = triangles_in_region(mesh, omega);
  forms.omega_mass = mass_matrix(mesh, &omega_triangles);
  forms.h = mesh.h();
  return forms;
}

SparseMatrix time_mass_p1(const TimeGrid& grid) {
  std::vector<Triplet> triplets;
  const double tau = grid.tau();
  for (int k = 0; k < grid.slabs(); ++k) {
    triplets.emplace_back(k, k, tau / 3.0);
    triplets.emplace_back(k + 1, k + 1, tau / 3.0);
    triplets.emplace_back(k, k + 1, tau / 6.0);
    triplets.emplace_back(k + 1, k, tau / 6.0);
  }
  return from_triplets(grid.slabs() + 1, grid.slabs() + 1, triplets);
}

SparseMatrix time_stiffness_p1(const TimeGrid& grid) {
  std::vector<Triplet> triplets;
  const double inv = 1.0 / grid.tau();
  for (int k = 0; k < grid.slabs(); ++k) {
    triplets.emplace_back(k, k, inv);
    triplets.emplace_back(k + 1, k + 1, inv);
    triplets.emplace_back(k, k + 1, -inv);
    triplets.emplace_back(k + 1, k, -inv);
  }
  return from_triplets(grid.slabs() + 1, grid.slabs() + 1, triplets);
}

SparseMatrix slab_difference(const TimeGrid& grid) {
  std::vector<Triplet> triplets;
  for (int k = 0; k < grid.slabs(); ++k) {
    triplets.emplace_back(k, k, -1.0);
    triplets.emplace_back(k, k + 1, 1.0);
  }
  return from_triplets(grid.slabs(), grid.slabs() + 1, triplets);
}

SparseMatrix slab_average(const TimeGrid& grid) {
  std::vector<Triplet> triplets;
  const double half = 0.5 * grid.tau();
  for (int k = 0; k < grid.slabs(); ++k) {
    triplets.emplace_back(k, k, half);
    triplets.emplace_back(k, k + 1, half);
  }
  return from_triplets(grid.slabs(), grid.slabs() + 1, triplets);
}

SparseMatrix kron(const SparseMatrix& time, const SparseMatrix& space) {
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<size_t>(time.nonZeros()) * space.nonZeros());
  const Eigen::Index sr = space.rows(), sc = space.cols();
  for (int tc = 0; tc < time.outerSize(); ++tc) {
    for (SparseMatrix::InnerIterator ti(time, tc); ti; ++ti) {
      for (int c = 0; c < space.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator si(space, c); si; ++si) {
          triplets.emplace_back(static_cast<int>(ti.row() * sr + si.row()), static_cast<int>(tc * sc + c),
                                ti.value() * si.value());
        }
      }
    }
  }
  return from_triplets(static_cast<int>(time.rows() * sr), static_cast<int>(time.cols() * sc), triplets);
}

double omega_form(const SpaceTimeField& u, const SpaceTimeField& v, const SpatialForms& forms) {
  require_same_grid(u, v);
  require_basis(u, TimeBasis::P1Continuous, "omega form");
  require_basis(v, TimeBasis::P1Continuous, "omega form");
  return p1_slab_integral(forms.omega_mass, rows_of(u), rows_of(v), u.grid().tau());
}

double jump_time_form(const SpaceTimeField& u, const SpaceTimeField& v, const SpatialForms& forms) {
  require_same_grid(u, v);
  require_basis(u, TimeBasis::P1Continuous, "jump form");
  require_basis(v, TimeBasis::P1Continuous, "jump form");
  return p1_slab_integral(forms.jump, rows_of(u), rows_of(v), u.grid().tau());
}

double time_derivative_form(const SpaceTimeField& u, const SpaceTimeField& v, const SpatialForms& forms) {
  require_same_grid(u, v);
  double total = 0.0;
  const double tau = u.grid().tau();
  for (int k = 0; k < u.grid().slabs(); ++k) {
    total += tau * u.slab_derivative(k).dot(forms.mass * v.slab_derivative(k));
  }
  return total;
}

double stiffness_time_form(const SpaceTimeField& z, const SpaceTimeField& w, const SpatialForms& forms) {
  require_same_grid(z, w);
  require_basis(z, TimeBasis::P0Slabwise, "dual stiffness form");
  require_basis(w, TimeBasis::P0Slabwise, "dual stiffness form");
  double total = 0.0;
  for (int k = 0; k < z.grid().slabs(); ++k) {
    total += z.grid().tau() * z.vertex_values(k).dot(forms.stiffness * w.vertex_values(k));
  }
  return total;
}

double constraint_form_G(const SpaceTimeField& u, const SpaceTimeField& z, const SpatialForms& forms) {
  require_same_grid(u, z);
  require_basis(u, TimeBasis::P1Continuous, "constraint form (primal)");
  require_basis(z, TimeBasis::P0Slabwise, "constraint form (dual)");
  const double tau = u.grid().tau();
  double total = 0.0;
  Eigen::VectorXd prev = u.vertex_values(0);
  for (int k = 0; k < u.grid().slabs(); ++k) {
    const Eigen::VectorXd next = u.vertex_values(k + 1);
    const Eigen::VectorXd zk = z.vertex_values(k);
    total += zk.dot(forms.mass * (next - prev)) + 0.5 * tau * zk.dot(forms.stiffness * (prev + next));
    prev = next;
  }
  return total;
}

SparseMatrix constraint_matrix(const SpatialForms& forms, const TimeGrid& grid, const DofMap& primal,
                               const DofMap& dual) {
  const SparseMatrix mass = restrict_to(forms.mass, dual, primal);
  const SparseMatrix stiff = restrict_to(forms.stiffness, dual, primal);
  SparseMatrix g = kron(slab_difference(grid), mass);
  g += kron(slab_average(grid), stiff);
  return g;
}

const char* to_string(Variant v) { return v == Variant::Unstable ? "unstable" : "stable"; }

Variant parse_variant(const std::string& name) {
  if (name == "unstable" || name == "UnstableModel") return Variant::Unstable;
  if (name == "stable" || name == "StableModel") return Variant::Stable;
  fail(ErrorKind::InvalidArgument, fmt::format("unknown variant '{}'", name));
}

StabilizerPair build_stabilizers(Variant variant, const TriMesh& mesh, const TimeGrid& grid) {
  return build_stabilizers(variant, mesh, grid, SpatialForms::build(mesh, Region::unit_square()));
}

StabilizerPair build_stabilizers(Variant variant, const TriMesh& mesh, const TimeGrid& grid,
                                 const SpatialForms& forms) {
  DofMap primal(mesh, variant == Variant::Unstable ? SpaceKind::Full : SpaceKind::Dirichlet);
  DofMap dual(mesh, SpaceKind::Dirichlet);
  const double h = mesh.h();
  StabilizerPair pair(variant, primal, dual, grid, h);

  const SparseMatrix mass_pp = restrict_to(forms.mass, primal, primal);
  pair.dt_gram_ = h * h * kron(time_stiffness_p1(grid), mass_pp);
  if (variant == Variant::Unstable) {
    pair.primal_ = kron(time_mass_p1(grid), restrict_to(forms.jump, primal, primal));
    pair.primal_ += pair.dt_gram_;
  } else {
    SparseMatrix initial(grid.slabs() + 1, grid.slabs() + 1);
    initial.insert(0, 0) = 1.0;
    pair.primal_ = h * h * kron(initial, restrict_to(forms.stiffness, primal, primal));
  }

  SparseMatrix slab_measure(grid.slabs(), grid.slabs());
  slab_measure.setIdentity();
  slab_measure *= grid.tau();
  pair.dual_ = kron(slab_measure, restrict_to(forms.stiffness, dual, dual));
  return pair;
}

namespace {

void require_space(const SpaceTimeField& f, const DofMap& dofs, const TimeGrid& grid, TimeBasis basis) {
  require(f.dofs() == dofs && f.grid() == grid && f.basis() == basis, ErrorKind::InvalidArgument,
          "field does not belong to the stabilizer's space");
}

}  // namespace

double StabilizerPair::s(const SpaceTimeField& u, const SpaceTimeField& v) const {
  require_space(u, primal_dofs_, grid_, TimeBasis::P1Continuous);
  require_space(v, primal_dofs_, grid_, TimeBasis::P1Continuous);
  return u.flat().dot(primal_ * v.flat());
}

double StabilizerPair::s_star(const SpaceTimeField& z, const SpaceTimeField& w) const {
  require_space(z, dual_dofs_, grid_, TimeBasis::P0Slabwise);
  require_space(w, dual_dofs_, grid_, TimeBasis::P0Slabwise);
  return z.flat().dot(dual_ * w.flat());
}

double StabilizerPair::primal_seminorm(const SpaceTimeField& u) const {
  const double base = std::sqrt(std::max(0.0, s(u, u)));
  if (variant_ == Variant::Unstable) return base;
  return base + std::sqrt(std::max(0.0, u.flat().dot(dt_gram_ * u.flat())));
}

double StabilizerPair::dual_norm(const SpaceTimeField& z) const { return std::sqrt(std::max(0.0, s_star(z, z))); }

SpaceTimeField StabilizerPair::make_primal() const {
  return SpaceTimeField(TimeBasis::P1Continuous, primal_dofs_, grid_);
}

SpaceTimeField StabilizerPair::make_dual() const { return SpaceTimeField(TimeBasis::P0Slabwise, dual_dofs_, grid_); }

double triple_norm(const SpaceTimeField& u, const SpaceTimeField& z, const StabilizerPair& pair,
                   const SpatialForms& forms) {
  return pair.primal_seminorm(u) + std::sqrt(std::max(0.0, omega_form(u, u, forms))) + pair.dual_norm(z);
}

double triple_norm(const SpaceTimeField& u, const SpaceTimeField& z, const StabilizerPair& pair,
                   const TriMesh& mesh, const Region& omega) {
  return triple_norm(u, z, pair, SpatialForms::build(mesh, omega));
}

const char* to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L2L2: return "L2L2";
    case NormKind::L2H1: return "L2H1";
    case NormKind::CinT_L2: return "CinT_L2";
    case NormKind::H1Hm1: return "H1Hm1";
  }
  return "?";
}

NormKind parse_norm_kind(const std::string& name) {
  for (NormKind k : {NormKind::L2L2, NormKind::L2H1, NormKind::CinT_L2, NormKind::H1Hm1}) {
    if (name == to_string(k)) return k;
  }
  fail(ErrorKind::InvalidArgument, fmt::format("unknown norm kind '{}'", name));
}

std::string NormWindow::label() const {
  return fmt::format("t{}-{}_x{}-{}_y{}-{}", format_coord(t_begin), format_coord(t_end), format_coord(region.x0),
                     format_coord(region.x1), format_coord(region.y0), format_coord(region.y1));
}

double error_norm(const ErrorSource& error, const NormWindow& window, const TriMesh& mesh, const TimeGrid& grid,
                  const DirichletLaplacian* laplacian) {
  const int k_begin = grid.node_index(window.t_begin);
  const int k_end = grid.node_index(window.t_end);
  require(k_begin >= 0, ErrorKind::InvalidArgument,
          fmt::format("window start {} is not a time grid node", window.t_begin));
  require(k_end >= 0, ErrorKind::InvalidArgument, fmt::format("window end {} is not a time grid node", window.t_end));
  require(k_begin <= k_end, ErrorKind::InvalidArgument, "window start exceeds window end");
  if (error.discrete) {
    require(error.discrete->grid() == grid, ErrorKind::InvalidArgument, "field and window use different grids");
  }
  if (mesh.subdivisions() > 0 && !window.region.is_unit_square()) {
    require(window.region.aligned_with(mesh.subdivisions()), ErrorKind::InvalidArgument,
            fmt::format("region {} is not resolved by the mesh", window.label()));
  }

  std::vector<int> triangles;
  if (window.region.is_unit_square()) {
    triangles.resize(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) triangles[t] = t;
  } else {
    triangles = triangles_in_region(mesh, window.region);
  }

  const SpaceTimeField* u = error.discrete;
  const ExactField* exact = error.exact;
  const double tau = grid.tau();
  auto sample = [&](int t, const std::array<double, 3>& bary, int slab, double s) {
    SpaceTimeField::Sample e{0.0, {0.0, 0.0}};
    if (u) e = u->sample(mesh, t, bary, slab, s);
    if (exact) {
      const Point p = mesh.map(t, bary);
      const double time = grid.node(slab) + s * tau;
      e.value -= exact->value(time, p.x, p.y);
      if (exact->gradient) {
        const Point g = exact->gradient(time, p.x, p.y);
        e.gradient.x -= g.x;
        e.gradient.y -= g.y;
      }
    }
    return e;
  };

  switch (window.kind) {
    case NormKind::L2L2:
    case NormKind::L2H1: {
      const bool with_gradient = window.kind == NormKind::L2H1;
      require(!with_gradient || !exact || static_cast<bool>(exact->gradient), ErrorKind::InvalidArgument,
              "L2H1 needs the gradient of the exact field");
      double total = 0.0;
      for (int k = k_begin; k < k_end; ++k) {
        for (const auto& tq : quadrature::gauss3()) {
          double slab_sum = 0.0;
          for (int t : triangles) {
            double tri_sum = 0.0;
            for (const auto& q : quadrature::triangle_order5()) {
              const auto e = sample(t, q.bary, k, tq.s);
              double integrand = e.value * e.value;
              if (with_gradient) integrand += e.gradient.x * e.gradient.x + e.gradient.y * e.gradient.y;
              tri_sum += q.weight * integrand;
            }
            slab_sum += mesh.area(t) * tri_sum;
          }
          total += tq.weight * tau * slab_sum;
        }
      }
      return std::sqrt(total);
    }
    case NormKind::CinT_L2: {
      double worst = 0.0;
      for (int k = k_begin; k <= k_end; ++k) {
        const int slab = std::min(k, grid.slabs() - 1);
        const double s = k == grid.slabs() ? 1.0 : 0.0;
        double total = 0.0;
        for (int t : triangles) {
          double tri_sum = 0.0;
          for (const auto& q : quadrature::triangle_order5()) {
            const auto e = sample(t, q.bary, slab, s);
            tri_sum += q.weight * e.value * e.value;
          }
          total += mesh.area(t) * tri_sum;
        }
        worst = std::max(worst, std::sqrt(total));
      }
      return worst;
    }
    case NormKind::H1Hm1: {
      require(window.region.is_unit_square(), ErrorKind::InvalidArgument, "H1Hm1 is only measured on the unit square");
      require(!u || u->basis() == TimeBasis::P1Continuous, ErrorKind::InvalidArgument,
              "H1Hm1 needs a P1Continuous field");
      require(!exact || static_cast<bool>(exact->time_derivative), ErrorKind::InvalidArgument,
              "H1Hm1 needs the time derivative of the exact field");
      std::optional<DirichletLaplacian> owned;
      if (!laplacian) laplacian = &owned.emplace(mesh);
      const DofMap& dofs = laplacian->dofs();
      double total = 0.0;
      for (int k = k_begin; k < k_end; ++k) {
        Eigen::VectorXd discrete_rate;
        if (u) discrete_rate = u->slab_derivative(k);
        for (const auto& tq : quadrature::gauss3()) {
          const double time = grid.node(k) + tq.s * tau;
          Eigen::VectorXd functional = Eigen::VectorXd::Zero(dofs.size());
          for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto& tri = mesh.triangles()[t];
            for (const auto& q : quadrature::triangle_order5()) {
              double rate = 0.0;
              if (u) {
                for (int j = 0; j < 3; ++j) rate += q.bary[j] * discrete_rate[tri[j]];
              }
              if (exact) {
                const Point p = mesh.map(t, q.bary);
                rate -= exact->time_derivative(time, p.x, p.y);
              }
              for (int j = 0; j < 3; ++j) {
                const int d = dofs.dof(tri[j]);
                if (d >= 0) functional[d] += mesh.area(t) * q.weight * rate * q.bary[j];
              }
            }
          }
          total += tq.weight * tau * laplacian->dual_norm_squared(functional);
        }
      }
      return std::sqrt(total);
    }
  }
  return 0.0;
}

}  // namespace heatda
