#include "heatda/spaces.hpp"

#include <cmath>

#include <fmt/format.h>

#include "heatda/error.hpp"
#include "heatda/forms.hpp"
#include "heatda/quadrature.hpp"

namespace heatda {

DofMap::DofMap(const TriMesh& mesh, SpaceKind kind) : kind_(kind) {
  dof_of_vertex_.assign(mesh.num_vertices(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (kind == SpaceKind::Dirichlet && mesh.is_boundary(v)) continue;
    dof_of_vertex_[v] = static_cast<int>(vertex_of_dof_.size());
    vertex_of_dof_.push_back(v);
  }
}

TimeGrid::TimeGrid(double final_time, int slabs) : final_time_(final_time), slabs_(slabs) {
  require(final_time > 0.0, ErrorKind::InvalidArgument, "final time must be positive");
  require(slabs >= 1, ErrorKind::InvalidArgument, "time grid needs at least one slab");
}

int TimeGrid::node_index(double t) const {
  const double scaled = t / tau();
  const double k = std::round(scaled);
  if (k < 0 || k > slabs_) return -1;
  return std::abs(scaled - k) <= 1e-12 * std::max(1.0, static_cast<double>(slabs_)) ? static_cast<int>(k) : -1;
}

SpaceTimeField::SpaceTimeField(TimeBasis basis, DofMap dofs, TimeGrid grid)
    : basis_(basis), dofs_(std::move(dofs)), grid_(grid) {
  const int rows = basis == TimeBasis::P1Continuous ? grid_.slabs() + 1 : grid_.slabs();
  coeffs_ = Coefficients::Zero(rows, dofs_.size());
}

Eigen::VectorXd SpaceTimeField::vertex_values(int row) const {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(dofs_.num_vertices());
  for (int d = 0; d < dofs_.size(); ++d) values[dofs_.vertex(d)] = coeffs_(row, d);
  return values;
}

SpaceTimeField::Sample SpaceTimeField::sample(const TriMesh& mesh, int t, const std::array<double, 3>& bary,
                                              int slab, double s) const {
  const auto& tri = mesh.triangles()[t];
  const auto& grads = mesh.basis_gradients(t);
  Sample out{0.0, {0.0, 0.0}};
  for (int k = 0; k < 3; ++k) {
    const int d = dofs_.dof(tri[k]);
    if (d < 0) continue;
    const double c = basis_ == TimeBasis::P1Continuous
                         ? (1.0 - s) * coeffs_(slab, d) + s * coeffs_(slab + 1, d)
                         : coeffs_(slab, d);
    out.value += bary[k] * c;
    out.gradient.x += c * grads[k].x;
    out.gradient.y += c * grads[k].y;
  }
  return out;
}

Eigen::VectorXd SpaceTimeField::slab_derivative(int slab) const {
  require(basis_ == TimeBasis::P1Continuous, ErrorKind::InvalidArgument,
          "time derivative needs a P1Continuous field");
  return (vertex_values(slab + 1) - vertex_values(slab)) / grid_.tau();
}

Eigen::VectorXd nodal_interpolate(const std::function<double(double, double)>& f, const TriMesh& mesh,
                                  const DofMap& dofs) {
  Eigen::VectorXd values(dofs.size());
  for (int d = 0; d < dofs.size(); ++d) {
    const Point p = mesh.vertices()[dofs.vertex(d)];
    values[d] = f(p.x, p.y);
  }
  return values;
}

SpaceTimeField nodal_interpolate(const SpaceTimeFunction& f, const TriMesh& mesh, const TimeGrid& grid,
                                 SpaceKind kind, TimeBasis basis) {
  SpaceTimeField field(basis, DofMap(mesh, kind), grid);
  const DofMap& dofs = field.dofs();
  for (int row = 0; row < field.time_rows(); ++row) {
    const double t = basis == TimeBasis::P1Continuous ? grid.node(row) : grid.midpoint(row);
    if (kind == SpaceKind::Dirichlet) {
      for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!mesh.is_boundary(v)) continue;
        const Point p = mesh.vertices()[v];
        const double value = f(t, p.x, p.y);
        if (std::abs(value) > 1e-12) {
          fail(ErrorKind::BoundaryViolation,
               fmt::format("function is {:.3e} at boundary point ({}, {}), t = {}", value, p.x, p.y, t));
        }
      }
    }
    for (int d = 0; d < dofs.size(); ++d) {
      const Point p = mesh.vertices()[dofs.vertex(d)];
      field.coefficients()(row, d) = f(t, p.x, p.y);
    }
  }
  return field;
}

DirichletLaplacian::DirichletLaplacian(const TriMesh& mesh) : dofs_(mesh, SpaceKind::Dirichlet) {
  require(dofs_.size() > 0, ErrorKind::DegenerateMesh, "mesh has no interior vertices");
  stiffness_ = restrict_to(stiffness_matrix(mesh), dofs_, dofs_);
  factor_.compute(stiffness_);
  require(factor_.info() == Eigen::Success, ErrorKind::DegenerateMesh, "Dirichlet stiffness matrix is singular");
}

Eigen::VectorXd DirichletLaplacian::solve(const Eigen::VectorXd& rhs) const { return factor_.solve(rhs); }

double DirichletLaplacian::dual_norm_squared(const Eigen::VectorXd& functional) const {
  return functional.dot(factor_.solve(functional));
}

Eigen::VectorXd ritz_project(const SpatialFunction& f, const TriMesh& mesh) {
  DirichletLaplacian laplacian(mesh);
  return ritz_project(f, mesh, laplacian);
}

Eigen::VectorXd ritz_project(const SpatialFunction& f, const TriMesh& mesh, const DirichletLaplacian& laplacian) {
  const DofMap& dofs = laplacian.dofs();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& grads = mesh.basis_gradients(t);
    Point mean_grad{0.0, 0.0};
    for (const auto& q : quadrature::triangle_order5()) {
      const Point p = mesh.map(t, q.bary);
      const Point g = f.gradient(p.x, p.y);
      mean_grad.x += q.weight * g.x;
      mean_grad.y += q.weight * g.y;
    }
    for (int k = 0; k < 3; ++k) {
      const int d = dofs.dof(tri[k]);
      if (d < 0) continue;
      rhs[d] += mesh.area(t) * (mean_grad.x * grads[k].x + mean_grad.y * grads[k].y);
    }
  }
  return laplacian.solve(rhs);
}

SpaceTimeField time_derivative(const SpaceTimeField& u) {
  require(u.basis() == TimeBasis::P1Continuous, ErrorKind::InvalidArgument,
          "time derivative needs a P1Continuous field");
  SpaceTimeField out(TimeBasis::P0Slabwise, u.dofs(), u.grid());
  const double tau = u.grid().tau();
  for (int k = 0; k < u.grid().slabs(); ++k) {
    out.coefficients().row(k) = (u.coefficients().row(k + 1) - u.coefficients().row(k)) / tau;
  }
  return out;
}

}  // namespace heatda
