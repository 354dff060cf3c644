#include "heatda/solutions.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "heatda/error.hpp"
#include "heatda/quadrature.hpp"

namespace heatda {

namespace {

constexpr double pi = std::numbers::pi;

double sxsy(double x, double y) { return std::sin(pi * x) * std::sin(pi * y); }
double cxsy(double x, double y) { return std::cos(pi * x) * std::sin(pi * y); }
double sxcy(double x, double y) { return std::sin(pi * x) * std::cos(pi * y); }
double cxcy(double x, double y) { return std::cos(pi * x) * std::cos(pi * y); }

// u = a(t) sin(pi x) sin(pi y).
ManufacturedSolution separable_sine(std::string id, std::function<double(double)> a,
                                    std::function<double(double)> a_t, ManufacturedSolution::Fn f) {
  ManufacturedSolution s;
  s.id = std::move(id);
  s.u = [a](double t, double x, double y) { return a(t) * sxsy(x, y); };
  s.u_t = [a_t](double t, double x, double y) { return a_t(t) * sxsy(x, y); };
  s.u_x = [a](double t, double x, double y) { return pi * a(t) * cxsy(x, y); };
  s.u_y = [a](double t, double x, double y) { return pi * a(t) * sxcy(x, y); };
  s.u_tx = [a_t](double t, double x, double y) { return pi * a_t(t) * cxsy(x, y); };
  s.u_ty = [a_t](double t, double x, double y) { return pi * a_t(t) * sxcy(x, y); };
  s.u_xx = [a](double t, double x, double y) { return -pi * pi * a(t) * sxsy(x, y); };
  s.u_yy = s.u_xx;
  s.u_xy = [a](double t, double x, double y) { return pi * pi * a(t) * cxcy(x, y); };
  s.f = std::move(f);
  s.boundary_compatible = true;
  return s;
}

std::vector<ManufacturedSolution> make_builtins() {
  std::vector<ManufacturedSolution> all;

  all.push_back(separable_sine(
      "S1", [](double t) { return std::exp(-2.0 * pi * pi * t); },
      [](double t) { return -2.0 * pi * pi * std::exp(-2.0 * pi * pi * t); },
      [](double, double, double) { return 0.0; }));

  all.push_back(separable_sine(
      "S2", [](double t) { return 1.0 + t; }, [](double) { return 1.0; },
      [](double t, double x, double y) { return sxsy(x, y) * (1.0 + 2.0 * pi * pi * (1.0 + t)); }));

  {
    ManufacturedSolution s;
    s.id = "U1";
    auto e = [](double t, double x, double) { return std::exp(x + t); };
    auto zero = [](double, double, double) { return 0.0; };
    s.u = e;
    s.u_t = e;
    s.u_x = e;
    s.u_y = zero;
    s.u_tx = e;
    s.u_ty = zero;
    s.u_xx = e;
    s.u_xy = zero;
    s.u_yy = zero;
    s.f = zero;
    s.boundary_compatible = false;
    all.push_back(std::move(s));
  }
  {
    ManufacturedSolution s;
    s.id = "U2";
    auto zero = [](double, double, double) { return 0.0; };
    auto two = [](double, double, double) { return 2.0; };
    s.u = [](double t, double x, double y) { return x * x + y * y + 4.0 * t; };
    s.u_t = [](double, double, double) { return 4.0; };
    s.u_x = [](double, double x, double) { return 2.0 * x; };
    s.u_y = [](double, double, double y) { return 2.0 * y; };
    s.u_tx = zero;
    s.u_ty = zero;
    s.u_xx = two;
    s.u_xy = zero;
    s.u_yy = two;
    s.f = zero;
    s.boundary_compatible = false;
    all.push_back(std::move(s));
  }
  return all;
}

}  // namespace

ExactField ManufacturedSolution::exact() const {
  ExactField field;
  field.value = u;
  field.gradient = [ux = u_x, uy = u_y](double t, double x, double y) { return Point{ux(t, x, y), uy(t, x, y)}; };
  field.time_derivative = u_t;
  return field;
}

double ManufacturedSolution::heat_residual(double t, double x, double y) const {
  return u_t(t, x, y) - u_xx(t, x, y) - u_yy(t, x, y) - f(t, x, y);
}

const std::vector<ManufacturedSolution>& builtin_solutions() {
  static const std::vector<ManufacturedSolution> all = make_builtins();
  return all;
}

const ManufacturedSolution& find_solution(const std::string& id) {
  for (const auto& s : builtin_solutions()) {
    if (s.id == id) return s;
  }
  fail(ErrorKind::InvalidArgument, fmt::format("unknown manufactured solution '{}'", id));
}

ManufacturedSolution zero_solution() {
  ManufacturedSolution s;
  s.id = "zero";
  auto zero = [](double, double, double) { return 0.0; };
  s.u = s.u_t = s.u_x = s.u_y = s.u_tx = s.u_ty = s.u_xx = s.u_xy = s.u_yy = s.f = zero;
  s.boundary_compatible = true;
  return s;
}

SolutionNorms solution_norms(const ManufacturedSolution& solution, const TriMesh& mesh, const TimeGrid& grid) {
  double l2 = 0, grad = 0, dt = 0, dt_grad = 0, hess = 0, f2 = 0;
  const double tau = grid.tau();
  for (int k = 0; k < grid.slabs(); ++k) {
    for (const auto& tq : quadrature::gauss3()) {
      const double t = grid.node(k) + tq.s * tau;
      const double wt = tq.weight * tau;
      for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        for (const auto& q : quadrature::triangle_order5()) {
          const Point p = mesh.map(tri, q.bary);
          const double w = wt * mesh.area(tri) * q.weight;
          const double ux = solution.u_x(t, p.x, p.y), uy = solution.u_y(t, p.x, p.y);
          const double utx = solution.u_tx(t, p.x, p.y), uty = solution.u_ty(t, p.x, p.y);
          const double uxx = solution.u_xx(t, p.x, p.y), uxy = solution.u_xy(t, p.x, p.y);
          const double uyy = solution.u_yy(t, p.x, p.y);
          l2 += w * std::pow(solution.u(t, p.x, p.y), 2);
          grad += w * (ux * ux + uy * uy);
          dt += w * std::pow(solution.u_t(t, p.x, p.y), 2);
          dt_grad += w * (utx * utx + uty * uty);
          hess += w * (uxx * uxx + 2.0 * uxy * uxy + uyy * uyy);
          f2 += w * std::pow(solution.f(t, p.x, p.y), 2);
        }
      }
    }
  }
  SolutionNorms norms;
  norms.l2 = std::sqrt(l2);
  norms.norm_0_1 = std::sqrt(l2 + grad);
  norms.norm_0_2 = std::sqrt(l2 + grad + hess);
  norms.norm_1_1 = std::sqrt(l2 + grad + dt + dt_grad);
  norms.f_l2 = std::sqrt(f2);
  return norms;
}

}  // namespace heatda
