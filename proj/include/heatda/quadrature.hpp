#pragma once

#include <array>
#include <cmath>
#include <span>

namespace heatda::quadrature {

/// Point of a triangle rule in barycentric coordinates; weights sum to one so
/// the integral over K is |K| * sum(w f).
struct TrianglePoint {
  std::array<double, 3> bary;
  double weight;
};

/// Edge-midpoint rule, exact for quadratics (products of P1 functions).
inline std::span<const TrianglePoint> triangle_order2() {
  static const std::array<TrianglePoint, 3> rule{{
      {{0.5, 0.5, 0.0}, 1.0 / 3.0},
      {{0.0, 0.5, 0.5}, 1.0 / 3.0},
      {{0.5, 0.0, 0.5}, 1.0 / 3.0},
  }};
  return rule;
}

/// Seven-point Radon rule, exact for polynomials of degree 5.
inline std::span<const TrianglePoint> triangle_order5() {
  static const std::array<TrianglePoint, 7> rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 - s15) / 21.0;
    const double b = (6.0 + s15) / 21.0;
    const double wa = (155.0 - s15) / 1200.0;
    const double wb = (155.0 + s15) / 1200.0;
    return std::array<TrianglePoint, 7>{{
        {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.225},
        {{a, a, 1.0 - 2.0 * a}, wa},
        {{a, 1.0 - 2.0 * a, a}, wa},
        {{1.0 - 2.0 * a, a, a}, wa},
        {{b, b, 1.0 - 2.0 * b}, wb},
        {{b, 1.0 - 2.0 * b, b}, wb},
        {{1.0 - 2.0 * b, b, b}, wb},
    }};
  }();
  return rule;
}

struct LinePoint {
  double s;  // position in [0, 1]
  double weight;
};

/// Three-point Gauss-Legendre on [0, 1], exact for degree 5.
inline std::span<const LinePoint> gauss3() {
  static const std::array<LinePoint, 3> rule = [] {
    const double d = 0.5 * std::sqrt(3.0 / 5.0);
    return std::array<LinePoint, 3>{{
        {0.5 - d, 5.0 / 18.0},
        {0.5, 8.0 / 18.0},
        {0.5 + d, 5.0 / 18.0},
    }};
  }();
  return rule;
}

}  // namespace heatda::quadrature
