#pragma once

#include <array>

namespace hessfem::fem {

inline constexpr double kGaussPoint = 0.57735026918962576450914878;  // 1/sqrt(3)
inline constexpr int kQuadPerElement = 4;

struct QuadratureRule {
  std::array<std::array<double, 2>, 4> points;
  std::array<double, 4> weights;
};

// 2x2 Gauss on the bi-unit square; weights sum to the reference area 4.
constexpr QuadratureRule gauss_2x2() {
  constexpr double a = kGaussPoint;
  return QuadratureRule{
      {{{-a, -a}, {a, -a}, {a, a}, {-a, a}}},
      {1.0, 1.0, 1.0, 1.0},
  };
}

// Bilinear shape functions on [-1,1]^2, numbered counterclockwise to match
// element node order.
struct FemBasis {
  static constexpr std::array<double, 4> shape_values(double xi, double eta) {
    return {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
            0.25 * (1 + xi) * (1 + eta), 0.25 * (1 - xi) * (1 + eta)};
  }
  static constexpr std::array<std::array<double, 2>, 4> shape_gradients(
      double xi, double eta) {
    return {{{-0.25 * (1 - eta), -0.25 * (1 - xi)},
             {0.25 * (1 - eta), -0.25 * (1 + xi)},
             {0.25 * (1 + eta), 0.25 * (1 + xi)},
             {-0.25 * (1 + eta), 0.25 * (1 - xi)}}};
  }
};

}  // namespace hessfem::fem
