#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hessfem/ad/kernel.hpp"

namespace hessfem::fem {

// One value per mesh node.
using StateVector = std::vector<double>;
// One value per quadrature point, element-major then point order, so
// length = n_elements * 4.
using ParamVector = std::vector<double>;

// Volumetric weak-form integrand. The kernel maps
//   in  = [du/dx1, du/dx2, u, theta_q]
//   data = [x1, x2, extras...]
//   out = [flux1, flux2, source]
// and the assembled residual row for test function phi_i collects
//   flux . grad(phi_i) + source * phi_i
// over the volume, minus the surface traction term. The traction never
// depends on the state or parameters, so it stays a plain coordinate
// function.
struct WeakFormKernel {
  ad::KernelFunction volume;
  std::int32_t n_extra = 0;  // per-point doubles appended after x1, x2
  std::function<double(double, double)> traction;  // null means zero
};

// Scalar integrand with the same slot and data conventions as the
// weak-form kernel, out = [density].
struct ScalarDensity {
  ad::KernelFunction density;
  std::int32_t n_extra = 0;
};

}  // namespace hessfem::fem
