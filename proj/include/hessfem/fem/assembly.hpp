#pragma once

#include <span>
#include <utility>
#include <vector>

#include "hessfem/ad/derivatives.hpp"
#include "hessfem/fem/kernels.hpp"
#include "hessfem/fem/mesh.hpp"
#include "hessfem/sparse/matrix.hpp"

namespace hessfem::fem {

enum class Slot { State, Param };

// Residual r(y, theta) of length n_nodes. Rows of constrained nodes are
// replaced by y_i - u_D,i, which keeps the system square and the Jacobian
// nonsingular. x_data holds n_extra doubles per quadrature point,
// element-major, appended to the point coordinates in the kernel data slot.
std::vector<double> assemble_residual(const Mesh& mesh,
                                      const WeakFormKernel& kernel,
                                      std::span<const double> y,
                                      std::span<const double> theta,
                                      std::span<const double> x_data);

// Exact dr/dy, built per element by tangent seeding of each local degree of
// freedom. Constrained rows are exact identity rows.
sparse::SparseMatrix assemble_jacobian(const Mesh& mesh,
                                       const WeakFormKernel& kernel,
                                       std::span<const double> y,
                                       std::span<const double> theta,
                                       std::span<const double> x_data);

// (dr/dtheta) . that, length n_nodes. Constrained rows do not depend on
// theta and come back exactly zero.
std::vector<double> residual_jvp_theta(const Mesh& mesh,
                                       const WeakFormKernel& kernel,
                                       std::span<const double> y,
                                       std::span<const double> theta,
                                       std::span<const double> x_data,
                                       std::span<const double> that);

// multiplier^T (dr/dtheta), length M. The multiplier is zeroed at
// constrained rows internally, matching the replaced-row residual.
std::vector<double> residual_vjp_theta(const Mesh& mesh,
                                       const WeakFormKernel& kernel,
                                       std::span<const double> y,
                                       std::span<const double> theta,
                                       std::span<const double> x_data,
                                       std::span<const double> multiplier);

double integrate_scalar(const Mesh& mesh, const ScalarDensity& density,
                        std::span<const double> y,
                        std::span<const double> theta,
                        std::span<const double> x_data);

// Gradient of the integrated density with respect to both inputs, one
// reverse sweep per element: first the node gradient (length n_nodes), then
// the parameter gradient (length M).
std::pair<std::vector<double>, std::vector<double>> density_gradients(
    const Mesh& mesh, const ScalarDensity& density, std::span<const double> y,
    std::span<const double> theta, std::span<const double> x_data);

// Directional second derivative of the element-summed scalar
//   F(y, theta) = integral of density + multiplier^T r(y, theta)
// seeded in one input slot and read in another. Either part may be absent:
// a null density skips the objective term, an empty multiplier skips the
// residual term. The seed length matches seed_slot, the result length
// matches out_slot. Node components of the result include constrained nodes;
// the multiplier is masked at constrained rows as in residual_vjp_theta.
struct SecondOrderRequest {
  const ScalarDensity* density = nullptr;
  std::span<const double> density_data = {};
  std::span<const double> multiplier = {};
  Slot seed_slot = Slot::State;
  Slot out_slot = Slot::Param;
  ad::Mode mode = ad::Mode::RevOverFwd;
};

std::vector<double> assemble_second_order(const Mesh& mesh,
                                          const WeakFormKernel* kernel,
                                          std::span<const double> x_data,
                                          std::span<const double> y,
                                          std::span<const double> theta,
                                          const SecondOrderRequest& request,
                                          std::span<const double> seed);

// Field parameter layout: f evaluated at the physical coordinates of every
// quadrature point, element-major.
std::vector<double> interpolate_to_quad(
    const Mesh& mesh, const std::function<double(double, double)>& f);

// Nodal field sampled at every quadrature point through the bilinear basis,
// same layout as interpolate_to_quad.
std::vector<double> nodal_to_quad(const Mesh& mesh,
                                  std::span<const double> nodal);

// Surface load vector: integral of t * phi_i over the Neumann facets.
std::vector<double> neumann_load(
    const Mesh& mesh, const std::function<double(double, double)>& traction);

}  // namespace hessfem::fem
