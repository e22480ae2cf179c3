#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hessfem/ad/derivatives.hpp"
#include "hessfem/fem/assembly.hpp"
#include "hessfem/sparse/matrix.hpp"

namespace hessfem::implicit {

using fem::Slot;

struct SolverSettings {
  double newton_tol = 1e-10;  // relative to max(1, initial residual norm)
  int max_newton_iter = 20;
  int max_halvings = 10;
  ad::Mode hvp_mode = ad::Mode::RevOverFwd;
};

// One directional second-derivative evaluation of
//   F(y, theta) = objective(y, theta) + multiplier^T residual(y, theta)
// seeded in one input slot, read out in the other (or the same) slot.
// An empty multiplier drops the residual term; include_objective = false
// drops the objective term.
struct HessianBlockRequest {
  bool include_objective = false;
  std::span<const double> multiplier = {};
  Slot seed_slot = Slot::State;
  Slot out_slot = Slot::Param;
  ad::Mode mode = ad::Mode::RevOverFwd;
};

// A smooth equality-constrained program
//   min_theta  g(y, theta)  subject to  r(y, theta) = 0
// exposing the residual, its square Jacobian, the first-order parameter
// contractions, and seeded second-order contractions of g + lambda^T r.
// Everything the derivative engine does goes through this interface.
class ImplicitProblem {
 public:
  virtual ~ImplicitProblem() = default;

  virtual std::int64_t n_state() const = 0;
  virtual std::int64_t n_param() const = 0;

  // Starting point for the nonlinear solve; must satisfy any constraints
  // that are imposed by residual row replacement.
  virtual std::vector<double> initial_state() const = 0;

  virtual std::vector<double> residual(std::span<const double> y,
                                       std::span<const double> theta) const = 0;
  virtual sparse::SparseMatrix jacobian(std::span<const double> y,
                                        std::span<const double> theta) const = 0;

  virtual double objective(std::span<const double> y,
                           std::span<const double> theta) const = 0;
  // (dg/dy, dg/dtheta)
  virtual std::pair<std::vector<double>, std::vector<double>>
  objective_gradients(std::span<const double> y,
                      std::span<const double> theta) const = 0;

  // (dr/dtheta) . that, length n_state
  virtual std::vector<double> residual_jvp_theta(
      std::span<const double> y, std::span<const double> theta,
      std::span<const double> that) const = 0;
  // multiplier^T (dr/dtheta), length n_param
  virtual std::vector<double> residual_vjp_theta(
      std::span<const double> y, std::span<const double> theta,
      std::span<const double> multiplier) const = 0;

  virtual std::vector<double> second_order(std::span<const double> y,
                                           std::span<const double> theta,
                                           const HessianBlockRequest& request,
                                           std::span<const double> seed) const = 0;

  SolverSettings& settings() { return settings_; }
  const SolverSettings& settings() const { return settings_; }

 private:
  SolverSettings settings_;
};

// ImplicitProblem backed by the finite-element assembly: a weak-form kernel
// for the residual and an integrated density for the objective, each with
// its own per-quadrature-point data block.
class FemProblem final : public ImplicitProblem {
 public:
  FemProblem(fem::Mesh mesh, fem::WeakFormKernel kernel,
             fem::ScalarDensity objective, std::vector<double> kernel_data,
             std::vector<double> objective_data);

  const fem::Mesh& mesh() const { return mesh_; }
  std::span<const double> objective_data() const { return objective_data_; }
  void set_objective_data(std::vector<double> data);

  std::int64_t n_state() const override;
  std::int64_t n_param() const override;
  std::vector<double> initial_state() const override;
  std::vector<double> residual(std::span<const double> y,
                               std::span<const double> theta) const override;
  sparse::SparseMatrix jacobian(std::span<const double> y,
                                std::span<const double> theta) const override;
  double objective(std::span<const double> y,
                   std::span<const double> theta) const override;
  std::pair<std::vector<double>, std::vector<double>> objective_gradients(
      std::span<const double> y, std::span<const double> theta) const override;
  std::vector<double> residual_jvp_theta(
      std::span<const double> y, std::span<const double> theta,
      std::span<const double> that) const override;
  std::vector<double> residual_vjp_theta(
      std::span<const double> y, std::span<const double> theta,
      std::span<const double> multiplier) const override;
  std::vector<double> second_order(std::span<const double> y,
                                   std::span<const double> theta,
                                   const HessianBlockRequest& request,
                                   std::span<const double> seed) const override;

 private:
  fem::Mesh mesh_;
  fem::WeakFormKernel kernel_;
  fem::ScalarDensity density_;
  std::vector<double> kernel_data_;
  std::vector<double> objective_data_;
};

}  // namespace hessfem::implicit
