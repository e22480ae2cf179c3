#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hessfem/implicit/problem.hpp"
#include "hessfem/sparse/factorization.hpp"

namespace hessfem::implicit {

// Reusable cache for repeated derivative queries at the same parameter
// vector. Managed by the engine; valid only while theta matches the cached
// copy bit for bit. The factorization is of the Jacobian at the converged
// state, shared by the adjoint and both incremental solves.
struct HvpWorkspace {
  std::vector<double> theta;
  std::vector<double> state;
  std::vector<double> adjoint;
  std::optional<sparse::Factorization> factorization;
  bool has_state = false;
  bool has_adjoint = false;
  int n_forward_solves = 0;
  int n_adjoint_solves = 0;
};

// Newton with full steps and residual-decrease fallback halving. Throws
// std::runtime_error if the residual norm does not meet
//   newton_tol * max(1, initial norm)
// within max_newton_iter corrections, or if a correction cannot reduce the
// norm within max_halvings halvings.
std::vector<double> solve_forward(const ImplicitProblem& p,
                                  std::span<const double> theta);

// lambda solving  (dr/dy)^T lambda = -(dg/dy)^T  at the converged state y.
std::vector<double> solve_adjoint(const ImplicitProblem& p,
                                  std::span<const double> theta,
                                  std::span<const double> y);

// Objective at the solution of r(y, theta) = 0.
double objective_value(const ImplicitProblem& p, std::span<const double> theta,
                       HvpWorkspace& ws);
double objective_value(const ImplicitProblem& p, std::span<const double> theta);

// Total derivative of the reduced objective theta -> g(y(theta), theta):
//   dg/dtheta + lambda^T dr/dtheta.
std::vector<double> gradient(const ImplicitProblem& p,
                             std::span<const double> theta, HvpWorkspace& ws);
std::vector<double> gradient(const ImplicitProblem& p,
                             std::span<const double> theta);

// Exact Hessian-vector product of the reduced objective. Solves the
// incremental forward and incremental adjoint systems on the cached
// factorization and combines the second-order contractions of
// g + lambda^T r; every term is an element-level nested-derivative pass, no
// matrix larger than the Jacobian is formed.
std::vector<double> hvp(const ImplicitProblem& p, std::span<const double> theta,
                        std::span<const double> theta_hat, HvpWorkspace& ws);
std::vector<double> hvp(const ImplicitProblem& p, std::span<const double> theta,
                        std::span<const double> theta_hat);

// Central-difference Hessian-vector product
//   (gradient(theta + h that) - gradient(theta - h that)) / (2h),
// each gradient from a fresh solve.
std::vector<double> fd_hvp(const ImplicitProblem& p,
                           std::span<const double> theta,
                           std::span<const double> theta_hat, double h = 1e-3);

// Dense reduced Hessian, column by column via hvp on a shared workspace.
// Row-major n_param x n_param; refuses n_param > 512.
std::vector<double> full_hessian(const ImplicitProblem& p,
                                 std::span<const double> theta);

}  // namespace hessfem::implicit
