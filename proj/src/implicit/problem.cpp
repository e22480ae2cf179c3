#include "hessfem/implicit/problem.hpp"

#include <stdexcept>
#include <utility>

namespace hessfem::implicit {

FemProblem::FemProblem(fem::Mesh mesh, fem::WeakFormKernel kernel,
                       fem::ScalarDensity objective,
                       std::vector<double> kernel_data,
                       std::vector<double> objective_data)
    : mesh_(std::move(mesh)),
      kernel_(std::move(kernel)),
      density_(std::move(objective)),
      kernel_data_(std::move(kernel_data)),
      objective_data_(std::move(objective_data)) {
  const auto quads = static_cast<std::size_t>(4) * mesh_.n_elements();
  if (kernel_data_.size() != static_cast<std::size_t>(kernel_.n_extra) * quads)
    throw std::invalid_argument("implicit: kernel data size mismatch");
  if (objective_data_.size() !=
      static_cast<std::size_t>(density_.n_extra) * quads)
    throw std::invalid_argument("implicit: objective data size mismatch");
}

void FemProblem::set_objective_data(std::vector<double> data) {
  const auto quads = static_cast<std::size_t>(4) * mesh_.n_elements();
  if (data.size() != static_cast<std::size_t>(density_.n_extra) * quads)
    throw std::invalid_argument("implicit: objective data size mismatch");
  objective_data_ = std::move(data);
}

std::int64_t FemProblem::n_state() const { return mesh_.n_nodes(); }

std::int64_t FemProblem::n_param() const {
  return static_cast<std::int64_t>(4) * mesh_.n_elements();
}

std::vector<double> FemProblem::initial_state() const {
  std::vector<double> y(mesh_.nodes.size(), 0.0);
  for (std::size_t i = 0; i < mesh_.dirichlet_nodes.size(); ++i)
    y[mesh_.dirichlet_nodes[i]] = mesh_.dirichlet_values[i];
  return y;
}

std::vector<double> FemProblem::residual(std::span<const double> y,
                                         std::span<const double> theta) const {
  return fem::assemble_residual(mesh_, kernel_, y, theta, kernel_data_);
}

sparse::SparseMatrix FemProblem::jacobian(std::span<const double> y,
                                          std::span<const double> theta) const {
  return fem::assemble_jacobian(mesh_, kernel_, y, theta, kernel_data_);
}

double FemProblem::objective(std::span<const double> y,
                             std::span<const double> theta) const {
  return fem::integrate_scalar(mesh_, density_, y, theta, objective_data_);
}

std::pair<std::vector<double>, std::vector<double>>
FemProblem::objective_gradients(std::span<const double> y,
                                std::span<const double> theta) const {
  return fem::density_gradients(mesh_, density_, y, theta, objective_data_);
}

std::vector<double> FemProblem::residual_jvp_theta(
    std::span<const double> y, std::span<const double> theta,
    std::span<const double> that) const {
  return fem::residual_jvp_theta(mesh_, kernel_, y, theta, kernel_data_, that);
}

std::vector<double> FemProblem::residual_vjp_theta(
    std::span<const double> y, std::span<const double> theta,
    std::span<const double> multiplier) const {
  return fem::residual_vjp_theta(mesh_, kernel_, y, theta, kernel_data_,
                                 multiplier);
}

std::vector<double> FemProblem::second_order(std::span<const double> y,
                                             std::span<const double> theta,
                                             const HessianBlockRequest& request,
                                             std::span<const double> seed) const {
  fem::SecondOrderRequest femreq;
  femreq.density = request.include_objective ? &density_ : nullptr;
  femreq.density_data = objective_data_;
  femreq.multiplier = request.multiplier;
  femreq.seed_slot = request.seed_slot;
  femreq.out_slot = request.out_slot;
  femreq.mode = request.mode;
  const fem::WeakFormKernel* k =
      request.multiplier.empty() ? nullptr : &kernel_;
  return fem::assemble_second_order(mesh_, k, kernel_data_, y, theta, femreq,
                                    seed);
}

}  // namespace hessfem::implicit
