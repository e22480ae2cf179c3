#include "hessfem/bench/benchmark.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "hessfem/implicit/engine.hpp"

namespace hessfem::bench {

namespace {

using hessfem::ad::exp;
using fem::Side;

double gaussian_bump(double x1, double x2) {
  const double dx = x1 - 0.5, dy = x2 - 0.5;
  return 10.0 * std::exp(-(dx * dx + dy * dy) / 0.02);
}

fem::Mesh make_mesh(std::int32_t nx, std::int32_t ny) {
  return fem::build_unit_square_mesh(
      nx, ny, {{Side::Left, Side::Right}, [](double, double) { return 0.0; }},
      {{Side::Bottom, Side::Top}});
}

// 0.5 (u - u_obs)^2 + 0.5 alpha theta^2 with u_obs in the data slot.
fem::ScalarDensity misfit_density(double alpha) {
  fem::ScalarDensity dens;
  dens.n_extra = 1;
  dens.density = ad::KernelFunction(
      4, 1, [alpha](auto in, std::span<const double> data, auto out) {
        auto mis = in[2] - data[2];
        out[0] = 0.5 * (mis * mis) + (0.5 * alpha) * (in[3] * in[3]);
      });
  return dens;
}

// flux = grad u, source = -theta: the parameter field is the volume load.
fem::WeakFormKernel source_id_kernel() {
  fem::WeakFormKernel k;
  k.n_extra = 0;
  k.volume = ad::KernelFunction(
      4, 3, [](auto in, std::span<const double>, auto out) {
        out[0] = in[0];
        out[1] = in[1];
        out[2] = -in[3];
      });
  return k;
}

// flux = exp(theta u) grad u, source = -b with b in the data slot, plus a
// sinusoidal traction on the loaded edges.
fem::WeakFormKernel nonlinear_kernel() {
  fem::WeakFormKernel k;
  k.n_extra = 1;
  k.volume = ad::KernelFunction(
      4, 3, [](auto in, std::span<const double> data, auto out) {
        using S = typename std::remove_cvref_t<decltype(out)>::element_type;
        S c = exp(in[3] * in[2]);
        out[0] = c * in[0];
        out[1] = c * in[1];
        out[2] = S(-data[2]);
      });
  k.traction = [](double x1, double) { return std::sin(5.0 * x1); };
  return k;
}

// Observations are expensive to regenerate and must be identical across
// every instance of the same (name, nx, ny), so the first forward solve is
// kept for the life of the process.
const std::vector<double>& observation_for(
    const std::string& name, std::int32_t nx, std::int32_t ny,
    const implicit::FemProblem& problem, const std::vector<double>& theta_ref) {
  static std::mutex mu;
  static std::map<std::tuple<std::string, std::int32_t, std::int32_t>,
                  std::vector<double>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(name, nx, ny);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, implicit::solve_forward(problem, theta_ref)).first;
  return it->second;
}

}  // namespace

std::uint64_t fnv1a_hash(const std::vector<double>& values) {
  std::uint64_t h = 1469598103934665603ull;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  return h;
}

Benchmark make_benchmark(const std::string& name, std::int32_t nx,
                         std::int32_t ny, double alpha) {
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("make_benchmark: mesh sizes must be positive");
  if (alpha < 0.0)
    throw std::invalid_argument("make_benchmark: alpha must be nonnegative");

  fem::Mesh mesh = make_mesh(nx, ny);
  const std::size_t m = static_cast<std::size_t>(4) * mesh.n_elements();

  fem::WeakFormKernel kernel;
  std::vector<double> kernel_data;
  std::vector<double> theta_ref;
  if (name == "source-id") {
    kernel = source_id_kernel();
    theta_ref = fem::interpolate_to_quad(mesh, gaussian_bump);
  } else if (name == "model-nonlinear-id") {
    kernel = nonlinear_kernel();
    kernel_data = fem::interpolate_to_quad(mesh, gaussian_bump);
    theta_ref.assign(m, 1.0);
  } else {
    throw std::invalid_argument("make_benchmark: unknown benchmark \"" + name +
                                "\"");
  }

  Benchmark b;
  b.problem = std::make_shared<implicit::FemProblem>(
      std::move(mesh), std::move(kernel), misfit_density(alpha),
      std::move(kernel_data), std::vector<double>(m, 0.0));

  b.spec.name = name;
  b.spec.nx = nx;
  b.spec.ny = ny;
  b.spec.alpha = alpha;
  b.spec.theta_ref = theta_ref;
  b.spec.y_obs = observation_for(name, nx, ny, *b.problem, theta_ref);
  b.spec.y_obs_hash = fnv1a_hash(b.spec.y_obs);
  b.problem->set_objective_data(
      fem::nodal_to_quad(b.problem->mesh(), b.spec.y_obs));
  return b;
}

}  // namespace hessfem::bench
