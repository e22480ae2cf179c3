#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hessfem/implicit/problem.hpp"

namespace hessfem::bench {

// Everything needed to rebuild or audit a benchmark instance. The
// observation vector is the forward solution at theta_ref, generated once
// per (name, nx, ny) and reused bit for bit by later instances; the hash
// identifies that snapshot in manifests.
struct BenchmarkSpec {
  std::string name;
  std::int32_t nx = 0;
  std::int32_t ny = 0;
  double alpha = 0.0;
  std::vector<double> theta_ref;  // quadrature-point field, length M
  std::vector<double> y_obs;      // nodal observation, length N
  std::uint64_t y_obs_hash = 0;   // FNV-1a over the y_obs bytes
};

struct Benchmark {
  std::shared_ptr<implicit::FemProblem> problem;
  BenchmarkSpec spec;
};

// "source-id": linear diffusion, the parameter field is the volumetric
// source, homogeneous Dirichlet walls left and right, zero flux top and
// bottom. The reference source is a Gaussian bump centered in the domain.
//
// "model-nonlinear-id": diffusion with conductivity exp(theta * u), the
// parameter field is the exponent; the Gaussian bump drives the volume term
// as fixed data, a sinusoidal traction loads the top and bottom edges, and
// the reference parameter field is identically one.
//
// Both minimize the misfit against the stored observation plus a quadratic
// Tikhonov term weighted by alpha. Unknown names are rejected.
Benchmark make_benchmark(const std::string& name, std::int32_t nx,
                         std::int32_t ny, double alpha = 1e-6);

std::uint64_t fnv1a_hash(const std::vector<double>& values);

}  // namespace hessfem::bench
