#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hessfem/bench/benchmark.hpp"
#include "hessfem/opt/optimize.hpp"

namespace hessfem::bench {

inline constexpr const char* kOptimizerNames[] = {"lbfgs", "newton-cg-ad",
                                                  "newton-cg-fd"};

struct BakeoffSettings {
  opt::OptimizeSettings opt;
  double fd_h = 1e-3;      // step for the finite-difference curvature variant
  std::uint64_t seed = 0;  // initial-guess noise stream
};

// Record of one optimizer run, sufficient to reproduce it: problem identity,
// optimizer, seed, settings snapshot, observation hash, and where the
// artifacts were written. Serialized as JSON next to the logs.
struct RunManifest {
  std::string benchmark;
  std::int32_t nx = 0;
  std::int32_t ny = 0;
  double alpha = 0.0;
  std::string optimizer;
  std::uint64_t seed = 0;
  opt::OptimizeSettings settings;
  double fd_h = 0.0;
  std::uint64_t y_obs_hash = 0;
  std::string status;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int n_iterations = 0;
  std::string history_jsonl;
  std::string history_csv;
  std::string theta_path;
  std::string predicted_path;
  std::string observed_path;
  std::string manifest_path;
};

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path);

// Runs one optimizer on the benchmark from its canonical initial guess
// (all zeros for source-id, reference-plus-noise for model-nonlinear-id) and
// writes the iteration history (JSONL and CSV), the final parameter field,
// the predicted state at that field, and the observation, all under
// out_dir / optimizer. Solver breakdowns during a run surface as the
// returned status, never as an exception: objective evaluations that fail
// to converge report an infinite value to the line search, and curvature
// products that fail report zero curvature, which truncates the inner CG.
RunManifest run_one_optimizer(const Benchmark& benchmark,
                              const std::string& optimizer,
                              const BakeoffSettings& settings,
                              const std::filesystem::path& out_dir);

// All requested optimizers from the same initial guess, plus the mesh
// snapshot files at the root of out_dir.
std::vector<RunManifest> run_optimizer_bakeoff(
    const Benchmark& benchmark, const std::vector<std::string>& optimizers,
    const BakeoffSettings& settings, const std::filesystem::path& out_dir);

std::vector<double> initial_guess(const Benchmark& benchmark,
                                  std::uint64_t seed);

}  // namespace hessfem::bench
