#include "hessfem/bench/bakeoff.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hessfem/bench/verify.hpp"
#include "hessfem/fem/io.hpp"
#include "hessfem/implicit/engine.hpp"

namespace hessfem::bench {

namespace {

constexpr std::uint64_t kInitialGuessStream = 0x1717;

bool known_optimizer(const std::string& name) {
  return std::find(std::begin(kOptimizerNames), std::end(kOptimizerNames),
                   name) != std::end(kOptimizerNames);
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out.flush())
    throw std::runtime_error("short write to " + path.string());
}

}  // namespace

std::vector<double> initial_guess(const Benchmark& benchmark,
                                  std::uint64_t seed) {
  const std::size_t m =
      static_cast<std::size_t>(benchmark.problem->n_param());
  if (benchmark.spec.name == "source-id") return std::vector<double>(m, 0.0);
  // The reference field is constant, so starting exactly there would make
  // the run trivial; a seeded 10% perturbation keeps it honest.
  std::vector<double> theta(m);
  seeded_normal(theta, seed, kInitialGuessStream);
  for (double& v : theta) v = 1.0 + 0.1 * v;
  return theta;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  nlohmann::json j;
  j["benchmark"] = m.benchmark;
  j["nx"] = m.nx;
  j["ny"] = m.ny;
  j["alpha"] = m.alpha;
  j["optimizer"] = m.optimizer;
  j["seed"] = m.seed;
  j["settings"] = {
      {"max_iter", m.settings.max_iter},
      {"grad_tol", m.settings.grad_tol},
      {"cg_max_iter", m.settings.cg_max_iter},
      {"cg_forcing", m.settings.cg_forcing},
      {"lbfgs_memory", m.settings.lbfgs_memory},
      {"wolfe_c1", m.settings.wolfe_c1},
      {"wolfe_c2", m.settings.wolfe_c2},
  };
  j["fd_h"] = m.fd_h;
  j["y_obs_hash"] = m.y_obs_hash;
  j["status"] = m.status;
  j["initial_objective"] = m.initial_objective;
  j["final_objective"] = m.final_objective;
  j["n_iterations"] = m.n_iterations;
  j["history_jsonl"] = m.history_jsonl;
  j["history_csv"] = m.history_csv;
  j["theta_path"] = m.theta_path;
  j["predicted_path"] = m.predicted_path;
  j["observed_path"] = m.observed_path;
  write_text_file(path, j.dump(2) + "\n");
}

RunManifest run_one_optimizer(const Benchmark& benchmark,
                              const std::string& optimizer,
                              const BakeoffSettings& settings,
                              const std::filesystem::path& out_dir) {
  if (!known_optimizer(optimizer))
    throw std::invalid_argument("run_one_optimizer: unknown optimizer \"" +
                                optimizer + "\"");
  if (!(settings.fd_h > 0.0))
    throw std::invalid_argument("run_one_optimizer: fd_h must be positive");

  const implicit::ImplicitProblem& p = *benchmark.problem;
  const std::filesystem::path dir = out_dir / optimizer;
  std::filesystem::create_directories(dir);

  auto ws = std::make_shared<implicit::HvpWorkspace>();

  // A trial point whose forward solve diverges reads as an infinite
  // objective, which the line search backs away from; a curvature product
  // that cannot be evaluated reads as zero curvature, which truncates the
  // inner CG. Either way the run terminates with a status instead of
  // throwing.
  const opt::ObjectiveFn obj = [&p, ws](std::span<const double> th) {
    try {
      return implicit::objective_value(p, th, *ws);
    } catch (const std::runtime_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const opt::GradientFn grad = [&p, ws](std::span<const double> th) {
    try {
      return implicit::gradient(p, th, *ws);
    } catch (const std::runtime_error&) {
      return std::vector<double>(th.size(), 0.0);
    }
  };
  const opt::HvpFn hvp_ad = [&p, ws](std::span<const double> th,
                                     std::span<const double> v) {
    try {
      return implicit::hvp(p, th, v, *ws);
    } catch (const std::runtime_error&) {
      return std::vector<double>(v.size(), 0.0);
    }
  };
  const double fd_h = settings.fd_h;
  const opt::HvpFn hvp_fd = [&p, fd_h](std::span<const double> th,
                                       std::span<const double> v) {
    try {
      return implicit::fd_hvp(p, th, v, fd_h);
    } catch (const std::runtime_error&) {
      return std::vector<double>(v.size(), 0.0);
    }
  };

  std::vector<double> theta0 = initial_guess(benchmark, settings.seed);
  opt::OptimizeResult result;
  if (optimizer == "lbfgs")
    result = opt::minimize_lbfgs(obj, grad, std::move(theta0), settings.opt);
  else
    result = opt::minimize_newton_cg(
        obj, grad, optimizer == "newton-cg-ad" ? hvp_ad : hvp_fd,
        std::move(theta0), settings.opt);

  RunManifest m;
  m.benchmark = benchmark.spec.name;
  m.nx = benchmark.spec.nx;
  m.ny = benchmark.spec.ny;
  m.alpha = benchmark.spec.alpha;
  m.optimizer = optimizer;
  m.seed = settings.seed;
  m.settings = settings.opt;
  m.fd_h = settings.fd_h;
  m.y_obs_hash = benchmark.spec.y_obs_hash;
  m.status = opt::to_string(result.status);
  m.initial_objective = result.history.front().objective;
  m.final_objective = result.history.back().objective;
  m.n_iterations = result.history.back().iter;

  m.history_jsonl = (dir / "history.jsonl").string();
  m.history_csv = (dir / "history.csv").string();
  m.theta_path = (dir / "theta_final.txt").string();
  m.predicted_path = (dir / "u_predicted.txt").string();
  m.observed_path = (dir / "u_observed.txt").string();
  m.manifest_path = (dir / "manifest.json").string();

  {
    std::ofstream jsonl(m.history_jsonl);
    opt::write_history_jsonl(result.history, jsonl);
    std::ofstream csv(m.history_csv);
    opt::write_history_csv(result.history, csv);
  }

  fem::write_field_file(result.theta, m.theta_path);
  try {
    implicit::objective_value(p, result.theta, *ws);  // refresh cached state
    fem::write_field_file(ws->state, m.predicted_path);
  } catch (const std::runtime_error&) {
    // The returned iterate was solvable when it was accepted, so this is
    // unreachable in practice; an absent snapshot beats a stale one.
    m.predicted_path.clear();
  }
  fem::write_field_file(benchmark.spec.y_obs, m.observed_path);
  write_manifest(m, m.manifest_path);
  return m;
}

std::vector<RunManifest> run_optimizer_bakeoff(
    const Benchmark& benchmark, const std::vector<std::string>& optimizers,
    const BakeoffSettings& settings, const std::filesystem::path& out_dir) {
  if (optimizers.empty())
    throw std::invalid_argument("run_optimizer_bakeoff: no optimizers");
  for (const std::string& name : optimizers)
    if (!known_optimizer(name))
      throw std::invalid_argument(
          "run_optimizer_bakeoff: unknown optimizer \"" + name + "\"");

  std::filesystem::create_directories(out_dir);
  fem::write_nodes_file(benchmark.problem->mesh(), out_dir / "mesh_nodes.txt");
  fem::write_elements_file(benchmark.problem->mesh(),
                           out_dir / "mesh_elements.txt");

  std::vector<RunManifest> manifests;
  for (const std::string& name : optimizers)
    manifests.push_back(run_one_optimizer(benchmark, name, settings, out_dir));
  return manifests;
}

}  // namespace hessfem::bench
