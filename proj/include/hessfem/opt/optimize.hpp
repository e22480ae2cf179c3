#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace hessfem::opt {

struct OptimizeSettings {
  int max_iter = 100;
  double grad_tol = 1e-8;     // on the max norm of the gradient
  int cg_max_iter = 0;        // inner CG cap; <= 0 means the dimension
  double cg_forcing = 0.5;
  int lbfgs_memory = 10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
};

enum class OptimizeStatus { Converged, MaxIterations, LineSearchFailure };

const char* to_string(OptimizeStatus s);

struct IterationRecord {
  int iter = 0;
  double elapsed_s = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;  // max norm
  int n_hvp_calls = 0;     // Hessian-vector products spent on this iterate
};

struct OptimizeResult {
  std::vector<double> theta;
  OptimizeStatus status = OptimizeStatus::MaxIterations;
  std::vector<IterationRecord> history;  // entry 0 is the starting point
};

using ObjectiveFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;
using HvpFn = std::function<std::vector<double>(std::span<const double>,
                                                std::span<const double>)>;

// Limited-memory BFGS with a strong Wolfe line search. Curvature pairs with
// non-positive s.y are dropped rather than damped. On a line-search failure
// the best accepted iterate is returned with the failure status.
OptimizeResult minimize_lbfgs(const ObjectiveFn& objective,
                              const GradientFn& gradient,
                              std::vector<double> theta0,
                              const OptimizeSettings& settings = {});

// Truncated Newton: inner conjugate gradients on  H d = -g  stopped at the
// forcing tolerance min(cg_forcing, sqrt(|g|)) * |g| or at the first
// direction of non-positive curvature (falling back to steepest descent if
// that happens immediately), then a strong Wolfe line search.
OptimizeResult minimize_newton_cg(const ObjectiveFn& objective,
                                  const GradientFn& gradient, const HvpFn& hvp,
                                  std::vector<double> theta0,
                                  const OptimizeSettings& settings = {});

// One JSON object per record, lowercase snake_case keys.
void write_history_jsonl(const std::vector<IterationRecord>& history,
                         std::ostream& out);
// Header row, then one record per line.
void write_history_csv(const std::vector<IterationRecord>& history,
                       std::ostream& out);

}  // namespace hessfem::opt
