#include "hessfem/opt/optimize.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace hessfem::opt {

namespace {

using Clock = std::chrono::steady_clock;

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void validate(const OptimizeSettings& s) {
  if (!(0.0 < s.wolfe_c1 && s.wolfe_c1 < s.wolfe_c2 && s.wolfe_c2 < 1.0))
    throw std::invalid_argument(
        "optimize: Wolfe constants need 0 < c1 < c2 < 1");
  if (s.lbfgs_memory < 1)
    throw std::invalid_argument("optimize: lbfgs_memory must be at least 1");
  if (s.max_iter < 0)
    throw std::invalid_argument("optimize: max_iter must be non-negative");
  if (!(s.grad_tol >= 0.0))
    throw std::invalid_argument("optimize: grad_tol must be non-negative");
  if (!(s.cg_forcing > 0.0))
    throw std::invalid_argument("optimize: cg_forcing must be positive");
}

struct LineSearchOutcome {
  bool ok = false;
  std::vector<double> x;
  double f = 0.0;
  std::vector<double> g;
};

// Strong Wolfe conditions by bracketing and bisection zoom. phi(a) is the
// objective along x + a d; dphi0 must be negative on entry.
LineSearchOutcome wolfe_search(const ObjectiveFn& objective,
                               const GradientFn& gradient,
                               std::span<const double> x,
                               std::span<const double> d, double f0,
                               double dphi0, const OptimizeSettings& s) {
  LineSearchOutcome out;
  const std::size_t n = x.size();
  auto eval = [&](double a, double& f, std::vector<double>& g,
                  std::vector<double>& xa, double& dphi) {
    xa.resize(n);
    for (std::size_t i = 0; i < n; ++i) xa[i] = x[i] + a * d[i];
    f = objective(xa);
    g = gradient(xa);
    dphi = dot(g, d);
  };
  auto accept = [&](double f, std::vector<double>&& g, std::vector<double>&& xa) {
    out.ok = true;
    out.f = f;
    out.g = std::move(g);
    out.x = std::move(xa);
  };

  double a_lo = 0.0, f_lo = f0, dphi_lo = dphi0;
  double a_hi = 0.0, f_hi = 0.0;
  bool bracketed = false;

  double a_prev = 0.0, f_prev = f0;
  double a = 1.0;
  for (int tries = 0; tries < 20 && !bracketed; ++tries) {
    double f_a, dphi_a;
    std::vector<double> g_a, x_a;
    eval(a, f_a, g_a, x_a, dphi_a);
    if (f_a > f0 + s.wolfe_c1 * a * dphi0 || (tries > 0 && f_a >= f_prev)) {
      a_lo = a_prev;
      f_lo = f_prev;
      a_hi = a;
      f_hi = f_a;
      bracketed = true;
      break;
    }
    if (std::abs(dphi_a) <= -s.wolfe_c2 * dphi0) {
      accept(f_a, std::move(g_a), std::move(x_a));
      return out;
    }
    if (dphi_a >= 0.0) {
      a_lo = a;
      f_lo = f_a;
      a_hi = a_prev;
      f_hi = f_prev;
      bracketed = true;
      break;
    }
    a_prev = a;
    f_prev = f_a;
    a *= 2.0;
  }
  if (!bracketed) return out;

  (void)f_hi;
  (void)dphi_lo;
  for (int zooms = 0; zooms < 40; ++zooms) {
    double am = 0.5 * (a_lo + a_hi);
    double f_a, dphi_a;
    std::vector<double> g_a, x_a;
    eval(am, f_a, g_a, x_a, dphi_a);
    if (f_a > f0 + s.wolfe_c1 * am * dphi0 || f_a >= f_lo) {
      a_hi = am;
    } else {
      if (std::abs(dphi_a) <= -s.wolfe_c2 * dphi0) {
        accept(f_a, std::move(g_a), std::move(x_a));
        return out;
      }
      if (dphi_a * (a_hi - a_lo) >= 0.0) a_hi = a_lo;
      a_lo = am;
      f_lo = f_a;
    }
  }
  return out;
}

struct RunState {
  Clock::time_point start = Clock::now();
  std::vector<IterationRecord> history;

  void record(int iter, double f, double gnorm, int hvp_calls) {
    IterationRecord r;
    r.iter = iter;
    r.elapsed_s =
        std::chrono::duration<double>(Clock::now() - start).count();
    r.objective = f;
    r.grad_norm = gnorm;
    r.n_hvp_calls = hvp_calls;
    history.push_back(r);
  }
};

}  // namespace

const char* to_string(OptimizeStatus s) {
  switch (s) {
    case OptimizeStatus::Converged:
      return "converged";
    case OptimizeStatus::MaxIterations:
      return "max_iterations";
    case OptimizeStatus::LineSearchFailure:
      return "line_search_failure";
  }
  return "unknown";
}

OptimizeResult minimize_lbfgs(const ObjectiveFn& objective,
                              const GradientFn& gradient,
                              std::vector<double> theta0,
                              const OptimizeSettings& settings) {
  validate(settings);
  const std::size_t n = theta0.size();
  RunState run;

  std::vector<double> x = std::move(theta0);
  double f = objective(x);
  std::vector<double> g = gradient(x);
  double gnorm = inf_norm(g);
  run.record(0, f, gnorm, 0);

  std::deque<std::pair<std::vector<double>, std::vector<double>>> pairs;
  OptimizeResult result;
  result.status = OptimizeStatus::MaxIterations;

  for (int k = 1; k <= settings.max_iter; ++k) {
    if (gnorm <= settings.grad_tol) {
      result.status = OptimizeStatus::Converged;
      break;
    }

    // two-loop recursion for d = -H g
    std::vector<double> q = g;
    std::vector<double> alpha(pairs.size());
    for (std::size_t i = pairs.size(); i-- > 0;) {
      const auto& [sv, yv] = pairs[i];
      alpha[i] = dot(sv, q) / dot(yv, sv);
      for (std::size_t j = 0; j < n; ++j) q[j] -= alpha[i] * yv[j];
    }
    if (!pairs.empty()) {
      const auto& [sv, yv] = pairs.back();
      double gamma = dot(sv, yv) / dot(yv, yv);
      for (double& v : q) v *= gamma;
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& [sv, yv] = pairs[i];
      double beta = dot(yv, q) / dot(yv, sv);
      for (std::size_t j = 0; j < n; ++j) q[j] += (alpha[i] - beta) * sv[j];
    }
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = -q[j];

    double dphi0 = dot(g, d);
    if (dphi0 >= 0.0) {  // degenerate curvature model, fall back
      for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
      dphi0 = dot(g, d);
    }

    auto ls = wolfe_search(objective, gradient, x, d, f, dphi0, settings);
    if (!ls.ok) {
      result.status = OptimizeStatus::LineSearchFailure;
      break;
    }

    std::vector<double> sv(n), yv(n);
    for (std::size_t j = 0; j < n; ++j) {
      sv[j] = ls.x[j] - x[j];
      yv[j] = ls.g[j] - g[j];
    }
    if (dot(sv, yv) > 0.0) {
      pairs.emplace_back(std::move(sv), std::move(yv));
      if (static_cast<int>(pairs.size()) > settings.lbfgs_memory)
        pairs.pop_front();
    }

    x = std::move(ls.x);
    f = ls.f;
    g = std::move(ls.g);
    gnorm = inf_norm(g);
    run.record(k, f, gnorm, 0);
  }
  if (result.status == OptimizeStatus::MaxIterations &&
      gnorm <= settings.grad_tol)
    result.status = OptimizeStatus::Converged;

  result.theta = std::move(x);
  result.history = std::move(run.history);
  return result;
}

OptimizeResult minimize_newton_cg(const ObjectiveFn& objective,
                                  const GradientFn& gradient, const HvpFn& hvp,
                                  std::vector<double> theta0,
                                  const OptimizeSettings& settings) {
  validate(settings);
  const std::size_t n = theta0.size();
  const int cg_cap = settings.cg_max_iter > 0 ? settings.cg_max_iter
                                              : static_cast<int>(n);
  RunState run;

  std::vector<double> x = std::move(theta0);
  double f = objective(x);
  std::vector<double> g = gradient(x);
  double gnorm = inf_norm(g);
  run.record(0, f, gnorm, 0);

  OptimizeResult result;
  result.status = OptimizeStatus::MaxIterations;

  for (int k = 1; k <= settings.max_iter; ++k) {
    if (gnorm <= settings.grad_tol) {
      result.status = OptimizeStatus::Converged;
      break;
    }

    // inner CG on H d = -g, truncated at non-positive curvature
    const double g2 = std::sqrt(dot(g, g));
    const double eps =
        std::min(settings.cg_forcing, std::sqrt(g2)) * g2;
    std::vector<double> d(n, 0.0), r = g, p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = -g[j];
    double rr = dot(r, r);
    int hvp_calls = 0;
    for (int cg = 0; cg < cg_cap; ++cg) {
      auto hp = hvp(x, p);
      ++hvp_calls;
      double php = dot(p, hp);
      if (php <= 0.0) {
        if (cg == 0)
          for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
        break;
      }
      double alpha = rr / php;
      for (std::size_t j = 0; j < n; ++j) {
        d[j] += alpha * p[j];
        r[j] += alpha * hp[j];
      }
      double rr_next = dot(r, r);
      if (std::sqrt(rr_next) <= eps) break;
      double beta = rr_next / rr;
      rr = rr_next;
      for (std::size_t j = 0; j < n; ++j) p[j] = -r[j] + beta * p[j];
    }

    double dphi0 = dot(g, d);
    if (dphi0 >= 0.0) {
      for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
      dphi0 = dot(g, d);
    }

    auto ls = wolfe_search(objective, gradient, x, d, f, dphi0, settings);
    if (!ls.ok) {
      result.status = OptimizeStatus::LineSearchFailure;
      break;
    }
    x = std::move(ls.x);
    f = ls.f;
    g = std::move(ls.g);
    gnorm = inf_norm(g);
    run.record(k, f, gnorm, hvp_calls);
  }
  if (result.status == OptimizeStatus::MaxIterations &&
      gnorm <= settings.grad_tol)
    result.status = OptimizeStatus::Converged;

  result.theta = std::move(x);
  result.history = std::move(run.history);
  return result;
}

void write_history_jsonl(const std::vector<IterationRecord>& history,
                         std::ostream& out) {
  for (const auto& r : history) {
    nlohmann::json j = {{"iter", r.iter},
                        {"elapsed_s", r.elapsed_s},
                        {"objective", r.objective},
                        {"grad_norm", r.grad_norm},
                        {"n_hvp_calls", r.n_hvp_calls}};
    out << j.dump() << '\n';
  }
}

void write_history_csv(const std::vector<IterationRecord>& history,
                       std::ostream& out) {
  out << "iter,elapsed_s,objective,grad_norm,n_hvp_calls\n";
  char buf[160];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%d\n", r.iter,
                  r.elapsed_s, r.objective, r.grad_norm, r.n_hvp_calls);
    out << buf;
  }
}

}  // namespace hessfem::opt
