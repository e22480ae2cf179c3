#include "hessfem/implicit/engine.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace hessfem::implicit {

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_vector(const char* what, std::span<const double> v,
                  std::int64_t want) {
  if (static_cast<std::int64_t>(v.size()) != want)
    throw std::invalid_argument(std::string("implicit: ") + what +
                                " has length " + std::to_string(v.size()) +
                                ", expected " + std::to_string(want));
  for (double x : v)
    if (!std::isfinite(x))
      throw std::invalid_argument(std::string("implicit: non-finite ") + what);
}

bool bit_identical(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> newton(const ImplicitProblem& p,
                           std::span<const double> theta) {
  const SolverSettings& s = p.settings();
  std::vector<double> y = p.initial_state();
  std::vector<double> r = p.residual(y, theta);
  double rn = inf_norm(r);
  const double target = s.newton_tol * std::max(1.0, rn);

  for (int it = 0;; ++it) {
    if (rn <= target) return y;
    if (it >= s.max_newton_iter)
      throw std::runtime_error(
          "implicit: Newton did not converge after " +
          std::to_string(s.max_newton_iter) +
          " iterations (residual norm " + std::to_string(rn) + ")");
    auto fact = sparse::factorize(p.jacobian(y, theta));
    auto dy = fact.solve(r);

    double step = 1.0;
    bool accepted = false;
    std::vector<double> y_trial(y.size());
    for (int halve = 0; halve <= s.max_halvings; ++halve) {
      for (std::size_t i = 0; i < y.size(); ++i)
        y_trial[i] = y[i] - step * dy[i];
      double rt = std::numeric_limits<double>::infinity();
      std::vector<double> r_trial;
      try {
        r_trial = p.residual(y_trial, theta);
        rt = inf_norm(r_trial);
      } catch (const std::runtime_error&) {
        // overshoot left the kernel's domain; treat as a rejected step
      }
      if (rt < rn || rt <= target) {
        y.swap(y_trial);
        r = std::move(r_trial);
        rn = rt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted)
      throw std::runtime_error(
          "implicit: Newton stalled, the residual norm did not decrease "
          "within " +
          std::to_string(s.max_halvings) + " step halvings");
  }
}

void ensure_state(const ImplicitProblem& p, std::span<const double> theta,
                  HvpWorkspace& ws) {
  if (ws.has_state && bit_identical(ws.theta, theta)) return;
  ws.has_state = false;
  ws.has_adjoint = false;
  ws.state = newton(p, theta);
  // factorize at the converged state; the adjoint and both incremental
  // systems share this object
  ws.factorization.emplace(sparse::factorize(p.jacobian(ws.state, theta)));
  ws.theta.assign(theta.begin(), theta.end());
  ws.has_state = true;
  ++ws.n_forward_solves;
}

void ensure_adjoint(const ImplicitProblem& p, std::span<const double> theta,
                    HvpWorkspace& ws) {
  ensure_state(p, theta, ws);
  if (ws.has_adjoint) return;
  auto rhs = p.objective_gradients(ws.state, theta).first;
  for (double& v : rhs) v = -v;
  ws.adjoint = ws.factorization->solve_transpose(rhs);
  ws.has_adjoint = true;
  ++ws.n_adjoint_solves;
}

}  // namespace

std::vector<double> solve_forward(const ImplicitProblem& p,
                                  std::span<const double> theta) {
  check_vector("theta", theta, p.n_param());
  return newton(p, theta);
}

std::vector<double> solve_adjoint(const ImplicitProblem& p,
                                  std::span<const double> theta,
                                  std::span<const double> y) {
  check_vector("theta", theta, p.n_param());
  check_vector("state", y, p.n_state());
  auto fact = sparse::factorize(p.jacobian(y, theta));
  auto rhs = p.objective_gradients(y, theta).first;
  for (double& v : rhs) v = -v;
  return fact.solve_transpose(rhs);
}

double objective_value(const ImplicitProblem& p, std::span<const double> theta,
                       HvpWorkspace& ws) {
  check_vector("theta", theta, p.n_param());
  ensure_state(p, theta, ws);
  return p.objective(ws.state, theta);
}

double objective_value(const ImplicitProblem& p,
                       std::span<const double> theta) {
  HvpWorkspace ws;
  return objective_value(p, theta, ws);
}

std::vector<double> gradient(const ImplicitProblem& p,
                             std::span<const double> theta, HvpWorkspace& ws) {
  check_vector("theta", theta, p.n_param());
  ensure_state(p, theta, ws);
  auto grads = p.objective_gradients(ws.state, theta);
  if (!ws.has_adjoint) {
    auto rhs = grads.first;
    for (double& v : rhs) v = -v;
    ws.adjoint = ws.factorization->solve_transpose(rhs);
    ws.has_adjoint = true;
    ++ws.n_adjoint_solves;
  }
  auto vj = p.residual_vjp_theta(ws.state, theta, ws.adjoint);
  for (std::size_t q = 0; q < vj.size(); ++q) grads.second[q] += vj[q];
  return std::move(grads.second);
}

std::vector<double> gradient(const ImplicitProblem& p,
                             std::span<const double> theta) {
  HvpWorkspace ws;
  return gradient(p, theta, ws);
}

std::vector<double> hvp(const ImplicitProblem& p, std::span<const double> theta,
                        std::span<const double> theta_hat, HvpWorkspace& ws) {
  check_vector("theta", theta, p.n_param());
  check_vector("theta_hat", theta_hat, p.n_param());
  ensure_adjoint(p, theta, ws);
  const auto& y = ws.state;
  const ad::Mode mode = p.settings().hvp_mode;

  // incremental forward: (dr/dy) yhat = -(dr/dtheta) theta_hat
  auto rhs = p.residual_jvp_theta(y, theta, theta_hat);
  for (double& v : rhs) v = -v;
  auto yhat = ws.factorization->solve(rhs);

  // incremental adjoint: (dr/dy)^T lambda_hat = -(F_yy yhat + F_ytheta
  // theta_hat) with F = g + lambda^T r
  HessianBlockRequest req;
  req.include_objective = true;
  req.multiplier = ws.adjoint;
  req.mode = mode;
  req.seed_slot = Slot::State;
  req.out_slot = Slot::State;
  auto arhs = p.second_order(y, theta, req, yhat);
  req.seed_slot = Slot::Param;
  auto brhs = p.second_order(y, theta, req, theta_hat);
  for (std::size_t i = 0; i < arhs.size(); ++i) arhs[i] = -(arhs[i] + brhs[i]);
  auto lambda_hat = ws.factorization->solve_transpose(arhs);

  // combine: F_thth theta_hat + F_thy yhat + lambda_hat^T dr/dtheta
  req.seed_slot = Slot::Param;
  req.out_slot = Slot::Param;
  auto result = p.second_order(y, theta, req, theta_hat);
  req.seed_slot = Slot::State;
  auto mixed = p.second_order(y, theta, req, yhat);
  auto tail = p.residual_vjp_theta(y, theta, lambda_hat);
  for (std::size_t q = 0; q < result.size(); ++q)
    result[q] += mixed[q] + tail[q];
  return result;
}

std::vector<double> hvp(const ImplicitProblem& p, std::span<const double> theta,
                        std::span<const double> theta_hat) {
  HvpWorkspace ws;
  return hvp(p, theta, theta_hat, ws);
}

std::vector<double> fd_hvp(const ImplicitProblem& p,
                           std::span<const double> theta,
                           std::span<const double> theta_hat, double h) {
  check_vector("theta", theta, p.n_param());
  check_vector("theta_hat", theta_hat, p.n_param());
  if (!(h > 0.0)) throw std::invalid_argument("implicit: fd_hvp needs h > 0");
  std::vector<double> tp(theta.begin(), theta.end());
  std::vector<double> tm(theta.begin(), theta.end());
  for (std::size_t q = 0; q < tp.size(); ++q) {
    tp[q] += h * theta_hat[q];
    tm[q] -= h * theta_hat[q];
  }
  HvpWorkspace wp, wm;
  auto gp = gradient(p, tp, wp);
  auto gm = gradient(p, tm, wm);
  for (std::size_t q = 0; q < gp.size(); ++q)
    gp[q] = (gp[q] - gm[q]) / (2.0 * h);
  return gp;
}

std::vector<double> full_hessian(const ImplicitProblem& p,
                                 std::span<const double> theta) {
  const std::int64_t m = p.n_param();
  if (m > 512)
    throw std::invalid_argument(
        "implicit: full_hessian limited to 512 parameters, got " +
        std::to_string(m));
  check_vector("theta", theta, m);
  HvpWorkspace ws;
  std::vector<double> h(static_cast<std::size_t>(m) * m);
  std::vector<double> unit(m, 0.0);
  for (std::int64_t j = 0; j < m; ++j) {
    unit[j] = 1.0;
    auto col = hvp(p, theta, unit, ws);
    for (std::int64_t i = 0; i < m; ++i) h[i * m + j] = col[i];
    unit[j] = 0.0;
  }
  return h;
}

}  // namespace hessfem::implicit
