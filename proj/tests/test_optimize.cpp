#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>
#include <vector>

#include "hessfem/opt/optimize.hpp"

using namespace hessfem::opt;

namespace {

double sq_obj(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += 0.5 * v * v;
  return s;
}

std::vector<double> sq_grad(std::span<const double> x) {
  return {x.begin(), x.end()};
}

std::vector<double> sq_hvp(std::span<const double>,
                           std::span<const double> d) {
  return {d.begin(), d.end()};
}

double rosen_obj(std::span<const double> x) {
  double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
  return a * a + 100.0 * b * b;
}

std::vector<double> rosen_grad(std::span<const double> x) {
  double b = x[1] - x[0] * x[0];
  return {-2.0 * (1.0 - x[0]) - 400.0 * x[0] * b, 200.0 * b};
}

std::vector<double> rosen_hvp(std::span<const double> x,
                              std::span<const double> d) {
  double h00 = 2.0 - 400.0 * x[1] + 1200.0 * x[0] * x[0];
  double h01 = -400.0 * x[0];
  return {h00 * d[0] + h01 * d[1], h01 * d[0] + 200.0 * d[1]};
}

}  // namespace

TEST_CASE("settings are validated") {
  OptimizeSettings s;
  s.wolfe_c1 = 0.95;  // >= c2
  CHECK_THROWS_AS(minimize_lbfgs(sq_obj, sq_grad, {1.0}, s),
                  std::invalid_argument);
  s = {};
  s.wolfe_c2 = 1.0;
  CHECK_THROWS_AS(minimize_lbfgs(sq_obj, sq_grad, {1.0}, s),
                  std::invalid_argument);
  s = {};
  s.lbfgs_memory = 0;
  CHECK_THROWS_AS(minimize_lbfgs(sq_obj, sq_grad, {1.0}, s),
                  std::invalid_argument);
  s = {};
  s.grad_tol = -1.0;
  CHECK_THROWS_AS(minimize_newton_cg(sq_obj, sq_grad, sq_hvp, {1.0}, s),
                  std::invalid_argument);
}

TEST_CASE("quadratic bowl") {
  std::vector<double> x0(6, 1.0);

  SUBCASE("lbfgs needs at most three iterations") {
    OptimizeSettings s;
    s.grad_tol = 1e-10;
    auto res = minimize_lbfgs(sq_obj, sq_grad, x0, s);
    CHECK(res.status == OptimizeStatus::Converged);
    CHECK(res.history.back().iter <= 3);
    for (double v : res.theta) CHECK(std::abs(v) <= 1e-10);
  }

  SUBCASE("newton-cg needs one outer iteration and one cg step") {
    OptimizeSettings s;
    s.grad_tol = 1e-10;
    auto res = minimize_newton_cg(sq_obj, sq_grad, sq_hvp, x0, s);
    CHECK(res.status == OptimizeStatus::Converged);
    REQUIRE(res.history.size() == 2);
    CHECK(res.history[1].n_hvp_calls == 1);
    for (double v : res.theta) CHECK(std::abs(v) <= 1e-10);
  }

  SUBCASE("already-converged start returns the baseline only") {
    std::vector<double> zeros(6, 0.0);
    auto res = minimize_lbfgs(sq_obj, sq_grad, zeros);
    CHECK(res.status == OptimizeStatus::Converged);
    CHECK(res.history.size() == 1);
    CHECK(res.history[0].iter == 0);
  }
}

TEST_CASE("rosenbrock valley") {
  std::vector<double> x0 = {-1.2, 1.0};
  OptimizeSettings s;
  s.max_iter = 200;
  s.grad_tol = 1e-9;

  SUBCASE("lbfgs") {
    auto res = minimize_lbfgs(rosen_obj, rosen_grad, x0, s);
    CHECK(res.status == OptimizeStatus::Converged);
    CHECK(std::hypot(res.theta[0] - 1.0, res.theta[1] - 1.0) <= 1e-5);
  }
  SUBCASE("newton-cg") {
    auto res = minimize_newton_cg(rosen_obj, rosen_grad, rosen_hvp, x0, s);
    CHECK(res.status == OptimizeStatus::Converged);
    CHECK(std::hypot(res.theta[0] - 1.0, res.theta[1] - 1.0) <= 1e-5);
  }
}

TEST_CASE("accepted iterates never increase the objective") {
  std::vector<double> x0 = {-1.2, 1.0};
  OptimizeSettings s;
  s.max_iter = 200;
  s.grad_tol = 1e-9;
  for (int variant = 0; variant < 2; ++variant) {
    auto res = variant == 0
                   ? minimize_lbfgs(rosen_obj, rosen_grad, x0, s)
                   : minimize_newton_cg(rosen_obj, rosen_grad, rosen_hvp, x0, s);
    for (std::size_t i = 1; i < res.history.size(); ++i) {
      CHECK(res.history[i].objective <= res.history[i - 1].objective);
      CHECK(res.history[i].iter == res.history[i - 1].iter + 1);
    }
  }
}

TEST_CASE("cg truncates on non-positive curvature and still descends") {
  // true objective is the bowl, but the supplied product reports an
  // indefinite matrix diag(1, -1); CG must bail out with a usable direction
  auto bad_hvp = [](std::span<const double>, std::span<const double> d) {
    return std::vector<double>{d[0], -d[1]};
  };
  OptimizeSettings s;
  s.grad_tol = 1e-10;
  // each outer iteration contracts the iterate by 2/3, so allow enough
  s.max_iter = 100;

  // from (2, 1) the second CG step hits negative curvature
  auto res = minimize_newton_cg(sq_obj, sq_grad, bad_hvp, {2.0, 1.0}, s);
  CHECK(res.status == OptimizeStatus::Converged);
  CHECK(res.history[1].n_hvp_calls == 2);
  CHECK(res.history[1].objective < res.history[0].objective);

  // from (1, 1) the very first product has zero curvature: steepest descent
  auto res2 = minimize_newton_cg(sq_obj, sq_grad, bad_hvp, {1.0, 1.0}, s);
  CHECK(res2.status == OptimizeStatus::Converged);
  CHECK(res2.history[1].objective < res2.history[0].objective);
}

TEST_CASE("cg terminates within the dimension on a quadratic") {
  // f = 0.5 x^T D x with D = diag(1..5): CG needs at most 5 products
  auto obj = [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      s += 0.5 * (1.0 + i) * x[i] * x[i];
    return s;
  };
  auto grad = [](std::span<const double> x) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = (1.0 + i) * x[i];
    return g;
  };
  auto hvp = [](std::span<const double>, std::span<const double> d) {
    std::vector<double> v(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) v[i] = (1.0 + i) * d[i];
    return v;
  };
  OptimizeSettings s;
  s.grad_tol = 1e-12;
  auto res = minimize_newton_cg(obj, grad, hvp, {1.0, 1.0, 1.0, 1.0, 1.0}, s);
  CHECK(res.status == OptimizeStatus::Converged);
  for (std::size_t i = 1; i < res.history.size(); ++i)
    CHECK(res.history[i].n_hvp_calls <= 5);
}

TEST_CASE("unbounded descent reports a line-search failure") {
  auto obj = [](std::span<const double> x) { return x[0]; };
  auto grad = [](std::span<const double> x) {
    return std::vector<double>(x.size(), 1.0);
  };
  auto res = minimize_lbfgs(obj, grad, {0.0});
  CHECK(res.status == OptimizeStatus::LineSearchFailure);
  CHECK(res.history.size() == 1);  // only the starting record
  CHECK(res.theta[0] == 0.0);     // best-so-far is the start
}

TEST_CASE("fixed inputs give bit-identical runs") {
  std::vector<double> x0 = {-1.2, 1.0};
  OptimizeSettings s;
  s.max_iter = 150;
  s.grad_tol = 1e-9;
  auto r1 = minimize_lbfgs(rosen_obj, rosen_grad, x0, s);
  auto r2 = minimize_lbfgs(rosen_obj, rosen_grad, x0, s);
  REQUIRE(r1.history.size() == r2.history.size());
  REQUIRE(r1.theta.size() == r2.theta.size());
  CHECK(std::memcmp(r1.theta.data(), r2.theta.data(),
                    r1.theta.size() * sizeof(double)) == 0);
  for (std::size_t i = 0; i < r1.history.size(); ++i) {
    CHECK(r1.history[i].objective == r2.history[i].objective);
    CHECK(r1.history[i].grad_norm == r2.history[i].grad_norm);
  }
}

TEST_CASE("history serialization") {
  std::vector<IterationRecord> h = {{0, 0.0, 2.0, 1.5, 0},
                                    {1, 0.25, 0.5, 0.125, 3}};
  std::ostringstream jsonl;
  write_history_jsonl(h, jsonl);
  CHECK(jsonl.str() ==
        "{\"elapsed_s\":0.0,\"grad_norm\":1.5,\"iter\":0,\"n_hvp_calls\":0,"
        "\"objective\":2.0}\n"
        "{\"elapsed_s\":0.25,\"grad_norm\":0.125,\"iter\":1,\"n_hvp_calls\":3,"
        "\"objective\":0.5}\n");

  std::ostringstream csv;
  write_history_csv(h, csv);
  CHECK(csv.str() ==
        "iter,elapsed_s,objective,grad_norm,n_hvp_calls\n"
        "0,0,2,1.5,0\n"
        "1,0.25,0.5,0.125,3\n");
}

TEST_CASE("status names") {
  CHECK(std::string(to_string(OptimizeStatus::Converged)) == "converged");
  CHECK(std::string(to_string(OptimizeStatus::MaxIterations)) ==
        "max_iterations");
  CHECK(std::string(to_string(OptimizeStatus::LineSearchFailure)) ==
        "line_search_failure");
}
