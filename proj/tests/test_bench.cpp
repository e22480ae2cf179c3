#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hessfem/bench/bakeoff.hpp"
#include "hessfem/bench/benchmark.hpp"
#include "hessfem/bench/verify.hpp"
#include "hessfem/fem/io.hpp"
#include "hessfem/implicit/engine.hpp"

using namespace hessfem;
using namespace hessfem::bench;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() ||
          std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

std::filesystem::path fresh_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  return dir;
}

double gaussian_bump(double x1, double x2) {
  const double dx = x1 - 0.5, dy = x2 - 0.5;
  return 10.0 * std::exp(-(dx * dx + dy * dy) / 0.02);
}

}  // namespace

TEST_CASE("benchmark construction validates inputs") {
  CHECK_THROWS_AS(make_benchmark("unknown", 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_benchmark("source-id", 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_benchmark("source-id", 4, -1), std::invalid_argument);
  CHECK_THROWS_AS(make_benchmark("source-id", 4, 4, -1.0),
                  std::invalid_argument);
}

TEST_CASE("source-id spec holds the reference field and its observation") {
  const Benchmark b = make_benchmark("source-id", 8, 8, 1e-6);
  CHECK(b.spec.name == "source-id");
  CHECK(b.spec.nx == 8);
  CHECK(b.spec.ny == 8);
  CHECK(b.spec.alpha == 1e-6);
  CHECK(b.problem->n_param() == 8 * 8 * 4);
  CHECK(b.problem->n_state() == 9 * 9);
  CHECK(b.spec.theta_ref.size() == 256);
  CHECK(b.spec.y_obs.size() == 81);

  // the reference parameter field is the bump sampled at quadrature points
  const auto expected =
      fem::interpolate_to_quad(b.problem->mesh(), gaussian_bump);
  CHECK(same_bits(b.spec.theta_ref, expected));

  // the observation is the forward solution at the reference field
  const auto y = implicit::solve_forward(*b.problem, b.spec.theta_ref);
  CHECK(same_bits(b.spec.y_obs, y));
  CHECK(b.spec.y_obs_hash == fnv1a_hash(b.spec.y_obs));

  // at the reference field the misfit vanishes, leaving the quadrature sum
  // of the Tikhonov term with weight 1/(4 nx ny) per point
  const double w = 1.0 / (4.0 * 8 * 8);
  double reg = 0.0;
  for (double t : b.spec.theta_ref) reg += 0.5 * 1e-6 * t * t * w;
  const double g = implicit::objective_value(*b.problem, b.spec.theta_ref);
  CHECK(g == doctest::Approx(reg).epsilon(1e-10));
}

TEST_CASE("model-nonlinear-id reference field is constant one") {
  const Benchmark b = make_benchmark("model-nonlinear-id", 6, 6, 1e-6);
  CHECK(b.problem->n_param() == 144);
  CHECK(b.spec.theta_ref == std::vector<double>(144, 1.0));

  const auto y = implicit::solve_forward(*b.problem, b.spec.theta_ref);
  CHECK(same_bits(b.spec.y_obs, y));

  // perfect observations: the adjoint vanishes and the gradient reduces to
  // the Tikhonov term alpha * w * theta
  const auto grad = implicit::gradient(*b.problem, b.spec.theta_ref);
  const double expect = 1e-6 / (4.0 * 6 * 6);
  for (double gq : grad) CHECK(gq == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("observation snapshots are shared across instances") {
  const Benchmark a = make_benchmark("source-id", 4, 4, 1e-6);
  const Benchmark b = make_benchmark("source-id", 4, 4, 3e-5);
  CHECK(same_bits(a.spec.y_obs, b.spec.y_obs));
  CHECK(a.spec.y_obs_hash == b.spec.y_obs_hash);

  const Benchmark c = make_benchmark("source-id", 5, 5, 1e-6);
  CHECK(c.spec.y_obs_hash != a.spec.y_obs_hash);
}

TEST_CASE("taylor remainders converge at orders one, two, three") {
  const Benchmark b = make_benchmark("model-nonlinear-id", 6, 6, 1e-6);
  const std::size_t m = static_cast<std::size_t>(b.problem->n_param());
  std::vector<double> theta(m), dtheta(m);
  seeded_normal(theta, 11, 0);
  seeded_normal(dtheta, 11, 1);
  const std::vector<double> eps = {1e-4, 1e-3, 1e-2, 1e-1};

  const TaylorReport report = run_taylor_test(*b.problem, theta, dtheta, eps);
  REQUIRE(report.samples.size() == 4);
  for (const TaylorSample& s : report.samples) {
    CHECK(s.r_zeroth >= 0.0);
    CHECK(s.r_first >= 0.0);
    CHECK(s.r_second >= 0.0);
    CHECK(s.r_first <= s.r_zeroth);
  }
  CHECK(report.slope_zeroth == doctest::Approx(1.0).epsilon(0.1));
  CHECK(report.slope_first == doctest::Approx(2.0).epsilon(0.05));
  CHECK(report.slope_second == doctest::Approx(3.0).epsilon(0.04));
  CHECK(report.excluded_zeroth == 0);
  CHECK(taylor_slopes_ok(report));
}

TEST_CASE("taylor rejects malformed inputs") {
  const Benchmark b = make_benchmark("source-id", 4, 4);
  const std::size_t m = static_cast<std::size_t>(b.problem->n_param());
  const std::vector<double> theta(m, 0.0), dtheta(m, 1.0);

  const std::vector<double> two = {1e-3, 1e-1};
  CHECK_THROWS_AS(run_taylor_test(*b.problem, theta, dtheta, two),
                  std::invalid_argument);
  const std::vector<double> negative = {-1e-3, 1e-2, 1e-1};
  CHECK_THROWS_AS(run_taylor_test(*b.problem, theta, dtheta, negative),
                  std::invalid_argument);
  const std::vector<double> narrow = {1e-3, 2e-3, 4e-3};
  CHECK_THROWS_AS(run_taylor_test(*b.problem, theta, dtheta, narrow),
                  std::invalid_argument);
  const std::vector<double> eps = {1e-4, 1e-3, 1e-2, 1e-1};
  const std::vector<double> short_theta(m - 1, 0.0);
  CHECK_THROWS_AS(run_taylor_test(*b.problem, short_theta, dtheta, eps),
                  std::invalid_argument);
}

TEST_CASE("quadratic objective floors the second remainder at roundoff") {
  // linear state equation and quadratic objective: the second-order
  // expansion is exact, so its remainder sits at machine noise and is
  // excluded from the fit
  const Benchmark b = make_benchmark("source-id", 6, 6, 0.0);
  const std::size_t m = static_cast<std::size_t>(b.problem->n_param());
  std::vector<double> theta(m, 0.0), dtheta(m);
  seeded_normal(dtheta, 13, 0);
  const std::vector<double> eps = {1e-4, 1e-3, 1e-2, 1e-1};

  const TaylorReport report = run_taylor_test(*b.problem, theta, dtheta, eps);
  for (const TaylorSample& s : report.samples)
    CHECK(s.r_second <= kTaylorExclusionFloor);
  CHECK(report.excluded_second == 4);
  CHECK(std::isnan(report.slope_second));
  CHECK(report.slope_zeroth == doctest::Approx(1.0).epsilon(0.1));
  CHECK(report.slope_first == doctest::Approx(2.0).epsilon(0.05));
  CHECK(taylor_slopes_ok(report));
}

TEST_CASE("fd comparison emits ordered records with small errors") {
  const Benchmark b = make_benchmark("model-nonlinear-id", 6, 6, 1e-6);
  const std::vector<double> h = {1e-2, 1e-1};
  const FdReport report = run_fd_comparison(*b.problem, h, 4, 7);

  REQUIRE(report.records.size() == 8);
  CHECK(report.seed == 7);
  CHECK(report.n_skipped == 0);
  for (std::size_t i = 0; i < 8; ++i) {
    const FdRecord& r = report.records[i];
    CHECK(r.h == h[i / 4]);
    CHECK(r.sample == static_cast<int>(i % 4));
    CHECK(!r.skipped);
    CHECK(r.e_v > 0.0);
    CHECK(r.e_v <= 2e-2);
    CHECK(r.e_s >= 0.0);
    CHECK(std::isfinite(r.e_s));
  }

  // smaller step, smaller truncation error, sample by sample
  for (int s = 0; s < 4; ++s)
    CHECK(report.records[s].e_v < report.records[4 + s].e_v);
}

TEST_CASE("fd comparison is reproducible and seed sensitive") {
  const Benchmark b = make_benchmark("model-nonlinear-id", 4, 4, 1e-6);
  const std::vector<double> h = {1e-2};
  const FdReport r1 = run_fd_comparison(*b.problem, h, 3, 42);
  const FdReport r2 = run_fd_comparison(*b.problem, h, 3, 42);
  const FdReport r3 = run_fd_comparison(*b.problem, h, 3, 43);

  REQUIRE(r1.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r1.records[i].e_v == r2.records[i].e_v);
    CHECK(r1.records[i].e_s == r2.records[i].e_s);
    CHECK(r1.records[i].e_v != r3.records[i].e_v);
  }
}

TEST_CASE("fd comparison flags draws whose forward solve diverges") {
  const Benchmark b = make_benchmark("model-nonlinear-id", 4, 4, 1e-6);
  // a perturbation this large overflows the exponential conductivity at the
  // shifted parameters, so the finite-difference solves cannot converge
  const std::vector<double> h = {1e6};
  const FdReport report = run_fd_comparison(*b.problem, h, 2, 3);

  REQUIRE(report.records.size() == 2);
  CHECK(report.n_skipped == 2);
  for (const FdRecord& r : report.records) {
    CHECK(r.skipped);
    CHECK(std::isnan(r.e_v));
    CHECK(std::isnan(r.e_s));
  }
}

TEST_CASE("fd comparison rejects malformed inputs") {
  const Benchmark b = make_benchmark("source-id", 4, 4);
  const std::vector<double> h = {1e-2};
  CHECK_THROWS_AS(run_fd_comparison(*b.problem, h, 0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_fd_comparison(*b.problem, {}, 1, 0),
                  std::invalid_argument);
  const std::vector<double> bad = {1e-2, 0.0};
  CHECK_THROWS_AS(run_fd_comparison(*b.problem, bad, 1, 0),
                  std::invalid_argument);
}

TEST_CASE("fd summary aggregates per step size") {
  FdReport report;
  report.n_skipped = 1;
  report.records = {
      {1e-1, 0, 4e-3, 1e-2, false},
      {1e-1, 1, 2e-3, 3e-2, false},
      {1e-1, 2, 0.0, 0.0, true},
      {1e-2, 0, 1e-4, 5e-3, false},
      {1e-2, 1, 3e-4, 1e-3, false},
      {1e-2, 2, 2e-4, 2e-3, false},
  };
  const FdSummary s = summarize_fd(report);
  REQUIRE(s.h == std::vector<double>{1e-1, 1e-2});
  CHECK(s.max_e_v[0] == 4e-3);
  CHECK(s.median_e_v[0] == 3e-3);  // even count: mean of the middle pair
  CHECK(s.max_e_s[0] == 3e-2);
  CHECK(s.max_e_v[1] == 3e-4);
  CHECK(s.median_e_v[1] == 2e-4);  // odd count: middle value
  CHECK(s.max_e_s[1] == 5e-3);
  CHECK(s.n_skipped == 1);
}

TEST_CASE("composition modes agree on a shared state") {
  const Benchmark b = make_benchmark("model-nonlinear-id", 5, 5, 1e-6);
  const ad::Mode before = b.problem->settings().hvp_mode;
  const auto records = run_mode_agreement(*b.problem, 3, 17);

  REQUIRE(records.size() == 3);
  for (const ModeRecord& r : records) {
    CHECK(r.d_fr_rf <= 1e-10);
    CHECK(r.d_fr_rr <= 1e-10);
    CHECK(r.d_rf_rr <= 1e-10);
  }
  CHECK(b.problem->settings().hvp_mode == before);
  CHECK_THROWS_AS(run_mode_agreement(*b.problem, 0, 0), std::invalid_argument);
}

TEST_CASE("initial guesses are canonical and seeded") {
  const Benchmark src = make_benchmark("source-id", 4, 4);
  CHECK(initial_guess(src, 5) == std::vector<double>(64, 0.0));

  const Benchmark mdl = make_benchmark("model-nonlinear-id", 4, 4);
  const auto g1 = initial_guess(mdl, 5);
  const auto g2 = initial_guess(mdl, 5);
  const auto g3 = initial_guess(mdl, 6);
  CHECK(g1 == g2);
  CHECK(g1 != g3);
  double mean = 0.0;
  for (double v : g1) {
    CHECK(v > 0.4);
    CHECK(v < 1.6);
    mean += v;
  }
  mean /= static_cast<double>(g1.size());
  CHECK(mean == doctest::Approx(1.0).epsilon(0.06));
}

TEST_CASE("bakeoff writes reproducible artifacts and converges") {
  const Benchmark b = make_benchmark("source-id", 6, 6, 1e-6);
  BakeoffSettings settings;
  settings.opt.max_iter = 60;
  const auto out = fresh_dir("hessfem_bench_bakeoff");

  const auto manifests =
      run_optimizer_bakeoff(b, {"lbfgs", "newton-cg-ad"}, settings, out);
  REQUIRE(manifests.size() == 2);
  CHECK(std::filesystem::exists(out / "mesh_nodes.txt"));
  CHECK(std::filesystem::exists(out / "mesh_elements.txt"));

  for (const RunManifest& m : manifests) {
    CHECK(m.benchmark == "source-id");
    CHECK(m.final_objective <= 1e-3 * m.initial_objective);

    // the manifest on disk reconstructs the run configuration
    const nlohmann::json j = nlohmann::json::parse(slurp(m.manifest_path));
    CHECK(j["benchmark"] == "source-id");
    CHECK(j["optimizer"] == m.optimizer);
    CHECK(j["nx"] == 6);
    CHECK(j["alpha"] == 1e-6);
    CHECK(j["seed"] == 0);
    CHECK(j["settings"]["max_iter"] == 60);
    CHECK(j["y_obs_hash"] == b.spec.y_obs_hash);
    CHECK(j["status"] == m.status);

    CHECK(line_count(m.history_jsonl) == static_cast<std::size_t>(
                                             m.n_iterations) + 1);
    CHECK(line_count(m.theta_path) == 144);
    CHECK(line_count(m.predicted_path) == 49);
    CHECK(line_count(m.observed_path) == 49);

    std::ostringstream obs;
    fem::write_field_text(b.spec.y_obs, obs);
    CHECK(slurp(m.observed_path) == obs.str());
  }

  // identical settings and seed reproduce the run; wall-clock timing is the
  // only field allowed to differ between the logs
  const auto out2 = fresh_dir("hessfem_bench_bakeoff2");
  const RunManifest again = run_one_optimizer(b, "lbfgs", settings, out2);
  const auto strip_timing = [](const std::string& path) {
    std::vector<nlohmann::json> rows;
    std::istringstream lines(slurp(path));
    for (std::string line; std::getline(lines, line);) {
      nlohmann::json j = nlohmann::json::parse(line);
      j.erase("elapsed_s");
      rows.push_back(std::move(j));
    }
    return rows;
  };
  CHECK(strip_timing(again.history_jsonl) ==
        strip_timing(manifests[0].history_jsonl));
  CHECK(slurp(again.theta_path) == slurp(manifests[0].theta_path));

  std::filesystem::remove_all(out);
  std::filesystem::remove_all(out2);
}

TEST_CASE("bakeoff records finite-difference curvature runs without crashing") {
  const Benchmark b = make_benchmark("source-id", 4, 4, 1e-6);
  BakeoffSettings settings;
  settings.opt.max_iter = 15;
  const auto out = fresh_dir("hessfem_bench_fd_run");

  const RunManifest m = run_one_optimizer(b, "newton-cg-fd", settings, out);
  CHECK((m.status == "converged" || m.status == "max_iterations" ||
         m.status == "line_search_failure"));
  CHECK(std::filesystem::exists(m.manifest_path));
  CHECK(std::filesystem::exists(m.history_jsonl));
  std::filesystem::remove_all(out);
}

TEST_CASE("bakeoff validates its inputs") {
  const Benchmark b = make_benchmark("source-id", 4, 4);
  BakeoffSettings settings;
  const auto out = fresh_dir("hessfem_bench_validate");
  CHECK_THROWS_AS(run_one_optimizer(b, "sgd", settings, out),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_optimizer_bakeoff(b, {}, settings, out),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_optimizer_bakeoff(b, {"lbfgs", "adam"}, settings, out),
                  std::invalid_argument);
  BakeoffSettings bad = settings;
  bad.fd_h = 0.0;
  CHECK_THROWS_AS(run_one_optimizer(b, "newton-cg-fd", bad, out),
                  std::invalid_argument);
  std::filesystem::remove_all(out);
}
