// Command-line front end: the verification campaigns (finite-difference
// cross-check, Taylor remainders, composition-mode agreement) and the
// optimizer bake-off, over the two packaged benchmark problems.
//
// Exit codes: 0 success, 1 a verification gate failed, 2 usage error.

#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hessfem/bench/bakeoff.hpp"
#include "hessfem/bench/benchmark.hpp"
#include "hessfem/bench/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGateFailed = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
  std::string problem;
  int mesh = 32;
  double alpha = 1e-6;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--problem", opts.problem, "source-id or model-nonlinear-id")
      ->required();
  cmd->add_option("--mesh", opts.mesh, "elements per side")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "random stream seed");
}

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  return out;
}

// Mirror path for the CSV twin of a .jsonl / .json output.
std::string csv_twin(const std::string& path) {
  const std::size_t dot = path.rfind('.');
  return (dot == std::string::npos ? path : path.substr(0, dot)) + ".csv";
}

int run_fd(const CommonOptions& common, const std::vector<double>& h_list,
           int samples, const std::string& out_path) {
  using namespace hessfem;
  bench::Benchmark b =
      bench::make_benchmark(common.problem, common.mesh, common.mesh,
                            common.alpha);
  const bench::FdReport report =
      bench::run_fd_comparison(*b.problem, h_list, samples, common.seed);

  if (!out_path.empty()) {
    std::ofstream jsonl = open_or_throw(out_path);
    for (const bench::FdRecord& r : report.records) {
      nlohmann::json j;
      j["h"] = r.h;
      j["sample"] = r.sample;
      j["e_v"] = r.skipped ? nlohmann::json() : nlohmann::json(r.e_v);
      j["e_s"] = r.skipped ? nlohmann::json() : nlohmann::json(r.e_s);
      j["skipped"] = r.skipped;
      jsonl << j.dump() << "\n";
    }
    std::ofstream csv = open_or_throw(csv_twin(out_path));
    csv << "h,sample,e_v,e_s,skipped\n";
    char line[160];
    for (const bench::FdRecord& r : report.records) {
      std::snprintf(line, sizeof line, "%.17g,%d,%.17g,%.17g,%d\n", r.h,
                    r.sample, r.e_v, r.e_s, r.skipped ? 1 : 0);
      csv << line;
    }
  }

  const bench::FdSummary summary = bench::summarize_fd(report);
  std::printf("fd comparison: problem=%s mesh=%d samples=%d seed=%llu\n",
              common.problem.c_str(), common.mesh, samples,
              static_cast<unsigned long long>(common.seed));
  for (std::size_t i = 0; i < summary.h.size(); ++i)
    std::printf("  h=%-8.3g max_e_v=%.3e median_e_v=%.3e max_e_s=%.3e\n",
                summary.h[i], summary.max_e_v[i], summary.median_e_v[i],
                summary.max_e_s[i]);
  if (summary.n_skipped > 0)
    std::printf("  skipped %d sample(s) whose forward solve failed\n",
                summary.n_skipped);

  // Gates from the pinned tolerances, applied to whichever step sizes are
  // present: the coarsest published step must stay under the max-error
  // bounds, and the median must improve monotonically as h shrinks.
  bool ok = true;
  for (std::size_t i = 0; i < summary.h.size(); ++i) {
    if (std::abs(summary.h[i] - 1e-1) < 1e-12) {
      if (!(summary.max_e_v[i] <= 2e-3)) {
        std::printf("gate FAILED: max e_v at h=0.1 is %.3e, bound 2e-3\n",
                    summary.max_e_v[i]);
        ok = false;
      }
      if (!(summary.max_e_s[i] <= 4e-2)) {
        std::printf("gate FAILED: max e_s at h=0.1 is %.3e, bound 4e-2\n",
                    summary.max_e_s[i]);
        ok = false;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < summary.h.size(); ++i) {
    // records run h-major in the given order; compare adjacent decades when
    // the list is descending toward 1e-3
    const double ha = summary.h[i], hb = summary.h[i + 1];
    if (ha > hb && hb >= 1e-3 - 1e-15) {
      if (!(summary.median_e_v[i + 1] < summary.median_e_v[i])) {
        std::printf(
            "gate FAILED: median e_v did not decrease from h=%g to h=%g\n",
            ha, hb);
        ok = false;
      }
    } else if (hb > ha && ha >= 1e-3 - 1e-15) {
      if (!(summary.median_e_v[i] < summary.median_e_v[i + 1])) {
        std::printf(
            "gate FAILED: median e_v did not decrease from h=%g to h=%g\n",
            hb, ha);
        ok = false;
      }
    }
  }
  std::printf("%s\n", ok ? "fd gates passed" : "fd gates FAILED");
  return ok ? kExitOk : kExitGateFailed;
}

int run_taylor(const CommonOptions& common, const std::vector<double>& eps,
               const std::string& out_path) {
  using namespace hessfem;
  bench::Benchmark b =
      bench::make_benchmark(common.problem, common.mesh, common.mesh,
                            common.alpha);
  const std::size_t m = static_cast<std::size_t>(b.problem->n_param());
  std::vector<double> theta(m), dtheta(m);
  bench::seeded_normal(theta, common.seed, 0);
  bench::seeded_normal(dtheta, common.seed, 1);

  const bench::TaylorReport report =
      bench::run_taylor_test(*b.problem, theta, dtheta, eps);

  if (!out_path.empty()) {
    nlohmann::json j;
    j["problem"] = common.problem;
    j["mesh"] = common.mesh;
    j["seed"] = common.seed;
    j["slope_zeroth"] = report.slope_zeroth;
    j["slope_first"] = report.slope_first;
    j["slope_second"] = report.slope_second;
    j["excluded_zeroth"] = report.excluded_zeroth;
    j["excluded_first"] = report.excluded_first;
    j["excluded_second"] = report.excluded_second;
    j["samples"] = nlohmann::json::array();
    for (const bench::TaylorSample& s : report.samples)
      j["samples"].push_back({{"eps", s.eps},
                              {"r_zeroth", s.r_zeroth},
                              {"r_first", s.r_first},
                              {"r_second", s.r_second}});
    open_or_throw(out_path) << j.dump(2) << "\n";
    std::ofstream csv = open_or_throw(csv_twin(out_path));
    csv << "eps,r_zeroth,r_first,r_second\n";
    char line[160];
    for (const bench::TaylorSample& s : report.samples) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", s.eps,
                    s.r_zeroth, s.r_first, s.r_second);
      csv << line;
    }
  }

  std::printf("taylor remainders: problem=%s mesh=%d seed=%llu\n",
              common.problem.c_str(), common.mesh,
              static_cast<unsigned long long>(common.seed));
  for (const bench::TaylorSample& s : report.samples)
    std::printf("  eps=%-8.3g r0=%.6e r1=%.6e r2=%.6e\n", s.eps, s.r_zeroth,
                s.r_first, s.r_second);
  std::printf("  slopes: %.4f %.4f %.4f (targets 1, 2, 3)\n",
              report.slope_zeroth, report.slope_first, report.slope_second);
  if (report.excluded_zeroth + report.excluded_first +
          report.excluded_second >
      0)
    std::printf("  excluded roundoff-floored residuals: %d %d %d\n",
                report.excluded_zeroth, report.excluded_first,
                report.excluded_second);

  const bool ok = bench::taylor_slopes_ok(report);
  std::printf("%s\n", ok ? "taylor gates passed" : "taylor gates FAILED");
  return ok ? kExitOk : kExitGateFailed;
}

int run_modes(const CommonOptions& common, int samples) {
  using namespace hessfem;
  bench::Benchmark b =
      bench::make_benchmark(common.problem, common.mesh, common.mesh,
                            common.alpha);
  const std::vector<bench::ModeRecord> records =
      bench::run_mode_agreement(*b.problem, samples, common.seed);

  double worst = 0.0;
  for (const bench::ModeRecord& r : records)
    worst = std::max({worst, r.d_fr_rf, r.d_fr_rr, r.d_rf_rr});
  std::printf(
      "composition modes: problem=%s mesh=%d samples=%d seed=%llu\n"
      "  max pairwise relative difference %.3e (bound 1e-10)\n",
      common.problem.c_str(), common.mesh, samples,
      static_cast<unsigned long long>(common.seed), worst);

  const bool ok = worst <= 1e-10;
  std::printf("%s\n", ok ? "mode gate passed" : "mode gate FAILED");
  return ok ? kExitOk : kExitGateFailed;
}

int run_optimize(const CommonOptions& common, const std::string& optimizer,
                 int max_iter, const std::string& out_dir) {
  using namespace hessfem;
  bench::Benchmark b =
      bench::make_benchmark(common.problem, common.mesh, common.mesh,
                            common.alpha);
  bench::BakeoffSettings settings;
  settings.opt.max_iter = max_iter;
  settings.seed = common.seed;

  const bench::RunManifest m =
      bench::run_one_optimizer(b, optimizer, settings, out_dir);
  std::printf(
      "optimize: problem=%s optimizer=%s mesh=%d\n"
      "  status=%s iterations=%d objective %.6e -> %.6e\n"
      "  artifacts in %s\n",
      common.problem.c_str(), optimizer.c_str(), common.mesh,
      m.status.c_str(), m.n_iterations, m.initial_objective,
      m.final_objective, (out_dir + "/" + optimizer).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentiable finite-element benchmarks"};
  app.require_subcommand(1);

  CLI::App* verify = app.add_subcommand("verify", "derivative verification");
  verify->require_subcommand(1);

  CommonOptions fd_common;
  std::vector<double> fd_h = {1e-4, 1e-3, 1e-2, 1e-1};
  int fd_samples = 100;
  std::string fd_out;
  CLI::App* fd = verify->add_subcommand(
      "fd", "compare the analytic Hessian-vector product against central "
            "differences of the gradient");
  add_common(fd, fd_common);
  fd->add_option("--step", fd_h, "finite-difference step sizes")
      ->delimiter(',');
  fd->add_option("--samples", fd_samples, "draws per step size")
      ->check(CLI::PositiveNumber);
  fd->add_option("--out", fd_out, "JSONL output path (CSV twin next to it)");

  CommonOptions taylor_common;
  std::vector<double> taylor_eps = {1e-4, 1e-3, 1e-2, 1e-1};
  std::string taylor_out;
  CLI::App* taylor = verify->add_subcommand(
      "taylor", "expansion remainder convergence orders");
  add_common(taylor, taylor_common);
  taylor->add_option("--eps", taylor_eps, "expansion scales")->delimiter(',');
  taylor->add_option("--out", taylor_out,
                     "JSON output path (CSV twin next to it)");

  CommonOptions modes_common;
  int modes_samples = 20;
  CLI::App* modes = verify->add_subcommand(
      "modes", "agreement of the three second-order compositions");
  add_common(modes, modes_common);
  modes->add_option("--samples", modes_samples, "number of draws")
      ->check(CLI::PositiveNumber);

  CommonOptions opt_common;
  std::string opt_name;
  int opt_max_iter = 100;
  std::string opt_out = "run";
  CLI::App* optimize =
      app.add_subcommand("optimize", "run one optimizer on a benchmark");
  add_common(optimize, opt_common);
  optimize->add_option("--alpha", opt_common.alpha, "regularization weight")
      ->check(CLI::NonNegativeNumber);
  optimize
      ->add_option("--optimizer", opt_name,
                   "lbfgs, newton-cg-ad, or newton-cg-fd")
      ->required();
  optimize->add_option("--max-iter", opt_max_iter, "outer iteration cap")
      ->check(CLI::PositiveNumber);
  optimize->add_option("--out", opt_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (fd->parsed()) return run_fd(fd_common, fd_h, fd_samples, fd_out);
    if (taylor->parsed())
      return run_taylor(taylor_common, taylor_eps, taylor_out);
    if (modes->parsed()) return run_modes(modes_common, modes_samples);
    if (optimize->parsed())
      return run_optimize(opt_common, opt_name, opt_max_iter, opt_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGateFailed;
  }
  return kExitUsage;
}
