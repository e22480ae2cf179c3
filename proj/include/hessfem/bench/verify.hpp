#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hessfem/implicit/problem.hpp"

namespace hessfem::bench {

struct TaylorSample {
  double eps = 0.0;
  double r_zeroth = 0.0;
  double r_first = 0.0;
  double r_second = 0.0;
};

// Remainders of the zeroth, first, and second order expansions of the
// reduced objective along a fixed direction, with the observed convergence
// orders fitted by least squares on the log-log points. Remainders below
// 1e-14 are floored by roundoff rather than by the expansion error, so they
// are excluded from the fit and counted; a slope is NaN when fewer than two
// points survive.
struct TaylorReport {
  std::vector<TaylorSample> samples;
  double slope_zeroth = 0.0;
  double slope_first = 0.0;
  double slope_second = 0.0;
  int excluded_zeroth = 0;
  int excluded_first = 0;
  int excluded_second = 0;
};

inline constexpr double kTaylorExclusionFloor = 1e-14;

// Evaluates g(theta + eps * dtheta) for every eps and subtracts the Taylor
// polynomial built from one gradient and one Hessian-vector product at
// theta. The quadratic term is (eps^2 / 2) * dtheta . hvp(theta, dtheta).
// Requires at least three positive eps values spanning two decades.
TaylorReport run_taylor_test(const implicit::ImplicitProblem& p,
                             std::span<const double> theta,
                             std::span<const double> dtheta,
                             std::span<const double> eps_list);

bool taylor_slopes_ok(const TaylorReport& report, double tol = 0.1);

struct FdRecord {
  double h = 0.0;
  int sample = 0;
  double e_v = 0.0;   // |v_ad - v_fd| / |v_ad|, 2-norms
  double e_s = 0.0;   // |s_fd - s_ad| / |s_ad|, s = ttheta . v
  bool skipped = false;
};

struct FdReport {
  std::vector<FdRecord> records;  // h-major, then sample index
  std::uint64_t seed = 0;
  int n_skipped = 0;
};

// Central-difference cross-check of the Hessian-vector product. For every
// step size and sample index an independent standard normal triple
// (theta, theta_hat, theta_tilde) is drawn from a stream keyed on
// (seed, step index, sample index), so records do not depend on execution
// order and samples may run on several threads. A draw whose forward solve
// fails is recorded with the skipped flag instead of aborting the campaign.
FdReport run_fd_comparison(const implicit::ImplicitProblem& p,
                           std::span<const double> h_list, int n_samples,
                           std::uint64_t seed);

// Per-step-size aggregates over the non-skipped records.
struct FdSummary {
  std::vector<double> h;
  std::vector<double> max_e_v;
  std::vector<double> median_e_v;
  std::vector<double> max_e_s;
  int n_skipped = 0;
};

FdSummary summarize_fd(const FdReport& report);

struct ModeRecord {
  int sample = 0;
  // Pairwise |a - b| / max(|a|, |b|) between the three second-order
  // compositions: forward-over-reverse, reverse-over-forward,
  // reverse-over-reverse.
  double d_fr_rf = 0.0;
  double d_fr_rr = 0.0;
  double d_rf_rr = 0.0;
};

// Same Hessian-vector product computed under each composition on a shared
// converged state; disagreement isolates the nested-derivative sweeps.
// Restores the problem's mode setting before returning.
std::vector<ModeRecord> run_mode_agreement(implicit::ImplicitProblem& p,
                                           int n_samples, std::uint64_t seed);

// Fills a span with independent standard normal draws from a freshly keyed
// generator; the verification campaigns and the bake-off share this stream
// construction so seeds mean the same thing everywhere.
void seeded_normal(std::span<double> out, std::uint64_t seed,
                   std::uint64_t stream);

}  // namespace hessfem::bench
