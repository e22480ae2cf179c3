#include "hessfem/bench/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hessfem/implicit/engine.hpp"

namespace hessfem::bench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::mt19937_64 make_generator(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq sq{static_cast<std::uint32_t>(seed),
                   static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(stream),
                   static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(sq);
}

void fill_normal(std::mt19937_64& rng, std::span<double> out) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& v : out) v = n(rng);
}

struct SlopeFit {
  double slope = kNaN;
  int excluded = 0;
};

SlopeFit fit_slope(const std::vector<TaylorSample>& samples,
                   double TaylorSample::*member) {
  std::vector<double> x, y;
  SlopeFit fit;
  for (const TaylorSample& s : samples) {
    const double r = s.*member;
    if (r < kTaylorExclusionFloor) {
      ++fit.excluded;
      continue;
    }
    x.push_back(std::log(s.eps));
    y.push_back(std::log(r));
  }
  const std::size_t n = x.size();
  if (n < 2) return fit;
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  fit.slope = sxy / sxx;
  return fit;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void seeded_normal(std::span<double> out, std::uint64_t seed,
                   std::uint64_t stream) {
  std::mt19937_64 rng = make_generator(seed, stream);
  fill_normal(rng, out);
}

TaylorReport run_taylor_test(const implicit::ImplicitProblem& p,
                             std::span<const double> theta,
                             std::span<const double> dtheta,
                             std::span<const double> eps_list) {
  const std::size_t m = static_cast<std::size_t>(p.n_param());
  if (theta.size() != m || dtheta.size() != m)
    throw std::invalid_argument("run_taylor_test: vector length mismatch");
  if (eps_list.size() < 3)
    throw std::invalid_argument("run_taylor_test: need at least three eps");
  double lo = eps_list[0], hi = eps_list[0];
  for (double e : eps_list) {
    if (!(e > 0.0))
      throw std::invalid_argument("run_taylor_test: eps must be positive");
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (hi < 100.0 * lo)
    throw std::invalid_argument(
        "run_taylor_test: eps list must span at least two decades");

  implicit::HvpWorkspace ws;
  const double g0 = implicit::objective_value(p, theta, ws);
  const std::vector<double> grad = implicit::gradient(p, theta, ws);
  const std::vector<double> hv = implicit::hvp(p, theta, dtheta, ws);
  const double slope1 = dot(grad, dtheta);
  const double curvature = 0.5 * dot(dtheta, hv);

  TaylorReport report;
  std::vector<double> shifted(m);
  for (double eps : eps_list) {
    for (std::size_t i = 0; i < m; ++i) shifted[i] = theta[i] + eps * dtheta[i];
    const double ge = implicit::objective_value(p, shifted);
    TaylorSample s;
    s.eps = eps;
    s.r_zeroth = std::abs(ge - g0);
    s.r_first = std::abs(ge - g0 - eps * slope1);
    s.r_second = std::abs(ge - g0 - eps * slope1 - eps * eps * curvature);
    report.samples.push_back(s);
  }

  const SlopeFit f0 = fit_slope(report.samples, &TaylorSample::r_zeroth);
  const SlopeFit f1 = fit_slope(report.samples, &TaylorSample::r_first);
  const SlopeFit f2 = fit_slope(report.samples, &TaylorSample::r_second);
  report.slope_zeroth = f0.slope;
  report.slope_first = f1.slope;
  report.slope_second = f2.slope;
  report.excluded_zeroth = f0.excluded;
  report.excluded_first = f1.excluded;
  report.excluded_second = f2.excluded;
  return report;
}

bool taylor_slopes_ok(const TaylorReport& report, double tol) {
  const int n = static_cast<int>(report.samples.size());
  const auto order_ok = [&](double slope, int excluded, double target) {
    // Every residual at roundoff means the expansion is exact to machine
    // precision, which verifies the order trivially.
    if (excluded == n) return true;
    return std::isfinite(slope) && std::abs(slope - target) <= tol;
  };
  return order_ok(report.slope_zeroth, report.excluded_zeroth, 1.0) &&
         order_ok(report.slope_first, report.excluded_first, 2.0) &&
         order_ok(report.slope_second, report.excluded_second, 3.0);
}

FdReport run_fd_comparison(const implicit::ImplicitProblem& p,
                           std::span<const double> h_list, int n_samples,
                           std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("run_fd_comparison: need at least one sample");
  if (h_list.empty())
    throw std::invalid_argument("run_fd_comparison: empty step list");
  for (double h : h_list)
    if (!(h > 0.0))
      throw std::invalid_argument("run_fd_comparison: steps must be positive");

  const std::size_t m = static_cast<std::size_t>(p.n_param());
  const std::size_t total = h_list.size() * static_cast<std::size_t>(n_samples);

  FdReport report;
  report.seed = seed;
  report.records.resize(total);

  std::atomic<std::size_t> next{0};
  std::atomic<int> skipped{0};
  std::exception_ptr first_error;
  std::mutex error_mu;

  const auto worker = [&]() {
    std::vector<double> theta(m), that(m), ttilde(m), shifted(m);
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const std::size_t hi = idx / static_cast<std::size_t>(n_samples);
      const std::size_t si = idx % static_cast<std::size_t>(n_samples);
      const double h = h_list[hi];

      FdRecord rec;
      rec.h = h;
      rec.sample = static_cast<int>(si);

      // Stream key depends only on (step index, sample index), so adding
      // steps or samples never changes earlier draws.
      std::mt19937_64 rng = make_generator(seed, (hi << 32) | si);
      fill_normal(rng, theta);
      fill_normal(rng, that);
      fill_normal(rng, ttilde);

      try {
        implicit::HvpWorkspace ws;
        const std::vector<double> v_ad = implicit::hvp(p, theta, that, ws);
        for (std::size_t i = 0; i < m; ++i) shifted[i] = theta[i] + h * that[i];
        const std::vector<double> gp = implicit::gradient(p, shifted);
        for (std::size_t i = 0; i < m; ++i) shifted[i] = theta[i] - h * that[i];
        const std::vector<double> gm = implicit::gradient(p, shifted);

        std::vector<double> diff(m);
        double s_fd = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double v_fd = (gp[i] - gm[i]) / (2.0 * h);
          diff[i] = v_ad[i] - v_fd;
          s_fd += ttilde[i] * v_fd;
        }
        const double s_ad = dot(ttilde, v_ad);
        rec.e_v = norm2(diff) / norm2(v_ad);
        rec.e_s = std::abs(s_fd - s_ad) / std::abs(s_ad);
      } catch (const std::runtime_error&) {
        rec.e_v = kNaN;
        rec.e_s = kNaN;
        rec.skipped = true;
        skipped.fetch_add(1);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
      report.records[idx] = rec;
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min<std::size_t>({hw, total, 8});
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  report.n_skipped = skipped.load();
  return report;
}

FdSummary summarize_fd(const FdReport& report) {
  FdSummary out;
  out.n_skipped = report.n_skipped;
  std::size_t i = 0;
  while (i < report.records.size()) {
    const double h = report.records[i].h;
    std::vector<double> ev, es;
    for (; i < report.records.size() && report.records[i].h == h; ++i) {
      if (report.records[i].skipped) continue;
      ev.push_back(report.records[i].e_v);
      es.push_back(report.records[i].e_s);
    }
    out.h.push_back(h);
    out.max_e_v.push_back(ev.empty() ? kNaN
                                     : *std::max_element(ev.begin(), ev.end()));
    out.median_e_v.push_back(median_of(ev));
    out.max_e_s.push_back(es.empty() ? kNaN
                                     : *std::max_element(es.begin(), es.end()));
  }
  return out;
}

std::vector<ModeRecord> run_mode_agreement(implicit::ImplicitProblem& p,
                                           int n_samples, std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("run_mode_agreement: need at least one sample");
  const std::size_t m = static_cast<std::size_t>(p.n_param());

  const ad::Mode saved = p.settings().hvp_mode;
  std::vector<ModeRecord> records;
  try {
    std::vector<double> theta(m), that(m);
    for (int s = 0; s < n_samples; ++s) {
      std::mt19937_64 rng =
          make_generator(seed, static_cast<std::uint64_t>(s));
      fill_normal(rng, theta);
      fill_normal(rng, that);

      // One converged state and factorization serve all three compositions.
      implicit::HvpWorkspace ws;
      constexpr ad::Mode kModes[3] = {ad::Mode::FwdOverRev,
                                      ad::Mode::RevOverFwd,
                                      ad::Mode::RevOverRev};
      std::vector<double> v[3];
      for (int k = 0; k < 3; ++k) {
        p.settings().hvp_mode = kModes[k];
        v[k] = implicit::hvp(p, theta, that, ws);
      }

      const auto rel = [&](const std::vector<double>& a,
                           const std::vector<double>& b) {
        std::vector<double> diff(m);
        for (std::size_t i = 0; i < m; ++i) diff[i] = a[i] - b[i];
        return norm2(diff) / std::max(norm2(a), norm2(b));
      };
      ModeRecord rec;
      rec.sample = s;
      rec.d_fr_rf = rel(v[0], v[1]);
      rec.d_fr_rr = rel(v[0], v[2]);
      rec.d_rf_rr = rel(v[1], v[2]);
      records.push_back(rec);
    }
  } catch (...) {
    p.settings().hvp_mode = saved;
    throw;
  }
  p.settings().hvp_mode = saved;
  return records;
}

}  // namespace hessfem::bench
