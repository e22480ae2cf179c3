#include "hessfem/ad/derivatives.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace hessfem::ad {

namespace {

void check_length(std::span<const double> v, int expected, const char* what) {
  if (static_cast<int>(v.size()) != expected)
    throw std::invalid_argument(std::string("ad: bad length for ") + what);
}

}  // namespace

std::vector<double> eval(const KernelFunction& f, std::span<const double> x,
                         std::span<const double> data) {
  check_length(x, f.arity_in(), "x");
  std::vector<double> out(f.arity_out());
  f(std::span<const double>(x), data, std::span<double>(out));
  return out;
}

std::vector<double> jvp(const KernelFunction& f, std::span<const double> x,
                        std::span<const double> v_t,
                        std::span<const double> data) {
  check_length(x, f.arity_in(), "x");
  check_length(v_t, f.arity_in(), "v_t");
  std::vector<DualScalar> in;
  in.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    in.push_back(DualScalar(x[i], v_t[i]));
  std::vector<DualScalar> out(f.arity_out());
  f(std::span<const DualScalar>(in), data, std::span<DualScalar>(out));
  std::vector<double> result(out.size());
  for (std::size_t j = 0; j < out.size(); ++j) result[j] = out[j].tangent;
  return result;
}

std::vector<double> vjp(const KernelFunction& f, std::span<const double> x,
                        std::span<const double> v_c,
                        std::span<const double> data) {
  check_length(x, f.arity_in(), "x");
  check_length(v_c, f.arity_out(), "v_c");
  Trace<double> trace;
  std::vector<RecScalar> in;
  in.reserve(x.size());
  for (double xi : x) in.push_back(trace.input(xi));
  std::vector<RecScalar> out(f.arity_out());
  f(std::span<const RecScalar>(in), data, std::span<RecScalar>(out));
  std::vector<std::pair<std::int32_t, double>> seeds;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (out[j].on_trace()) {
      trace.mark_output(out[j].id());
      seeds.emplace_back(out[j].id(), v_c[j]);
    }
  }
  auto adj = trace.reverse_sweep(
      std::span<const std::pair<std::int32_t, double>>(seeds));
  std::vector<double> result(x.size());
  auto ids = trace.input_ids();
  for (std::size_t i = 0; i < x.size(); ++i) result[i] = adj[ids[i]];
  return result;
}

namespace {

// Record the cotangent sweep with tangent-carrying values: inputs (x_i, d_i),
// output seeds (w_j, 0); the tangent slot of each input adjoint is the result.
std::vector<double> second_fwd_over_rev(const KernelFunction& f,
                                        std::span<const double> x,
                                        std::span<const double> w,
                                        std::span<const double> d,
                                        std::span<const double> data) {
  Trace<DualScalar> trace;
  std::vector<RecDual> in;
  in.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    in.push_back(trace.input(DualScalar(x[i], d[i])));
  std::vector<RecDual> out(f.arity_out());
  f(std::span<const RecDual>(in), data, std::span<RecDual>(out));
  std::vector<std::pair<std::int32_t, DualScalar>> seeds;
  for (std::size_t j = 0; j < out.size(); ++j)
    if (out[j].on_trace())
      seeds.emplace_back(out[j].id(), DualScalar(w[j], 0.0));
  auto adj = trace.reverse_sweep(
      std::span<const std::pair<std::int32_t, DualScalar>>(seeds));
  std::vector<double> result(x.size());
  auto ids = trace.input_ids();
  for (std::size_t i = 0; i < x.size(); ++i) result[i] = adj[ids[i]].tangent;
  return result;
}

// Record the tangent propagation (tangent direction d held constant), then
// reverse-sweep from the tangent outputs seeded with w.
std::vector<double> second_rev_over_fwd(const KernelFunction& f,
                                        std::span<const double> x,
                                        std::span<const double> w,
                                        std::span<const double> d,
                                        std::span<const double> data) {
  Trace<double> trace;
  std::vector<DualRec> in;
  in.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    in.push_back(DualRec(trace.input(x[i]), Var<double>(d[i])));
  std::vector<DualRec> out(f.arity_out());
  f(std::span<const DualRec>(in), data, std::span<DualRec>(out));
  std::vector<std::pair<std::int32_t, double>> seeds;
  for (std::size_t j = 0; j < out.size(); ++j)
    if (out[j].tangent.on_trace())
      seeds.emplace_back(out[j].tangent.id(), w[j]);
  auto adj = trace.reverse_sweep(
      std::span<const std::pair<std::int32_t, double>>(seeds));
  std::vector<double> result(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    result[i] = in[i].primal.on_trace() ? adj[in[i].primal.id()] : 0.0;
  return result;
}

// Expand the cotangent sweep symbolically on the same trace, contract the
// input adjoints with d, and reverse-sweep the contraction.
std::vector<double> second_rev_over_rev(const KernelFunction& f,
                                        std::span<const double> x,
                                        std::span<const double> w,
                                        std::span<const double> d,
                                        std::span<const double> data) {
  Trace<double> trace;
  std::vector<RecScalar> in;
  in.reserve(x.size());
  for (double xi : x) in.push_back(trace.input(xi));
  std::vector<RecScalar> out(f.arity_out());
  f(std::span<const RecScalar>(in), data, std::span<RecScalar>(out));
  std::vector<std::pair<std::int32_t, double>> seeds;
  for (std::size_t j = 0; j < out.size(); ++j)
    if (out[j].on_trace()) seeds.emplace_back(out[j].id(), w[j]);
  auto cot = trace.symbolic_sweep(
      std::span<const std::pair<std::int32_t, double>>(seeds));
  auto ids = trace.input_ids();
  RecScalar contraction(0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    contraction = contraction + cot[ids[i]] * d[i];
  std::vector<double> result(x.size(), 0.0);
  if (!contraction.on_trace()) return result;
  std::pair<std::int32_t, double> seed2[] = {{contraction.id(), 1.0}};
  auto adj = trace.reverse_sweep(
      std::span<const std::pair<std::int32_t, double>>(seed2));
  for (std::size_t i = 0; i < x.size(); ++i) result[i] = adj[ids[i]];
  return result;
}

}  // namespace

std::vector<double> second_order_grad(const KernelFunction& f,
                                      std::span<const double> x,
                                      std::span<const double> w,
                                      std::span<const double> d, Mode mode,
                                      std::span<const double> data) {
  check_length(x, f.arity_in(), "x");
  check_length(w, f.arity_out(), "w");
  check_length(d, f.arity_in(), "d");
  switch (mode) {
    case Mode::FwdOverRev: return second_fwd_over_rev(f, x, w, d, data);
    case Mode::RevOverFwd: return second_rev_over_fwd(f, x, w, d, data);
    case Mode::RevOverRev: return second_rev_over_rev(f, x, w, d, data);
  }
  throw std::invalid_argument("second_order_grad: unsupported mode");
}

std::vector<double> compose_second_order(const KernelFunction& f,
                                         std::span<const double> x, Mode mode,
                                         std::span<const double> left,
                                         std::span<const double> right,
                                         std::span<const double> data) {
  if (f.arity_out() == 1) {
    check_length(left, f.arity_in(), "left");
    double one[] = {1.0};
    auto q = second_order_grad(f, x, one, right, mode, data);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) acc += left[i] * q[i];
    return {acc};
  }
  return second_order_grad(f, x, left, right, mode, data);
}

}  // namespace hessfem::ad
