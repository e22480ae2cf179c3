#pragma once

#include <concepts>
#include <functional>
#include <span>
#include <stdexcept>
#include <type_traits>

#include "hessfem/ad/trace.hpp"

namespace hessfem::ad {

using Dual2 = Dual<DualScalar>;      // nested tangents, second order
using RecScalar = Var<double>;       // reverse-mode recording scalar
using RecDual = Var<DualScalar>;     // trace over dual values (tangent-carrying reverse)
using DualRec = Dual<Var<double>>;   // dual over recorded values (reverse over forward)

template <class S>
S dot(std::span<const S> a, std::span<const S> b) {
  S acc(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

template <class S>
  requires(!std::same_as<S, double>)
S dot(std::span<const S> a, std::span<const double> b) {
  S acc(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

// A twice-differentiable map from an input vector to an output vector,
// expressible over the supported operation set {+, -, *, /, exp, log, sin,
// cos, pow, dot}. The callable is erased at every scalar type the derivative
// drivers need, so one kernel instance serves plain evaluation, tangent and
// cotangent propagation, and all three second-order compositions. The `data`
// span carries auxiliary plain-double values (coordinates, observations,
// weights) that are never differentiated.
class KernelFunction {
 public:
  // Empty kernel; calling it throws. Lets owning structs default-construct.
  KernelFunction() = default;

  template <class F>
  KernelFunction(int arity_in, int arity_out, F f)
      : arity_in_(arity_in),
        arity_out_(arity_out),
        f_real_(f),
        f_dual_(f),
        f_dual2_(f),
        f_rec_(f),
        f_rec_dual_(f),
        f_dual_rec_(f) {
    if (arity_in < 0 || arity_out < 1)
      throw std::invalid_argument("KernelFunction: bad arity");
  }

  int arity_in() const { return arity_in_; }
  int arity_out() const { return arity_out_; }

  bool empty() const { return !f_real_; }

  template <class S>
  void operator()(std::span<const S> in, std::span<const double> data,
                  std::span<S> out) const {
    if (empty()) throw std::logic_error("KernelFunction: empty kernel");
    if (static_cast<int>(in.size()) != arity_in_ ||
        static_cast<int>(out.size()) != arity_out_)
      throw std::invalid_argument("KernelFunction: arity mismatch");
    if constexpr (std::is_same_v<S, double>) {
      f_real_(in, data, out);
    } else if constexpr (std::is_same_v<S, DualScalar>) {
      f_dual_(in, data, out);
    } else if constexpr (std::is_same_v<S, Dual2>) {
      f_dual2_(in, data, out);
    } else if constexpr (std::is_same_v<S, RecScalar>) {
      f_rec_(in, data, out);
    } else if constexpr (std::is_same_v<S, RecDual>) {
      f_rec_dual_(in, data, out);
    } else if constexpr (std::is_same_v<S, DualRec>) {
      f_dual_rec_(in, data, out);
    } else {
      static_assert(!sizeof(S), "scalar type outside the supported set");
    }
  }

 private:
  template <class S>
  using ErasedFn =
      std::function<void(std::span<const S>, std::span<const double>,
                         std::span<S>)>;

  int arity_in_ = 0;
  int arity_out_ = 0;
  ErasedFn<double> f_real_;
  ErasedFn<DualScalar> f_dual_;
  ErasedFn<Dual2> f_dual2_;
  ErasedFn<RecScalar> f_rec_;
  ErasedFn<RecDual> f_rec_dual_;
  ErasedFn<DualRec> f_dual_rec_;
};

}  // namespace hessfem::ad
