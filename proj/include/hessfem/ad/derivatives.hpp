#pragma once

#include <span>
#include <vector>

#include "hessfem/ad/kernel.hpp"

namespace hessfem::ad {

// How a second-order quantity nests the two first-order propagation passes.
enum class Mode {
  FwdOverRev,  // tangent-carrying values through a recorded cotangent sweep
  RevOverFwd,  // cotangent sweep over a recorded tangent propagation
  RevOverRev,  // cotangent sweep over a symbolically expanded cotangent sweep
};

std::vector<double> eval(const KernelFunction& f, std::span<const double> x,
                         std::span<const double> data = {});

// (∂f/∂x)·v_t by one forward pass with dual scalars.
std::vector<double> jvp(const KernelFunction& f, std::span<const double> x,
                        std::span<const double> v_t,
                        std::span<const double> data = {});

// v_cᵀ·(∂f/∂x) by one recorded forward pass plus one reverse sweep.
std::vector<double> vjp(const KernelFunction& f, std::span<const double> x,
                        std::span<const double> v_c,
                        std::span<const double> data = {});

// The uncontracted second-order engine: ∂/∂x [ wᵀ·(∂f/∂x)·d ], an
// arity_in-sized vector. All three modes compute the same quantity with
// different nesting; they agree to roundoff.
std::vector<double> second_order_grad(const KernelFunction& f,
                                      std::span<const double> x,
                                      std::span<const double> w,
                                      std::span<const double> d, Mode mode,
                                      std::span<const double> data = {});

// Second-order directional quantity in the requested nesting. For
// scalar-output f both directions contract: the result is the single value
// leftᵀ·(∂²f/∂x²)·right. For vector-output f, `left` is the output cotangent
// and the result is ∂/∂x [ leftᵀ·(∂f/∂x)·right ].
std::vector<double> compose_second_order(const KernelFunction& f,
                                         std::span<const double> x, Mode mode,
                                         std::span<const double> left,
                                         std::span<const double> right,
                                         std::span<const double> data = {});

}  // namespace hessfem::ad
