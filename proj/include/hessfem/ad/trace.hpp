#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hessfem/ad/dual.hpp"

namespace hessfem::ad {

enum class Op : std::uint8_t {
  Input,
  Constant,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Exp,
  Log,
  Sin,
  Cos,
  Pow,
};

template <class T>
struct Node {
  Op op;
  std::int32_t lhs;
  std::int32_t rhs;
  T value;
  double exponent;  // Pow only
};

template <class T>
class Trace;

// Handle to a recorded value. A Var either points at a trace node or holds a
// plain double literal; literals are materialized as Constant nodes only when
// they meet a recorded operand, so double constants in kernel code cost
// nothing until used.
template <class T>
class Var {
 public:
  Var() : lit_(0.0) {}
  Var(double c) : lit_(c) {}
  Var(Trace<T>* trace, std::int32_t id) : trace_(trace), id_(id) {}

  bool on_trace() const { return trace_ != nullptr; }
  std::int32_t id() const { return id_; }
  Trace<T>* trace() const { return trace_; }
  double literal() const { return lit_; }

  T value() const;

 private:
  Trace<T>* trace_ = nullptr;
  std::int32_t id_ = -1;
  double lit_ = 0.0;
};

template <class T>
T apply_unary(Op op, const T& a, double exponent) {
  switch (op) {
    case Op::Neg: return -a;
    case Op::Exp: return exp(a);
    case Op::Log: return log(a);
    case Op::Sin: return sin(a);
    case Op::Cos: return cos(a);
    case Op::Pow: return pow(a, exponent);
    default: throw std::logic_error("apply_unary: not a unary op");
  }
}

template <class T>
T apply_binary(Op op, const T& a, const T& b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    default: throw std::logic_error("apply_binary: not a binary op");
  }
}

// Recorded computation: a topologically ordered node list where every operand
// index precedes its consumer. Fresh instance per derivative call.
template <class T>
class Trace {
 public:
  Var<T> input(T v) {
    std::int32_t id = emit(Op::Input, -1, -1, std::move(v));
    inputs_.push_back(id);
    return Var<T>(this, id);
  }

  Var<T> constant(T v) {
    return Var<T>(this, emit(Op::Constant, -1, -1, std::move(v)));
  }

  std::int32_t emit(Op op, std::int32_t lhs, std::int32_t rhs, T value,
                    double exponent = 0.0) {
    nodes_.push_back(Node<T>{op, lhs, rhs, std::move(value), exponent});
    return static_cast<std::int32_t>(nodes_.size()) - 1;
  }

  const std::vector<Node<T>>& nodes() const { return nodes_; }
  std::span<const std::int32_t> input_ids() const { return inputs_; }
  std::size_t size() const { return nodes_.size(); }

  void mark_output(std::int32_t id) { outputs_.push_back(id); }
  std::span<const std::int32_t> output_ids() const { return outputs_; }

  const T& value_of(std::int32_t id) const { return nodes_[id].value; }

  // Re-executes the node list from inputs and constants; the result must
  // reproduce the stored primal values bit-exactly.
  std::vector<T> replay() const {
    std::vector<T> vals;
    vals.reserve(nodes_.size());
    for (const Node<T>& n : nodes_) {
      switch (n.op) {
        case Op::Input:
        case Op::Constant:
          vals.push_back(n.value);
          break;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
          vals.push_back(apply_binary(n.op, vals[n.lhs], vals[n.rhs]));
          break;
        default:
          vals.push_back(apply_unary(n.op, vals[n.lhs], n.exponent));
          break;
      }
    }
    return vals;
  }

  // Value-mode reverse sweep: propagates cotangent values of type T from the
  // seeded nodes back to every node; returns the full adjoint array.
  std::vector<T> reverse_sweep(
      std::span<const std::pair<std::int32_t, T>> seeds) const {
    std::vector<T> adj(nodes_.size(), T(0.0));
    for (const auto& [id, w] : seeds) adj[id] = adj[id] + w;
    for (std::int32_t k = static_cast<std::int32_t>(nodes_.size()) - 1; k >= 0;
         --k) {
      const Node<T>& n = nodes_[k];
      if (is_zero(adj[k])) continue;
      const T& w = adj[k];
      switch (n.op) {
        case Op::Input:
        case Op::Constant:
          break;
        case Op::Add:
          adj[n.lhs] = adj[n.lhs] + w;
          adj[n.rhs] = adj[n.rhs] + w;
          break;
        case Op::Sub:
          adj[n.lhs] = adj[n.lhs] + w;
          adj[n.rhs] = adj[n.rhs] - w;
          break;
        case Op::Mul:
          adj[n.lhs] = adj[n.lhs] + w * nodes_[n.rhs].value;
          adj[n.rhs] = adj[n.rhs] + w * nodes_[n.lhs].value;
          break;
        case Op::Div:
          adj[n.lhs] = adj[n.lhs] + w / nodes_[n.rhs].value;
          adj[n.rhs] = adj[n.rhs] - (w * n.value) / nodes_[n.rhs].value;
          break;
        case Op::Neg:
          adj[n.lhs] = adj[n.lhs] - w;
          break;
        case Op::Exp:
          adj[n.lhs] = adj[n.lhs] + w * n.value;
          break;
        case Op::Log:
          adj[n.lhs] = adj[n.lhs] + w / nodes_[n.lhs].value;
          break;
        case Op::Sin:
          adj[n.lhs] = adj[n.lhs] + w * cos(nodes_[n.lhs].value);
          break;
        case Op::Cos:
          adj[n.lhs] = adj[n.lhs] - w * sin(nodes_[n.lhs].value);
          break;
        case Op::Pow:
          if (n.exponent != 0.0)
            adj[n.lhs] =
                adj[n.lhs] +
                w * (n.exponent * pow(nodes_[n.lhs].value, n.exponent - 1.0));
          break;
      }
    }
    return adj;
  }

  // Symbolic reverse sweep: the adjoint of each original node is expressed as
  // a Var over this same trace, appending the nodes that compute it. The
  // returned handles cover the node range present at entry; untouched nodes
  // come back as literal zero.
  std::vector<Var<T>> symbolic_sweep(
      std::span<const std::pair<std::int32_t, double>> seeds) {
    const std::int32_t n0 = static_cast<std::int32_t>(nodes_.size());
    std::vector<Var<T>> adj(n0);
    std::vector<char> set(n0, 0);
    auto acc = [&](std::int32_t i, Var<T> v) {
      if (!set[i]) {
        adj[i] = v;
        set[i] = 1;
      } else {
        adj[i] = adj[i] + v;
      }
    };
    for (const auto& [id, w] : seeds) acc(id, Var<T>(w));
    for (std::int32_t k = n0 - 1; k >= 0; --k) {
      if (!set[k]) continue;
      const Node<T> n = nodes_[k];  // copy: the node vector may reallocate
      Var<T> w = adj[k];
      if (!w.on_trace() && w.literal() == 0.0) continue;
      Var<T> va(this, n.lhs);
      Var<T> vb(this, n.rhs);
      Var<T> vk(this, k);
      switch (n.op) {
        case Op::Input:
        case Op::Constant:
          break;
        case Op::Add:
          acc(n.lhs, w);
          acc(n.rhs, w);
          break;
        case Op::Sub:
          acc(n.lhs, w);
          acc(n.rhs, -w);
          break;
        case Op::Mul:
          acc(n.lhs, w * vb);
          acc(n.rhs, w * va);
          break;
        case Op::Div:
          acc(n.lhs, w / vb);
          acc(n.rhs, -((w * vk) / vb));
          break;
        case Op::Neg:
          acc(n.lhs, -w);
          break;
        case Op::Exp:
          acc(n.lhs, w * vk);
          break;
        case Op::Log:
          acc(n.lhs, w / va);
          break;
        case Op::Sin:
          acc(n.lhs, w * cos(va));
          break;
        case Op::Cos:
          acc(n.lhs, -(w * sin(va)));
          break;
        case Op::Pow:
          if (n.exponent == 1.0) {
            acc(n.lhs, w);
          } else if (n.exponent != 0.0) {
            acc(n.lhs, w * (pow(va, n.exponent - 1.0) * n.exponent));
          }
          break;
      }
    }
    return adj;
  }

 private:
  std::vector<Node<T>> nodes_;
  std::vector<std::int32_t> inputs_;
  std::vector<std::int32_t> outputs_;
};

template <class T>
T Var<T>::value() const {
  return trace_ ? trace_->value_of(id_) : T(lit_);
}

namespace detail {

template <class T>
std::int32_t materialize(Trace<T>* trace, const Var<T>& v) {
  if (v.on_trace()) {
    if (v.trace() != trace)
      throw std::logic_error("Var: operands recorded on different traces");
    return v.id();
  }
  return trace->constant(T(v.literal())).id();
}

template <class T>
Var<T> emit_binary(Op op, const Var<T>& a, const Var<T>& b,
                   Trace<T>* trace) {
  std::int32_t ia = materialize(trace, a);
  std::int32_t ib = materialize(trace, b);
  T value = apply_binary(op, trace->value_of(ia), trace->value_of(ib));
  return Var<T>(trace, trace->emit(op, ia, ib, std::move(value)));
}

template <class T>
Var<T> emit_unary(Op op, const Var<T>& a, double exponent = 0.0) {
  Trace<T>* trace = a.trace();
  T value = apply_unary(op, trace->value_of(a.id()), exponent);
  return Var<T>(trace, trace->emit(op, a.id(), -1, std::move(value), exponent));
}

}  // namespace detail

template <class T>
double leaf_value(const Var<T>& v) {
  return leaf_value(v.value());
}

template <class T>
Var<T> operator+(const Var<T>& a, const Var<T>& b) {
  if (!a.on_trace() && !b.on_trace()) return Var<T>(a.literal() + b.literal());
  if (!a.on_trace() && a.literal() == 0.0) return b;
  if (!b.on_trace() && b.literal() == 0.0) return a;
  return detail::emit_binary(Op::Add, a, b, a.on_trace() ? a.trace() : b.trace());
}
template <class T>
Var<T> operator+(const Var<T>& a, double c) {
  return a + Var<T>(c);
}
template <class T>
Var<T> operator+(double c, const Var<T>& b) {
  return Var<T>(c) + b;
}

template <class T>
Var<T> operator-(const Var<T>& a) {
  if (!a.on_trace()) return Var<T>(-a.literal());
  return detail::emit_unary(Op::Neg, a);
}

template <class T>
Var<T> operator-(const Var<T>& a, const Var<T>& b) {
  if (!a.on_trace() && !b.on_trace()) return Var<T>(a.literal() - b.literal());
  if (!b.on_trace() && b.literal() == 0.0) return a;
  if (!a.on_trace() && a.literal() == 0.0) return -b;
  return detail::emit_binary(Op::Sub, a, b, a.on_trace() ? a.trace() : b.trace());
}
template <class T>
Var<T> operator-(const Var<T>& a, double c) {
  return a - Var<T>(c);
}
template <class T>
Var<T> operator-(double c, const Var<T>& b) {
  return Var<T>(c) - b;
}

template <class T>
Var<T> operator*(const Var<T>& a, const Var<T>& b) {
  if (!a.on_trace() && !b.on_trace()) return Var<T>(a.literal() * b.literal());
  if (!a.on_trace()) {
    if (a.literal() == 0.0) return Var<T>(0.0);
    if (a.literal() == 1.0) return b;
  }
  if (!b.on_trace()) {
    if (b.literal() == 0.0) return Var<T>(0.0);
    if (b.literal() == 1.0) return a;
  }
  return detail::emit_binary(Op::Mul, a, b, a.on_trace() ? a.trace() : b.trace());
}
template <class T>
Var<T> operator*(const Var<T>& a, double c) {
  return a * Var<T>(c);
}
template <class T>
Var<T> operator*(double c, const Var<T>& b) {
  return Var<T>(c) * b;
}

template <class T>
Var<T> operator/(const Var<T>& a, const Var<T>& b) {
  check_divisor(leaf_value(b));
  if (!a.on_trace() && !b.on_trace()) return Var<T>(a.literal() / b.literal());
  if (!a.on_trace() && a.literal() == 0.0) return Var<T>(0.0);
  if (!b.on_trace() && b.literal() == 1.0) return a;
  return detail::emit_binary(Op::Div, a, b, a.on_trace() ? a.trace() : b.trace());
}
template <class T>
Var<T> operator/(const Var<T>& a, double c) {
  return a / Var<T>(c);
}
template <class T>
Var<T> operator/(double c, const Var<T>& b) {
  return Var<T>(c) / b;
}

template <class T>
Var<T> exp(const Var<T>& a) {
  if (!a.on_trace()) return Var<T>(exp(a.literal()));
  return detail::emit_unary(Op::Exp, a);
}

template <class T>
Var<T> log(const Var<T>& a) {
  if (!a.on_trace()) return Var<T>(log(a.literal()));
  return detail::emit_unary(Op::Log, a);
}

template <class T>
Var<T> sin(const Var<T>& a) {
  if (!a.on_trace()) return Var<T>(sin(a.literal()));
  return detail::emit_unary(Op::Sin, a);
}

template <class T>
Var<T> cos(const Var<T>& a) {
  if (!a.on_trace()) return Var<T>(cos(a.literal()));
  return detail::emit_unary(Op::Cos, a);
}

template <class T>
Var<T> pow(const Var<T>& a, double exponent) {
  if (!a.on_trace()) return Var<T>(pow(a.literal(), exponent));
  return detail::emit_unary(Op::Pow, a, exponent);
}

}  // namespace hessfem::ad
