#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hessfem::ad {

// Math entry points for plain doubles. Generic kernel code calls these
// unqualified; the overloads for Dual and Var are found by ADL. The partial
// functions check their domain here, at the leaf, so every nesting level
// inherits the checks.
inline double exp(double x) { return std::exp(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }

inline double log(double x) {
  if (!(x > 0.0)) throw std::domain_error("log: argument must be positive");
  return std::log(x);
}

// Power with a constant real exponent. Negative bases are admitted only for
// integer exponents; a zero base needs exponent 0 or >= 1 so the derivative
// c*x^(c-1) stays finite.
inline double pow(double base, double exponent) {
  if (base < 0.0 && exponent != std::floor(exponent))
    throw std::domain_error("pow: negative base with non-integer exponent");
  if (base == 0.0 && exponent != 0.0 && exponent < 1.0)
    throw std::domain_error("pow: zero base with exponent below one");
  return std::pow(base, exponent);
}

inline double leaf_value(double x) { return x; }

inline bool is_zero(double x) { return x == 0.0; }

inline void check_divisor(double denominator_leaf) {
  if (denominator_leaf == 0.0) throw std::domain_error("division by zero");
}

// Forward-mode scalar carrying one tangent slot. The tangent may itself be a
// Dual, giving one level of nesting (second order); deeper nesting is outside
// the supported operation set.
template <class T>
struct Dual {
  T primal;
  T tangent;

  Dual() : primal(0.0), tangent(0.0) {}
  Dual(double v) : primal(v), tangent(0.0) {}
  Dual(T p, T t) : primal(std::move(p)), tangent(std::move(t)) {}
};

using DualScalar = Dual<double>;

template <class T>
double leaf_value(const Dual<T>& x) {
  return leaf_value(x.primal);
}

template <class T>
bool is_zero(const Dual<T>& x) {
  return is_zero(x.primal) && is_zero(x.tangent);
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.primal + b.primal, a.tangent + b.tangent};
}
template <class T>
Dual<T> operator+(const Dual<T>& a, double c) {
  return {a.primal + c, a.tangent};
}
template <class T>
Dual<T> operator+(double c, const Dual<T>& b) {
  return {c + b.primal, b.tangent};
}

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.primal - b.primal, a.tangent - b.tangent};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, double c) {
  return {a.primal - c, a.tangent};
}
template <class T>
Dual<T> operator-(double c, const Dual<T>& b) {
  return {c - b.primal, -b.tangent};
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.primal, -a.tangent};
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.primal * b.primal, a.primal * b.tangent + a.tangent * b.primal};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double c) {
  return {a.primal * c, a.tangent * c};
}
template <class T>
Dual<T> operator*(double c, const Dual<T>& b) {
  return {c * b.primal, c * b.tangent};
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  check_divisor(leaf_value(b.primal));
  T q = a.primal / b.primal;
  return {q, (a.tangent - q * b.tangent) / b.primal};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double c) {
  check_divisor(c);
  return {a.primal / c, a.tangent / c};
}
template <class T>
Dual<T> operator/(double c, const Dual<T>& b) {
  check_divisor(leaf_value(b.primal));
  T q = c / b.primal;
  return {q, -(q * b.tangent) / b.primal};
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.primal);
  return {e, a.tangent * e};
}

template <class T>
Dual<T> log(const Dual<T>& a) {
  return {log(a.primal), a.tangent / a.primal};
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
  return {sin(a.primal), a.tangent * cos(a.primal)};
}

template <class T>
Dual<T> cos(const Dual<T>& a) {
  return {cos(a.primal), -(a.tangent * sin(a.primal))};
}

template <class T>
Dual<T> pow(const Dual<T>& a, double exponent) {
  if (exponent == 0.0) return Dual<T>(1.0);
  return {pow(a.primal, exponent),
          a.tangent * (exponent * pow(a.primal, exponent - 1.0))};
}

}  // namespace hessfem::ad
