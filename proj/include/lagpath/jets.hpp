#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "lagpath/errors.hpp"
#include "lagpath/linalg.hpp"

namespace lagpath {

// Raw recurrences over normalized coefficients c[k] = f^(k)/k!, k = 0..n.
// Output spans must hold n+1 entries and must not alias the inputs.
namespace jetops {

// out_k = sum_{i<=k} a_i b_{k-i}
inline void mul(std::span<const double> a, std::span<const double> b, std::span<double> out, int n) {
  for (int k = 0; k <= n; ++k) {
    double s = 0;
    for (int i = 0; i <= k; ++i) s += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(k - i)];
    out[static_cast<std::size_t>(k)] = s;
  }
}

// Coefficient k of a*b only.
inline double mul_at(std::span<const double> a, std::span<const double> b, int k) {
  double s = 0;
  for (int i = 0; i <= k; ++i) s += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(k - i)];
  return s;
}

// w = u^e:  n u_0 w_n = sum_{k=1}^n ((e+1)k - n) u_k w_{n-k}
inline void pow_real(std::span<const double> u, double e, std::span<double> w, int n) {
  const double u0 = u[0];
  if (!(u0 > 0.0)) throw singular_evaluation("jet power of a series with non-positive constant term");
  w[0] = std::pow(u0, e);
  const double inv_u0 = 1.0 / u0;
  for (int m = 1; m <= n; ++m) {
    double s = 0;
    for (int k = 1; k <= m; ++k) s += ((e + 1.0) * k - m) * u[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(m - k)];
    w[static_cast<std::size_t>(m)] = s * inv_u0 / m;
  }
}

// w = exp(u):  n w_n = sum_{k=1}^n k u_k w_{n-k}
inline void exp(std::span<const double> u, std::span<double> w, int n) {
  w[0] = std::exp(u[0]);
  for (int m = 1; m <= n; ++m) {
    double s = 0;
    for (int k = 1; k <= m; ++k) s += k * u[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(m - k)];
    w[static_cast<std::size_t>(m)] = s / m;
  }
}

}  // namespace jetops

namespace detail {
template <class T>
T zero_like() {
  return T{};
}
}  // namespace detail

// Truncated Taylor series in time with coefficients of type T
// (double, Vec<D> or Mat<D>); coeffs[n] = f^(n)(t0)/n!.
template <class T>
class Jet {
 public:
  Jet() = default;
  explicit Jet(int order) : c_(static_cast<std::size_t>(order) + 1, detail::zero_like<T>()) {
    if (order < 0) throw std::invalid_argument("jet order must be non-negative");
  }
  explicit Jet(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("jet needs at least one coefficient");
  }
  static Jet constant(const T& v, int order) {
    Jet j(order);
    j.c_[0] = v;
    return j;
  }

  [[nodiscard]] int order() const { return static_cast<int>(c_.size()) - 1; }
  T& operator[](int k) { return c_.at(static_cast<std::size_t>(k)); }
  const T& operator[](int k) const { return c_.at(static_cast<std::size_t>(k)); }
  [[nodiscard]] const std::vector<T>& coeffs() const { return c_; }
  std::vector<T>& coeffs() { return c_; }

  // Horner evaluation at offset h from the expansion point.
  [[nodiscard]] T evaluate(double h) const {
    T acc = c_.back();
    for (int k = order() - 1; k >= 0; --k) {
      acc = acc * h;
      acc += c_[static_cast<std::size_t>(k)];
    }
    return acc;
  }

 private:
  std::vector<T> c_;
};

using ScalarJet = Jet<double>;
template <std::size_t D>
using VecJet = Jet<Vec<D>>;
template <std::size_t D>
using MatJet = Jet<Mat<D>>;

namespace detail {
template <class A, class B>
void require_same_order(const Jet<A>& a, const Jet<B>& b) {
  if (a.order() != b.order()) throw std::invalid_argument("jet order mismatch");
}
}  // namespace detail

template <class T>
Jet<T> jet_add(const Jet<T>& a, const Jet<T>& b) {
  detail::require_same_order(a, b);
  Jet<T> r = a;
  for (int k = 0; k <= a.order(); ++k) r[k] += b[k];
  return r;
}

template <class T>
Jet<T> jet_sub(const Jet<T>& a, const Jet<T>& b) {
  detail::require_same_order(a, b);
  Jet<T> r = a;
  for (int k = 0; k <= a.order(); ++k) r[k] -= b[k];
  return r;
}

template <class T>
Jet<T> jet_scale(const Jet<T>& a, double s) {
  Jet<T> r = a;
  for (int k = 0; k <= a.order(); ++k) r[k] = r[k] * s;
  return r;
}

// Cauchy product of a scalar jet with a jet of any coefficient type.
template <class T>
Jet<T> jet_mul(const ScalarJet& a, const Jet<T>& b) {
  detail::require_same_order(a, b);
  Jet<T> r(a.order());
  for (int k = 0; k <= a.order(); ++k)
    for (int i = 0; i <= k; ++i) r[k] += b[k - i] * a[i];
  return r;
}

template <std::size_t D>
ScalarJet jet_component(const VecJet<D>& v, int axis) {
  ScalarJet r(v.order());
  for (int k = 0; k <= v.order(); ++k) r[k] = v[k][static_cast<std::size_t>(axis)];
  return r;
}

template <std::size_t D>
ScalarJet jet_norm_sq(const VecJet<D>& v) {
  ScalarJet r(v.order());
  for (int k = 0; k <= v.order(); ++k) {
    double s = 0;
    for (int i = 0; i <= k; ++i) s += dot<D>(v[i], v[k - i]);
    r[k] = s;
  }
  return r;
}

inline ScalarJet jet_pow_real(const ScalarJet& u, double exponent) {
  ScalarJet w(u.order());
  jetops::pow_real(u.coeffs(), exponent, w.coeffs(), u.order());
  return w;
}

inline ScalarJet jet_exp(const ScalarJet& u) {
  ScalarJet w(u.order());
  jetops::exp(u.coeffs(), w.coeffs(), u.order());
  return w;
}

// Jet of t -> t (about t0 = 0) plus a constant.
inline ScalarJet jet_variable(double value, int order) {
  ScalarJet j(order);
  j[0] = value;
  if (order >= 1) j[1] = 1.0;
  return j;
}

}  // namespace lagpath
