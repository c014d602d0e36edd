#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lagpath/errors.hpp"
#include "lagpath/multi_index.hpp"
#include "lagpath/rational.hpp"

namespace lagpath {

// coeff * pi^pi_power * y^monomial * |y|^(-radial_power) * exp(-gauss_rate |y|^2)
struct KernelTerm {
  BigRational coeff;
  int pi_power = 0;
  MultiIndex monomial;
  int radial_power = 0;
  BigRational gauss_rate = 0;

  [[nodiscard]] auto key() const { return std::tie(monomial, radial_power, gauss_rate, pi_power); }
  bool operator==(const KernelTerm& o) const { return key() == o.key() && coeff == o.coeff; }
};

using TermList = std::vector<KernelTerm>;

inline void canonicalize(TermList& terms) {
  std::sort(terms.begin(), terms.end(), [](const KernelTerm& a, const KernelTerm& b) { return a.key() < b.key(); });
  TermList merged;
  for (auto& t : terms) {
    if (!merged.empty() && merged.back().key() == t.key()) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const KernelTerm& t) { return t.coeff == 0; });
  terms = std::move(merged);
}

// A scalar, vector, matrix or rank-3 array of term sums, stored row-major.
class KernelExpr {
 public:
  KernelExpr() = default;
  KernelExpr(int dim, std::vector<int> shape) : dim_(dim), shape_(std::move(shape)) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("KernelExpr dimension must be 1..3");
    std::size_t n = 1;
    for (int s : shape_) {
      if (s < 1) throw std::invalid_argument("KernelExpr shape entries must be positive");
      n *= static_cast<std::size_t>(s);
    }
    comps_.resize(n);
  }

  static KernelExpr scalar(int dim, TermList terms) {
    KernelExpr e(dim, {});
    e.comps_[0] = std::move(terms);
    e.canonicalize();
    return e;
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const std::vector<int>& shape() const { return shape_; }
  [[nodiscard]] std::size_t size() const { return comps_.size(); }
  [[nodiscard]] const TermList& component(std::size_t i) const { return comps_.at(i); }
  TermList& component(std::size_t i) { return comps_.at(i); }
  [[nodiscard]] const std::vector<TermList>& components() const { return comps_; }

  [[nodiscard]] std::size_t term_count() const {
    std::size_t n = 0;
    for (const auto& c : comps_) n += c.size();
    return n;
  }
  [[nodiscard]] bool is_zero() const { return term_count() == 0; }

  void canonicalize() {
    for (auto& c : comps_) lagpath::canonicalize(c);
  }

  bool operator==(const KernelExpr& o) const { return dim_ == o.dim_ && shape_ == o.shape_ && comps_ == o.comps_; }

 private:
  int dim_ = 2;
  std::vector<int> shape_;
  std::vector<TermList> comps_;
};

inline KernelTerm make_term(const BigRational& coeff, int pi_power, MultiIndex monomial, int radial_power,
                            const BigRational& gauss_rate = 0) {
  return KernelTerm{coeff, pi_power, std::move(monomial), radial_power, gauss_rate};
}

inline KernelTerm multiply_terms(const KernelTerm& a, const KernelTerm& b) {
  return KernelTerm{a.coeff * b.coeff, a.pi_power + b.pi_power, a.monomial + b.monomial, a.radial_power + b.radial_power,
                    a.gauss_rate + b.gauss_rate};
}

namespace detail {
inline void require_same_layout(const KernelExpr& a, const KernelExpr& b) {
  if (a.dim() != b.dim() || a.shape() != b.shape()) throw std::invalid_argument("KernelExpr layout mismatch");
}
}  // namespace detail

inline KernelExpr operator+(const KernelExpr& a, const KernelExpr& b) {
  detail::require_same_layout(a, b);
  KernelExpr r = a;
  for (std::size_t i = 0; i < r.size(); ++i) {
    auto& c = r.component(i);
    c.insert(c.end(), b.component(i).begin(), b.component(i).end());
  }
  r.canonicalize();
  return r;
}

// Multiply every term by coeff * pi^pi_power.
inline KernelExpr scale(const KernelExpr& e, const BigRational& coeff, int pi_power = 0) {
  KernelExpr r = e;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (auto& t : r.component(i)) {
      t.coeff *= coeff;
      t.pi_power += pi_power;
    }
  r.canonicalize();
  return r;
}

inline KernelExpr operator-(const KernelExpr& a, const KernelExpr& b) { return a + scale(b, BigRational(-1)); }

// Multiply each component by the scalar sum `factor`.
inline KernelExpr multiply(const KernelExpr& e, const TermList& factor) {
  KernelExpr r(e.dim(), e.shape());
  for (std::size_t i = 0; i < e.size(); ++i) {
    auto& out = r.component(i);
    for (const auto& t : e.component(i))
      for (const auto& f : factor) out.push_back(multiply_terms(t, f));
  }
  r.canonicalize();
  return r;
}

// Exact partial derivative along axis (0-based).
inline TermList derive_terms(const TermList& terms, int axis, int dim) {
  TermList out;
  const MultiIndex e = MultiIndex::unit(dim, axis);
  for (const auto& t : terms) {
    const int b = t.monomial[axis];
    if (b > 0) {
      KernelTerm d = t;
      d.coeff *= b;
      d.monomial -= e;
      out.push_back(std::move(d));
    }
    if (t.radial_power != 0) {
      KernelTerm d = t;
      d.coeff *= -t.radial_power;
      d.monomial += e;
      d.radial_power += 2;
      out.push_back(std::move(d));
    }
    if (t.gauss_rate != 0) {
      KernelTerm d = t;
      d.coeff *= BigRational(-2) * t.gauss_rate;
      d.monomial += e;
      out.push_back(std::move(d));
    }
  }
  canonicalize(out);
  return out;
}

inline KernelExpr derive(const KernelExpr& e, int axis) {
  if (axis < 0 || axis >= e.dim()) throw std::invalid_argument("derive: axis out of range");
  KernelExpr r(e.dim(), e.shape());
  for (std::size_t i = 0; i < e.size(); ++i) r.component(i) = derive_terms(e.component(i), axis, e.dim());
  return r;
}

inline KernelExpr derive(const KernelExpr& e, const MultiIndex& alpha) {
  KernelExpr r = e;
  for (int ax = 0; ax < alpha.dim(); ++ax)
    for (int k = 0; k < alpha[ax]; ++k) r = derive(r, ax);
  return r;
}

// e * (1 - exp(-|y|^2 / delta^2)).
inline KernelExpr regularize(const KernelExpr& e, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("regularize: delta must be positive");
  const BigRational d(delta);
  const BigRational q = BigRational(1) / (d * d);
  const MultiIndex zero(e.dim());
  return multiply(e, TermList{make_term(1, 0, zero, 0), make_term(-1, 0, zero, 0, q)});
}

struct GaussianSplit {
  KernelExpr inner;
  KernelExpr outer;
};

// inner = e * exp(-|y|^2), outer = e * (1 - exp(-|y|^2)).
inline GaussianSplit split_gaussian(const KernelExpr& e) {
  for (const auto& c : e.components())
    for (const auto& t : c)
      if (t.gauss_rate != 0) throw std::invalid_argument("split_gaussian: expression already carries a Gaussian factor");
  const MultiIndex zero(e.dim());
  return {multiply(e, TermList{make_term(1, 0, zero, 0, 1)}),
          multiply(e, TermList{make_term(1, 0, zero, 0), make_term(-1, 0, zero, 0, 1)})};
}

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double evaluate_term(const KernelTerm& t, std::span<const double> y, double r2) {
  double v = t.coeff.get_d() * std::pow(std::numbers::pi, t.pi_power);
  for (int i = 0; i < t.monomial.dim(); ++i)
    for (int k = 0; k < t.monomial[i]; ++k) v *= y[static_cast<std::size_t>(i)];
  if (t.radial_power != 0) v *= std::pow(r2, -0.5 * t.radial_power);
  if (t.gauss_rate != 0) v *= std::exp(-t.gauss_rate.get_d() * r2);
  return v;
}

// Flattened component values at y != 0.
inline std::vector<double> evaluate(const KernelExpr& e, std::span<const double> y) {
  if (static_cast<int>(y.size()) != e.dim()) throw std::invalid_argument("evaluate: point dimension mismatch");
  double r2 = 0;
  for (double v : y) r2 += v * v;
  if (r2 == 0.0) throw singular_evaluation("kernel evaluated at y = 0");
  std::vector<double> out(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    CompensatedSum s;
    for (const auto& t : e.component(i)) s.add(evaluate_term(t, y, r2));
    out[i] = s.value();
  }
  return out;
}

inline std::string to_string(const KernelTerm& t) {
  std::string s = t.coeff.get_str();
  if (t.pi_power != 0) s += "*pi^" + std::to_string(t.pi_power);
  for (int i = 0; i < t.monomial.dim(); ++i)
    if (t.monomial[i] != 0) s += "*y" + std::to_string(i + 1) + "^" + std::to_string(t.monomial[i]);
  if (t.radial_power != 0) s += "*|y|^" + std::to_string(-t.radial_power);
  if (t.gauss_rate != 0) s += "*exp(-" + t.gauss_rate.get_str() + "|y|^2)";
  return s;
}

}  // namespace lagpath
