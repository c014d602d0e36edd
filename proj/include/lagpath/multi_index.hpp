#pragma once

#include <array>
#include <compare>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagpath/rational.hpp"

namespace lagpath {

class MultiIndex {
 public:
  static constexpr int kMaxDim = 3;

  MultiIndex() = default;
  explicit MultiIndex(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("MultiIndex dimension must be 1..3");
  }
  MultiIndex(std::initializer_list<int> comps) : MultiIndex(static_cast<int>(comps.size())) {
    int i = 0;
    for (int c : comps) set(i++, c);
  }

  static MultiIndex unit(int dim, int axis) {
    MultiIndex m(dim);
    m.c_.at(axis) = 1;
    return m;
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int operator[](int i) const { return c_[i]; }
  void set(int i, int v) {
    if (i < 0 || i >= dim_) throw std::out_of_range("MultiIndex axis");
    if (v < 0) throw std::invalid_argument("MultiIndex components are non-negative");
    c_[i] = v;
  }

  [[nodiscard]] int order() const {
    int s = 0;
    for (int i = 0; i < dim_; ++i) s += c_[i];
    return s;
  }
  [[nodiscard]] BigInteger factorial() const {
    BigInteger r = 1;
    for (int i = 0; i < dim_; ++i) r *= factorial_int(static_cast<unsigned>(c_[i]));
    return r;
  }
  [[nodiscard]] bool is_zero() const { return order() == 0; }

  // Componentwise <=.
  [[nodiscard]] bool fits_in(const MultiIndex& other) const {
    for (int i = 0; i < dim_; ++i)
      if (c_[i] > other.c_[i]) return false;
    return true;
  }

  MultiIndex& operator+=(const MultiIndex& o) {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  MultiIndex& operator-=(const MultiIndex& o) {
    for (int i = 0; i < dim_; ++i) {
      c_[i] -= o.c_[i];
      if (c_[i] < 0) throw std::invalid_argument("MultiIndex subtraction underflow");
    }
    return *this;
  }
  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) { return a += b; }
  friend MultiIndex operator-(MultiIndex a, const MultiIndex& b) { return a -= b; }

  auto operator<=>(const MultiIndex&) const = default;

  [[nodiscard]] std::string str() const {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
      if (i) s += ",";
      s += std::to_string(c_[i]);
    }
    return s + ")";
  }

  // All multi-indices of exactly this order, lexicographically ascending.
  static std::vector<MultiIndex> of_order(int dim, int order) {
    std::vector<MultiIndex> out;
    MultiIndex m(dim);
    fill(out, m, 0, order);
    return out;
  }

  // All multi-indices with lo <= order <= hi, grouped by order.
  static std::vector<MultiIndex> orders_between(int dim, int lo, int hi) {
    std::vector<MultiIndex> out;
    for (int k = lo; k <= hi; ++k) {
      auto v = of_order(dim, k);
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }

 private:
  static void fill(std::vector<MultiIndex>& out, MultiIndex& m, int axis, int remaining) {
    if (axis == m.dim_ - 1) {
      m.c_[axis] = remaining;
      out.push_back(m);
      m.c_[axis] = 0;
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      m.c_[axis] = v;
      fill(out, m, axis + 1, remaining - v);
    }
    m.c_[axis] = 0;
  }

  int dim_ = 0;
  std::array<int, kMaxDim> c_{};
};

}  // namespace lagpath
