#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "lagpath/multi_index.hpp"
#include "lagpath/rational.hpp"

namespace lagpath {

// ---------------------------------------------------------------------------
// Binomials with a half-integer top.

// (1/2 choose j), with the convention (1/2 choose 0) = -1 so that
// (-1)^(j-1) * binomial_half(j) >= 0 for every j.
inline BigRational binomial_half(unsigned j) {
  if (j == 0) return BigRational(-1);
  BigRational num = 1;
  const BigRational half = make_rational(1, 2);
  for (unsigned i = 0; i < j; ++i) num *= half - BigRational(i);
  return num / factorial(j);
}

// Ordinary generalized binomial (a choose j), (a choose 0) = 1.
inline BigRational binomial_general(const BigRational& a, unsigned j) {
  BigRational num = 1;
  for (unsigned i = 0; i < j; ++i) num *= a - BigRational(i);
  return num / factorial(j);
}

struct IdentityCheck {
  BigRational lhs;
  BigRational rhs;
  bool equal = false;
};

inline IdentityCheck check_factorial_bound(int j) {
  if (j < 2) throw std::invalid_argument("check_factorial_bound requires j >= 2");
  const auto uj = static_cast<unsigned>(j);
  IdentityCheck r;
  r.lhs = factorial(uj) * neg_one_pow(j - 1) * binomial_half(uj);
  r.rhs = BigRational(double_factorial(2L * j - 3)) / BigRational(BigInteger(1) << static_cast<mp_bitcnt_t>(j));
  r.rhs.canonicalize();
  r.equal = (r.lhs == r.rhs);
  return r;
}

// ---------------------------------------------------------------------------
// Partition sets.

struct Partition1D {
  std::vector<int> k;  // k[j-1] = k_j, j = 1..n
  int n = 0;
  int k_count = 0;
  auto operator<=>(const Partition1D&) const = default;
};

// P(n,k) = { (k_1..k_n) : sum j k_j = n, sum k_j = k }, lexicographically
// ascending in the k-vector.
inline std::vector<Partition1D> enumerate_partitions_1d(int n, int k) {
  if (n < 1) throw std::invalid_argument("enumerate_partitions_1d requires n >= 1");
  std::vector<Partition1D> out;
  if (k < 1 || k > n) return out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int j, int rem_n, int rem_k) -> void {
    if (j > n) {
      if (rem_n == 0 && rem_k == 0) out.push_back({cur, n, k});
      return;
    }
    for (int kj = 0; kj * j <= rem_n && kj <= rem_k; ++kj) {
      cur[static_cast<std::size_t>(j - 1)] = kj;
      self(self, j + 1, rem_n - kj * j, rem_k - kj);
    }
    cur[static_cast<std::size_t>(j - 1)] = 0;
  };
  rec(rec, 1, n, k);
  return out;
}

struct PartitionMulti {
  int s = 0;
  std::vector<MultiIndex> ks;
  std::vector<int> ls;
  auto operator<=>(const PartitionMulti&) const = default;
};

namespace detail {

// Every nonzero k <= bound (componentwise) with |k| <= max_order, ascending.
inline std::vector<MultiIndex> nonzero_sub_indices(const MultiIndex& bound, int max_order) {
  std::vector<MultiIndex> out;
  const int d = bound.dim();
  MultiIndex k(d);
  auto rec = [&](auto&& self, int axis) -> void {
    if (axis == d) {
      const int o = k.order();
      if (o > 0 && o <= max_order) out.push_back(k);
      return;
    }
    for (int v = 0; v <= bound[axis]; ++v) {
      k.set(axis, v);
      self(self, axis + 1);
    }
    k.set(axis, 0);
  };
  rec(rec, 0);
  return out;
}

}  // namespace detail

// Flat list of P_s(n, alpha) over all s, ordered lexicographically on the
// sequence (l_1, k_1, l_2, k_2, ...).
inline std::vector<PartitionMulti> partitions_multi_flat(int n, const MultiIndex& alpha) {
  std::vector<PartitionMulti> out;
  if (n < 1 || alpha.order() < 1 || alpha.order() > n) return out;
  PartitionMulti cur;
  auto rec = [&](auto&& self, int last_l, int rem_n, const MultiIndex& rem_alpha) -> void {
    if (rem_alpha.is_zero()) {
      if (rem_n == 0) out.push_back(cur);
      return;
    }
    for (int l = last_l + 1; l <= rem_n; ++l) {
      for (const MultiIndex& k : detail::nonzero_sub_indices(rem_alpha, rem_n / l)) {
        cur.ks.push_back(k);
        cur.ls.push_back(l);
        ++cur.s;
        self(self, l, rem_n - k.order() * l, rem_alpha - k);
        --cur.s;
        cur.ls.pop_back();
        cur.ks.pop_back();
      }
    }
  };
  rec(rec, 0, n, alpha);
  return out;
}

// P_s(n, alpha) for every s in 1..n (each key present, possibly empty).
inline std::map<int, std::vector<PartitionMulti>> enumerate_partitions_multi(int n, const MultiIndex& alpha) {
  if (n < 1) throw std::invalid_argument("enumerate_partitions_multi requires n >= 1");
  std::map<int, std::vector<PartitionMulti>> out;
  for (int s = 1; s <= n; ++s) out[s];
  for (auto& p : partitions_multi_flat(n, alpha)) out[p.s].push_back(std::move(p));
  return out;
}

// All partitions needed by the order-n multivariate formula, per alpha.
struct PartitionTable {
  int n = 0;
  int dim = 0;
  std::vector<std::pair<MultiIndex, std::vector<PartitionMulti>>> by_alpha;
};

inline PartitionTable make_partition_table(int n, int dim) {
  PartitionTable t{n, dim, {}};
  for (const MultiIndex& a : MultiIndex::orders_between(dim, 1, n)) t.by_alpha.emplace_back(a, partitions_multi_flat(n, a));
  return t;
}

// ---------------------------------------------------------------------------
// Faa di Bruno formulas. Generic in the scalar (BigRational or double).

template <class T>
T scalar_from(const BigRational& q) {
  if constexpr (std::is_same_v<T, BigRational>) {
    return q;
  } else {
    return static_cast<T>(q.get_d());
  }
}

template <class T>
T int_pow(const T& base, int e) {
  T r = scalar_from<T>(BigRational(1));
  for (int i = 0; i < e; ++i) r = r * base;
  return r;
}

// n-th derivative of h(g(x)) at x0. h_derivs[k] = h^(k)(g(x0)), g_derivs[j] = g^(j)(x0), both indexed 0..n.
template <class T>
T faa_di_bruno_1d(const std::vector<T>& h_derivs, const std::vector<T>& g_derivs, int n) {
  if (n < 1) throw std::invalid_argument("faa_di_bruno_1d requires n >= 1");
  if (static_cast<int>(h_derivs.size()) <= n || static_cast<int>(g_derivs.size()) <= n)
    throw std::invalid_argument("faa_di_bruno_1d: derivative lists must be indexed 0..n");
  T total = scalar_from<T>(BigRational(0));
  const BigRational nfact = factorial(static_cast<unsigned>(n));
  for (int k = 1; k <= n; ++k) {
    for (const Partition1D& p : enumerate_partitions_1d(n, k)) {
      BigRational w = nfact;
      for (int j = 1; j <= n; ++j) {
        const int kj = p.k[static_cast<std::size_t>(j - 1)];
        w /= factorial(static_cast<unsigned>(kj)) * pow(factorial(static_cast<unsigned>(j)), static_cast<unsigned>(kj));
      }
      T term = scalar_from<T>(w) * h_derivs[static_cast<std::size_t>(k)];
      for (int j = 1; j <= n; ++j) term = term * int_pow(g_derivs[static_cast<std::size_t>(j)], p.k[static_cast<std::size_t>(j - 1)]);
      total = total + term;
    }
  }
  return total;
}

// n-th derivative of h(g(x)) at x0 for g: R -> R^d.
// h_derivs[alpha] = (d^alpha h)(g(x0)) for 1 <= |alpha| <= n.
// g_derivs[l] = d^l g (x0) as a d-vector for l = 0..n (entry 0 is not read).
template <class T>
T faa_di_bruno_multi(const std::map<MultiIndex, T>& h_derivs, const std::vector<std::vector<T>>& g_derivs, int n,
                     const PartitionTable& table) {
  if (table.n != n) throw std::invalid_argument("faa_di_bruno_multi: partition table order mismatch");
  if (static_cast<int>(g_derivs.size()) <= n) throw std::invalid_argument("faa_di_bruno_multi: g_derivs must be indexed 0..n");
  T total = scalar_from<T>(BigRational(0));
  for (const auto& [alpha, parts] : table.by_alpha) {
    if (parts.empty()) continue;
    auto it = h_derivs.find(alpha);
    if (it == h_derivs.end()) throw std::invalid_argument("faa_di_bruno_multi: missing h derivative for alpha " + alpha.str());
    T inner = scalar_from<T>(BigRational(0));
    for (const PartitionMulti& p : parts) {
      BigRational w = 1;
      T prod = scalar_from<T>(BigRational(1));
      for (int j = 0; j < p.s; ++j) {
        const MultiIndex& k = p.ks[static_cast<std::size_t>(j)];
        const int l = p.ls[static_cast<std::size_t>(j)];
        w /= BigRational(k.factorial()) * pow(factorial(static_cast<unsigned>(l)), static_cast<unsigned>(k.order()));
        const auto& gl = g_derivs[static_cast<std::size_t>(l)];
        for (int i = 0; i < k.dim(); ++i) prod = prod * int_pow(gl[static_cast<std::size_t>(i)], k[i]);
      }
      inner = inner + scalar_from<T>(w) * prod;
    }
    total = total + it->second * inner;
  }
  return scalar_from<T>(factorial(static_cast<unsigned>(n))) * total;
}

template <class T>
T faa_di_bruno_multi(const std::map<MultiIndex, T>& h_derivs, const std::vector<std::vector<T>>& g_derivs, int n) {
  if (n < 1) throw std::invalid_argument("faa_di_bruno_multi requires n >= 1");
  if (g_derivs.size() < 2 || g_derivs[1].empty()) throw std::invalid_argument("faa_di_bruno_multi: empty g_derivs");
  const int dim = static_cast<int>(g_derivs[1].size());
  return faa_di_bruno_multi(h_derivs, g_derivs, n, make_partition_table(n, dim));
}

// ---------------------------------------------------------------------------
// Signed partition sums ("magic" identities).

inline IdentityCheck magic_identity_1d(int n) {
  if (n < 1) throw std::invalid_argument("magic_identity_1d requires n >= 1");
  std::vector<BigRational> bh(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) bh[static_cast<std::size_t>(j)] = binomial_half(static_cast<unsigned>(j));
  IdentityCheck r;
  r.lhs = 0;
  for (int k = 1; k <= n; ++k) {
    for (const Partition1D& p : enumerate_partitions_1d(n, k)) {
      BigRational term = neg_one_pow(k) * factorial(static_cast<unsigned>(k));
      for (int j = 1; j <= n; ++j) {
        const int kj = p.k[static_cast<std::size_t>(j - 1)];
        if (kj == 0) continue;
        term *= pow(bh[static_cast<std::size_t>(j)], static_cast<unsigned>(kj)) / factorial(static_cast<unsigned>(kj));
      }
      r.lhs += term;
    }
  }
  r.rhs = BigRational(2 * (n + 1)) * binomial_half(static_cast<unsigned>(n + 1));
  r.equal = (r.lhs == r.rhs);
  return r;
}

struct MagicMultiReport {
  BigRational lhs;
  BigRational rhs;
  BigRational ratio;
};

// Sum over every alpha with 1 <= |alpha| <= n of
//   (-1)^|alpha| |alpha|! sum_s sum_{P_s(n,alpha)} prod_j (1/2 choose l_j)^|k_j| / k_j!
// The partitions of all alphas are walked in one recursion; alpha is the
// running sum of the chosen k_j.
inline MagicMultiReport magic_identity_multi(int n, int d) {
  if (n < 1) throw std::invalid_argument("magic_identity_multi requires n >= 1");
  if (d < 1 || d > 3) throw std::invalid_argument("magic_identity_multi requires d in 1..3");
  std::vector<BigRational> bh(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) bh[static_cast<std::size_t>(j)] = binomial_half(static_cast<unsigned>(j));
  // Per part size m = |k|: sum over k with |k| = m of 1/k!.
  std::vector<BigRational> inv_fact_sum(static_cast<std::size_t>(n) + 1);
  for (int m = 1; m <= n; ++m) {
    BigRational s = 0;
    for (const MultiIndex& k : MultiIndex::of_order(d, m)) s += BigRational(1) / BigRational(k.factorial());
    inv_fact_sum[static_cast<std::size_t>(m)] = s;
  }
  BigRational lhs = 0;
  auto rec = [&](auto&& self, int last_l, int rem_n, int alpha_order, const BigRational& weight) -> void {
    if (rem_n == 0) {
      lhs += neg_one_pow(alpha_order) * factorial(static_cast<unsigned>(alpha_order)) * weight;
      return;
    }
    for (int l = last_l + 1; l <= rem_n; ++l) {
      for (int m = 1; m * l <= rem_n; ++m) {
        const BigRational w = weight * pow(bh[static_cast<std::size_t>(l)], static_cast<unsigned>(m)) *
                              inv_fact_sum[static_cast<std::size_t>(m)];
        self(self, l, rem_n - m * l, alpha_order + m, w);
      }
    }
  };
  rec(rec, 0, n, 0, BigRational(1));
  MagicMultiReport r;
  r.lhs = lhs;
  r.rhs = BigRational(2 * (n + 1)) * binomial_half(static_cast<unsigned>(n + 1));
  r.ratio = r.lhs / r.rhs;
  return r;
}

// ---------------------------------------------------------------------------
// Series coefficients and the sums built from them.

struct SeriesPair {
  BigRational a;
  BigRational b;
};

inline SeriesPair series_coefficients(int m) {
  if (m < 0) throw std::invalid_argument("series_coefficients requires m >= 0");
  const auto um = static_cast<unsigned>(m);
  return {BigRational(2 * (m + 1)) * neg_one_pow(m) * binomial_half(um + 1), neg_one_pow(m - 1) * binomial_half(um)};
}

struct SnCheck {
  BigRational triple_sum;
  BigRational closed_form;
  bool equal = false;
  bool bound_holds = false;
};

inline SnCheck s_n_identity(int n) {
  if (n < 1) throw std::invalid_argument("s_n_identity requires n >= 1");
  std::vector<SeriesPair> c;
  for (int m = 0; m <= n; ++m) c.push_back(series_coefficients(m));
  SnCheck r;
  r.triple_sum = 0;
  for (int rr = 0; rr <= n; ++rr)
    for (int m = 0; m <= rr; ++m)
      r.triple_sum += c[static_cast<std::size_t>(m)].a * c[static_cast<std::size_t>(rr - m)].b * c[static_cast<std::size_t>(n - rr)].b;
  const BigRational tail = BigRational(n + 1) * neg_one_pow(n) * binomial_half(static_cast<unsigned>(n + 1));
  r.closed_form = make_rational(16L * n - 10, 2L * n - 1) * tail;
  r.equal = (r.triple_sum == r.closed_form);
  r.bound_holds = (r.triple_sum <= BigRational(8) * tail);
  return r;
}

struct ConvolutionCheck {
  BigRational lhs;
  BigRational rhs;
  bool equal = false;
  bool lhs_le_rhs = false;
};

inline ConvolutionCheck convolution_identity(int m) {
  if (m < 0) throw std::invalid_argument("convolution_identity requires m >= 0");
  ConvolutionCheck r;
  r.lhs = 0;
  for (int i = 0; i <= m; ++i) r.lhs += series_coefficients(i).a * series_coefficients(m - i).b;
  r.rhs = BigRational(4) * neg_one_pow(m) * BigRational(m + 1) * binomial_half(static_cast<unsigned>(m + 1));
  r.equal = (r.lhs == r.rhs);
  r.lhs_le_rhs = (r.lhs <= r.rhs);
  return r;
}

// Truncated Cauchy product of two exact power series, keeping orders 0..order.
inline std::vector<BigRational> series_product(const std::vector<BigRational>& a, const std::vector<BigRational>& b, int order) {
  std::vector<BigRational> out(static_cast<std::size_t>(order) + 1, BigRational(0));
  for (int i = 0; i <= order && i < static_cast<int>(a.size()); ++i)
    for (int j = 0; i + j <= order && j < static_cast<int>(b.size()); ++j)
      out[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
  return out;
}

}  // namespace lagpath
