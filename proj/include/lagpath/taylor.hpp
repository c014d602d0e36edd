#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "lagpath/combinatorics.hpp"
#include "lagpath/dynamics.hpp"
#include "lagpath/errors.hpp"
#include "lagpath/jets.hpp"
#include "lagpath/kernel_catalog.hpp"
#include "lagpath/kernel_compiled.hpp"
#include "lagpath/kernel_expr.hpp"
#include "lagpath/parallel.hpp"
#include "lagpath/particles.hpp"

namespace lagpath {

// Normalized time-Taylor coefficients of every particle path (and gradient)
// about t0.
template <std::size_t D>
struct TrajectoryJets {
  std::vector<VecJet<D>> x;
  std::vector<MatJet<D>> g;  // empty when gradients were not propagated
  double t0 = 0.0;
  [[nodiscard]] int order() const { return x.empty() ? 0 : x.front().order(); }
};

inline constexpr int kFastJetMaxOrder = 25;
inline constexpr int kOracleMaxOrder = 8;
inline constexpr std::size_t kOracleMaxParticles = 64;

namespace detail {

constexpr std::size_t kJetLen = kFastJetMaxOrder + 1;
using Coeffs = std::array<double, kJetLen>;

inline void conv(const Coeffs& a, const Coeffs& b, Coeffs& out, int n) {
  for (int k = 0; k <= n; ++k) {
    double s = 0;
    for (int m = 0; m <= k; ++m) s += a[static_cast<std::size_t>(m)] * b[static_cast<std::size_t>(k - m)];
    out[static_cast<std::size_t>(k)] = s;
  }
}

inline double conv_at(const Coeffs& a, const Coeffs& b, int k) {
  double s = 0;
  for (int m = 0; m <= k; ++m) s += a[static_cast<std::size_t>(m)] * b[static_cast<std::size_t>(k - m)];
  return s;
}

// Radial factor jet u^e * (1 - exp(-u/delta^2)) for u = |y|^2.
inline void radial_factor(const Coeffs& u, double e, double delta, Coeffs& out, int n, Coeffs& t1, Coeffs& t2) {
  const std::span<const double> us(u.data(), static_cast<std::size_t>(n) + 1);
  if (delta > 0.0) {
    jetops::pow_real(us, e, std::span<double>(t1.data(), static_cast<std::size_t>(n) + 1), n);
    Coeffs arg{};
    const double q = 1.0 / (delta * delta);
    for (int k = 0; k <= n; ++k) arg[static_cast<std::size_t>(k)] = -q * u[static_cast<std::size_t>(k)];
    jetops::exp(std::span<const double>(arg.data(), static_cast<std::size_t>(n) + 1),
                std::span<double>(t2.data(), static_cast<std::size_t>(n) + 1), n);
    // 1 - exp(.), constant term via expm1 for accuracy
    t2[0] = -std::expm1(-q * u[0]);
    for (int k = 1; k <= n; ++k) t2[static_cast<std::size_t>(k)] = -t2[static_cast<std::size_t>(k)];
    conv(t1, t2, out, n);
  } else {
    jetops::pow_real(us, e, std::span<double>(out.data(), static_cast<std::size_t>(n) + 1), n);
  }
}

inline bool fast_jets_supported(Model m) { return m == Model::Euler2D || m == Model::SQG || m == Model::IPM; }

}  // namespace detail

// Jets of X (and G) to order N by propagating Taylor coefficients through the
// pairwise kernel sums: X_{n+1} = u_n/(n+1), G_{n+1} = sum_k (grad u)_k G_{n-k}/(n+1).
inline TrajectoryJets<2> time_jets_fast(const ModelSpec& spec, const State2& s, int order) {
  if (!detail::fast_jets_supported(spec.model))
    throw config_error("jet propagation is available for Euler2D, SQG and IPM only");
  if (order < 0 || order > kFastJetMaxOrder) throw config_error("jet order must be in 0..25");
  require_fields(spec, s);
  const std::size_t np = s.size();
  const int N = order;
  const double delta = spec.delta;
  const bool sqg = spec.model == Model::SQG;
  const bool ipm = spec.model == Model::IPM;
  const bool with_g = true;

  // component-major coefficient storage
  std::vector<std::array<detail::Coeffs, 2>> X(np);
  std::vector<std::array<std::array<detail::Coeffs, 2>, 2>> G(np);
  std::vector<std::array<std::array<detail::Coeffs, 2>, 2>> GU(np);  // velocity-gradient jets
  for (std::size_t i = 0; i < np; ++i) {
    X[i] = {};
    G[i] = {};
    GU[i] = {};
    for (std::size_t a = 0; a < 2; ++a) {
      X[i][a][0] = s.x[i][a];
      for (std::size_t b = 0; b < 2; ++b) G[i][a][b][0] = s.g[i][a][b];
    }
  }
  // density jets (IPM: -{theta0, X2} is linear in G); SQG: q = cof(G) grad theta0
  std::vector<detail::Coeffs> rho(np);
  std::vector<std::array<detail::Coeffs, 2>> q(np);
  auto refresh_sources = [&](int k) {
    const auto kk = static_cast<std::size_t>(k);
    for (std::size_t j = 0; j < np; ++j) {
      const Mat<2> gk = {{{G[j][0][0][kk], G[j][0][1][kk]}, {G[j][1][0][kk], G[j][1][1][kk]}}};
      if (sqg) {
        const Vec<2> v = matvec(cofactor(gk), s.grad_theta0[j]);
        q[j][0][kk] = v[0];
        q[j][1][kk] = v[1];
      } else if (ipm) {
        rho[j][kk] = -detail::bracket_theta_x2(s.grad_theta0[j], gk);
      } else {
        rho[j][kk] = k == 0 ? s.omega0[j] : 0.0;
      }
    }
  };
  refresh_sources(0);

  const double e_vel = sqg ? -1.5 : -1.0;
  for (int n = 0; n < N; ++n) {
    const auto nn = static_cast<std::size_t>(n);
    std::vector<Vec<2>> un(np);
    std::vector<Mat<2>> gun(np);
    parallel_for(np, [&](std::size_t i) {
      TreeSum<6> acc;
      detail::Coeffs y1{}, y2{}, u{}, fv{}, fg{}, t1{}, t2{}, kv1{}, kv2{}, p1{}, p2{}, tmp{};
      for (std::size_t j = 0; j < np; ++j) {
        if (j == i) continue;
        for (int k = 0; k <= n; ++k) {
          y1[static_cast<std::size_t>(k)] = X[i][0][static_cast<std::size_t>(k)] - X[j][0][static_cast<std::size_t>(k)];
          y2[static_cast<std::size_t>(k)] = X[i][1][static_cast<std::size_t>(k)] - X[j][1][static_cast<std::size_t>(k)];
        }
        for (int k = 0; k <= n; ++k) u[static_cast<std::size_t>(k)] = detail::conv_at(y1, y1, k) + detail::conv_at(y2, y2, k);
        if (u[0] == 0.0) {
          if (delta > 0.0) continue;
          detail::coincident(i, j);
        }
        const double wj = s.w[j];
        std::array<double, 6> c{};
        detail::radial_factor(u, e_vel, delta, fv, n, t1, t2);
        // velocity kernel jets: y_perp * fv / (2 pi)
        for (int k = 0; k <= n; ++k) {
          kv1[static_cast<std::size_t>(k)] = -detail::conv_at(y2, fv, k) * detail::kInv2Pi;
          kv2[static_cast<std::size_t>(k)] = detail::conv_at(y1, fv, k) * detail::kInv2Pi;
        }
        if (sqg) {
          const double th = wj * s.theta0[j];
          c[0] = th * kv1[nn];
          c[1] = th * kv2[nn];
          if (with_g) {
            c[2] = wj * detail::conv_at(kv1, q[j][0], n);
            c[3] = wj * detail::conv_at(kv1, q[j][1], n);
            c[4] = wj * detail::conv_at(kv2, q[j][0], n);
            c[5] = wj * detail::conv_at(kv2, q[j][1], n);
          }
        } else {
          c[0] = wj * detail::conv_at(rho[j], kv1, n);
          c[1] = wj * detail::conv_at(rho[j], kv2, n);
          if (with_g) {
            detail::radial_factor(u, -2.0, delta, fg, n, t1, t2);
            for (int k = 0; k <= n; ++k) {
              p1[static_cast<std::size_t>(k)] = 2.0 * detail::conv_at(y1, y2, k);
              p2[static_cast<std::size_t>(k)] = detail::conv_at(y2, y2, k) - detail::conv_at(y1, y1, k);
            }
            detail::conv(p1, fg, t1, n);
            detail::conv(p2, fg, tmp, n);
            const double a11 = detail::conv_at(rho[j], t1, n) * detail::kInv2Pi;
            const double a12 = detail::conv_at(rho[j], tmp, n) * detail::kInv2Pi;
            c[2] = wj * a11;
            c[3] = wj * a12;
            c[4] = wj * a12;
            c[5] = -wj * a11;
          }
        }
        acc.add(c);
      }
      const auto v = acc.value();
      un[i] = {v[0], v[1]};
      Mat<2> gu = {{{v[2], v[3]}, {v[4], v[5]}}};
      if (!sqg) {
        const double half = 0.5 * rho[i][nn];
        gu[0][1] -= half;
        gu[1][0] += half;
      }
      gun[i] = gu;
    });
    const double inv = 1.0 / (n + 1);
    for (std::size_t i = 0; i < np; ++i) {
      for (std::size_t a = 0; a < 2; ++a) {
        X[i][a][nn + 1] = un[i][a] * inv;
        for (std::size_t b = 0; b < 2; ++b) GU[i][a][b][nn] = gun[i][a][b];
      }
      if (with_g) {
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t b = 0; b < 2; ++b) {
            double sum = 0;
            for (int k = 0; k <= n; ++k)
              for (std::size_t c = 0; c < 2; ++c)
                sum += GU[i][a][c][static_cast<std::size_t>(k)] * G[i][c][b][static_cast<std::size_t>(n - k)];
            G[i][a][b][nn + 1] = sum * inv;
          }
      }
    }
    refresh_sources(n + 1);
    for (std::size_t i = 0; i < np; ++i) {
      for (std::size_t a = 0; a < 2; ++a)
        if (!std::isfinite(X[i][a][nn + 1])) throw numerical_failure("non-finite jet coefficient");
    }
  }

  TrajectoryJets<2> out;
  out.t0 = s.t;
  out.x.assign(np, VecJet<2>(N));
  if (with_g) out.g.assign(np, MatJet<2>(N));
  for (std::size_t i = 0; i < np; ++i)
    for (int k = 0; k <= N; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      out.x[i][k] = {X[i][0][kk], X[i][1][kk]};
      if (with_g) out.g[i][k] = {{{G[i][0][0][kk], G[i][0][1][kk]}, {G[i][1][0][kk], G[i][1][1][kk]}}};
    }
  return out;
}

// Independent route: coefficient n+1 of X_i is
//   1/(n+1) * 1/n! * sum_j w_j rho_j * d^n/dt^n K(X_i - X_j)
// with the n-th derivative from the multivariate Faa di Bruno sum over
// exact symbolic kernel partials. X jets only.
inline TrajectoryJets<2> time_jets_oracle(const ModelSpec& spec, const State2& s, int order) {
  if (spec.model != Model::Euler2D && spec.model != Model::SQG)
    throw config_error("the partition-sum oracle supports Euler2D and SQG");
  if (order < 0 || order > kOracleMaxOrder) throw config_error("oracle jet order must be in 0..8");
  if (s.size() > kOracleMaxParticles) throw config_error("oracle is limited to 64 particles");
  require_fields(spec, s);
  const std::size_t np = s.size();
  const int N = order;

  KernelExpr k = catalog(spec.model).velocity_kernel;
  if (spec.delta > 0.0) k = regularize(k, spec.delta);
  std::map<MultiIndex, CompiledKernel> partials;
  partials.emplace(MultiIndex(2), CompiledKernel(k));
  for (const MultiIndex& a : MultiIndex::orders_between(2, 1, std::max(1, N - 1))) partials.emplace(a, CompiledKernel(derive(k, a)));
  std::vector<PartitionTable> tables;
  for (int n = 0; n < N; ++n) tables.push_back(n == 0 ? PartitionTable{} : make_partition_table(n, 2));
  std::vector<double> dens(np);
  for (std::size_t j = 0; j < np; ++j) dens[j] = spec.model == Model::SQG ? s.theta0[j] : s.omega0[j];

  std::vector<std::vector<Vec<2>>> X(np, std::vector<Vec<2>>(static_cast<std::size_t>(N) + 1));
  for (std::size_t i = 0; i < np; ++i) X[i][0] = s.x[i];

  for (int n = 0; n < N; ++n) {
    const double nfact = factorial(static_cast<unsigned>(n)).get_d();
    std::vector<Vec<2>> next(np);
    parallel_for(np, [&](std::size_t i) {
      TreeSum<2> acc;
      std::vector<std::vector<double>> g(static_cast<std::size_t>(n) + 1, std::vector<double>(2));
      std::array<std::map<MultiIndex, double>, 2> h;
      double val[2];
      for (std::size_t j = 0; j < np; ++j) {
        if (j == i) continue;
        for (int l = 0; l <= n; ++l) {
          const double lf = factorial(static_cast<unsigned>(l)).get_d();
          for (std::size_t a = 0; a < 2; ++a)
            g[static_cast<std::size_t>(l)][a] = (X[i][static_cast<std::size_t>(l)][a] - X[j][static_cast<std::size_t>(l)][a]) * lf;
        }
        const double y0[2] = {g[0][0], g[0][1]};
        if (y0[0] == 0.0 && y0[1] == 0.0) {
          if (spec.delta > 0.0) continue;
          detail::coincident(i, j);
        }
        std::array<double, 2> c{};
        if (n == 0) {
          partials.at(MultiIndex(2)).evaluate(y0, val);
          c = {val[0], val[1]};
        } else {
          for (const auto& [alpha, parts] : tables[static_cast<std::size_t>(n)].by_alpha) {
            partials.at(alpha).evaluate(y0, val);
            h[0][alpha] = val[0];
            h[1][alpha] = val[1];
          }
          for (std::size_t comp = 0; comp < 2; ++comp)
            c[comp] = faa_di_bruno_multi<double>(h[comp], g, n, tables[static_cast<std::size_t>(n)]);
        }
        const double m = s.w[j] * dens[j] / nfact;
        acc.add({c[0] * m, c[1] * m});
      }
      const auto v = acc.value();
      next[i] = {v[0] / (n + 1), v[1] / (n + 1)};
    });
    for (std::size_t i = 0; i < np; ++i) X[i][static_cast<std::size_t>(n) + 1] = next[i];
  }

  TrajectoryJets<2> out;
  out.t0 = s.t;
  out.x.assign(np, VecJet<2>(N));
  for (std::size_t i = 0; i < np; ++i)
    for (int k = 0; k <= N; ++k) out.x[i][k] = X[i][static_cast<std::size_t>(k)];
  return out;
}

// Taylor coefficients of g' = h(g), g(0) = g0.
inline ScalarJet ode1d_testbed(const std::function<ScalarJet(const ScalarJet&)>& h, double g0, int order) {
  if (order < 0) throw config_error("testbed order must be non-negative");
  ScalarJet g(order);
  g[0] = g0;
  for (int n = 0; n < order; ++n) {
    ScalarJet trunc(std::vector<double>(g.coeffs().begin(), g.coeffs().begin() + n + 1));
    const ScalarJet hv = h(trunc);
    g[n + 1] = hv[n] / (n + 1);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Radius estimates and Cauchy envelopes.

template <std::size_t D>
std::vector<std::vector<double>> coefficient_norms(const TrajectoryJets<D>& j) {
  std::vector<std::vector<double>> out(j.x.size());
  for (std::size_t i = 0; i < j.x.size(); ++i)
    for (const auto& c : j.x[i].coeffs()) out[i].push_back(norm(c));
  return out;
}

inline std::vector<std::vector<double>> coefficient_norms(const ScalarJet& j) {
  std::vector<double> v;
  for (double c : j.coeffs()) v.push_back(std::abs(c));
  return {v};
}

struct RadiusEstimate {
  std::vector<double> ratio;  // per particle
  std::vector<double> root;
  double aggregate_ratio = std::numeric_limits<double>::infinity();
  double aggregate_root = std::numeric_limits<double>::infinity();
  bool infinite = false;          // every tail vanished
  bool no_finite_radius = false;  // ratio estimates increase monotonically past order 10
  [[nodiscard]] double aggregate() const { return aggregate_ratio; }
};

// Per-order ratio c_n/c_{n+1} (NaN when undefined).
inline double order_ratio(const std::vector<double>& c, std::size_t n) {
  if (n + 1 >= c.size() || !(c[n] > 0.0) || !(c[n + 1] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return c[n] / c[n + 1];
}

// c_n^{-1/n} (NaN when undefined).
inline double order_root(const std::vector<double>& c, std::size_t n) {
  if (n == 0 || n >= c.size() || !(c[n] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::pow(c[n], -1.0 / static_cast<double>(n));
}

// norms[p][n] = |c_n| of particle p, n = 0..N.
inline RadiusEstimate estimate_radius(const std::vector<std::vector<double>>& norms) {
  if (norms.empty()) throw config_error("estimate_radius: no particles");
  const std::size_t N = norms.front().size() - 1;
  if (norms.front().empty() || N < 4) throw config_error("estimate_radius needs jet order >= 4");
  const double inf = std::numeric_limits<double>::infinity();
  RadiusEstimate r;
  const std::size_t lo = (N + 1) / 2;
  bool all_monotone = true;
  bool any_finite_tail = false;
  for (const auto& c : norms) {
    if (c.size() != N + 1) throw config_error("estimate_radius: ragged jets");
    std::vector<double> ratios;
    for (std::size_t n = lo; n < N; ++n)
      if (const double q = order_ratio(c, n); std::isfinite(q)) ratios.push_back(q);
    double rr = inf;
    if (!ratios.empty()) {
      std::sort(ratios.begin(), ratios.end());
      const std::size_t m = ratios.size();
      rr = m % 2 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
    }
    double best = 0;
    for (std::size_t n = std::max<std::size_t>(lo, 1); n <= N; ++n)
      if (c[n] > 0.0) best = std::max(best, std::pow(c[n], 1.0 / static_cast<double>(n)));
    const double rt = best > 0 ? 1.0 / best : inf;
    r.ratio.push_back(rr);
    r.root.push_back(rt);
    r.aggregate_ratio = std::min(r.aggregate_ratio, rr);
    r.aggregate_root = std::min(r.aggregate_root, rt);

    // monotone growth of the per-order ratios beyond order 10
    std::vector<double> tail;
    for (std::size_t n = 10; n < N; ++n) tail.push_back(order_ratio(c, n));
    bool mono = tail.size() >= 3;
    for (std::size_t k = 0; k < tail.size(); ++k) {
      if (!std::isfinite(tail[k])) {
        mono = false;
        break;
      }
      if (k > 0 && !(tail[k] > tail[k - 1])) mono = false;
    }
    if (std::isfinite(rr)) {
      any_finite_tail = true;
      all_monotone = all_monotone && mono;
    }
  }
  r.infinite = !any_finite_tail;
  r.no_finite_radius = any_finite_tail && all_monotone;
  return r;
}

template <std::size_t D>
RadiusEstimate estimate_radius(const TrajectoryJets<D>& j) {
  return estimate_radius(coefficient_norms(j));
}

enum class EnvelopeForm { geometric, half_binomial };

struct CauchyFit {
  EnvelopeForm form = EnvelopeForm::geometric;
  double C = 0;   // geometric: c_n <= C R^{-n}; half-binomial: C = 1/C1
  double R = 0;   // half-binomial: R = 1/(C0 C1)
  double C0 = 0;  // half-binomial only
  double C1 = 0;
  bool satisfied = false;
  double intercept = 0, slope = 0;  // fitted line in log space
};

// |(-1)^{n-1} (1/2 choose n)|
inline double half_binomial_abs(int n) { return std::abs(binomial_half(static_cast<unsigned>(n)).get_d()); }

// Least-squares line alpha + beta n lying on or above every point (n, y_n).
// The optimum has no active constraint, one (pivot), or two (hull edge), so
// all candidates are enumerated.
inline std::pair<double, double> envelope_line(const std::vector<double>& n, const std::vector<double>& y) {
  const std::size_t m = n.size();
  auto feasible = [&](double a, double b) {
    for (std::size_t k = 0; k < m; ++k)
      if (a + b * n[k] < y[k] - 1e-12 * (1 + std::abs(y[k]))) return false;
    return true;
  };
  auto cost = [&](double a, double b) {
    double c = 0;
    for (std::size_t k = 0; k < m; ++k) c += (a + b * n[k] - y[k]) * (a + b * n[k] - y[k]);
    return c;
  };
  double best_a = 0, best_b = 0, best_c = std::numeric_limits<double>::infinity();
  auto consider = [&](double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !feasible(a, b)) return;
    const double c = cost(a, b);
    if (c < best_c) {
      best_c = c;
      best_a = a;
      best_b = b;
    }
  };
  if (m == 1) return {y[0], 0.0};
  double sn = 0, sy = 0, snn = 0, sny = 0;
  for (std::size_t k = 0; k < m; ++k) {
    sn += n[k];
    sy += y[k];
    snn += n[k] * n[k];
    sny += n[k] * y[k];
  }
  const double den = m * snn - sn * sn;
  if (den != 0) {
    const double b = (m * sny - sn * sy) / den;
    consider((sy - b * sn) / m, b);
  }
  for (std::size_t p = 0; p < m; ++p) {
    double num = 0, dd = 0;
    for (std::size_t k = 0; k < m; ++k) {
      num += (n[k] - n[p]) * (y[k] - y[p]);
      dd += (n[k] - n[p]) * (n[k] - n[p]);
    }
    const double b = dd > 0 ? num / dd : 0.0;
    consider(y[p] - b * n[p], b);
    for (std::size_t q = p + 1; q < m; ++q) {
      const double bq = (y[q] - y[p]) / (n[q] - n[p]);
      consider(y[p] - bq * n[p], bq);
    }
  }
  if (!std::isfinite(best_c)) throw numerical_failure("envelope fit failed");
  return {best_a, best_b};
}

// c[n], n = 0..N: uses orders 1..N (nonzero ones).
inline CauchyFit fit_cauchy(const std::vector<double>& c, EnvelopeForm form = EnvelopeForm::geometric) {
  if (c.size() < 5) throw config_error("fit_cauchy needs jet order >= 4");
  std::vector<double> ns, ys;
  for (std::size_t n = 1; n < c.size(); ++n) {
    if (!(c[n] > 0.0)) continue;
    double y = std::log(c[n]);
    if (form == EnvelopeForm::half_binomial) y -= std::log(half_binomial_abs(static_cast<int>(n)));
    ns.push_back(static_cast<double>(n));
    ys.push_back(y);
  }
  if (ns.empty()) throw numerical_failure("fit_cauchy: all coefficients vanish");
  const auto [a, b] = envelope_line(ns, ys);
  CauchyFit f;
  f.form = form;
  f.intercept = a;
  f.slope = b;
  f.R = std::exp(-b);
  if (form == EnvelopeForm::geometric) {
    f.C = std::exp(a);
  } else {
    f.C1 = std::exp(-a);
    f.C0 = std::exp(b) / f.C1;
    f.C = 1.0 / f.C1;
  }
  f.satisfied = true;
  for (std::size_t n = 1; n < c.size(); ++n) {
    const double env = form == EnvelopeForm::geometric
                           ? f.C * std::pow(f.R, -static_cast<double>(n))
                           : half_binomial_abs(static_cast<int>(n)) * std::pow(f.C0, static_cast<double>(n)) *
                                 std::pow(f.C1, static_cast<double>(n) - 1.0);
    if (c[n] > env * (1 + 1e-9)) f.satisfied = false;
  }
  return f;
}

// Max over particles of |c_n|.
inline std::vector<double> max_norms(const std::vector<std::vector<double>>& norms) {
  std::vector<double> m(norms.empty() ? 0 : norms.front().size(), 0.0);
  for (const auto& c : norms)
    for (std::size_t n = 0; n < c.size() && n < m.size(); ++n) m[n] = std::max(m[n], c[n]);
  return m;
}

template <std::size_t D>
CauchyFit fit_cauchy(const TrajectoryJets<D>& j, EnvelopeForm form = EnvelopeForm::geometric) {
  return fit_cauchy(max_norms(coefficient_norms(j)), form);
}

// ---------------------------------------------------------------------------
// Taylor time stepping.

struct StepReport {
  double h = 0;
  double radius = 0;
  double truncation = 0;  // max_i |c_N| h^N
  bool radius_infinite = false;
};

inline State2 taylor_advance(const State2& s, const TrajectoryJets<2>& j, double h) {
  State2 out = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.x[i] = j.x[i].evaluate(h);
    if (!j.g.empty()) out.g[i] = j.g[i].evaluate(h);
  }
  out.t = s.t + h;
  detail::check_finite(reinterpret_cast<const double*>(out.x.data()), 2 * out.size(), "Taylor step");
  return out;
}

inline double step_size(const RadiusEstimate& r, double sigma, double h_cap) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw config_error("Taylor safety factor must lie in (0,1)");
  const double base = std::min(r.aggregate(), h_cap);
  if (!std::isfinite(base) || !(base > 0)) throw numerical_failure("no finite step size: radius estimate infinite and no cap");
  return sigma * base;
}

inline std::pair<State2, StepReport> taylor_step(const ModelSpec& spec, const State2& s, int order, double sigma,
                                                 double h_cap = std::numeric_limits<double>::infinity()) {
  const auto jets = time_jets_fast(spec, s, order);
  const auto r = estimate_radius(jets);
  StepReport rep;
  rep.radius = r.aggregate();
  rep.radius_infinite = r.infinite;
  rep.h = step_size(r, sigma, h_cap);
  for (const auto& xj : jets.x) rep.truncation = std::max(rep.truncation, norm(xj[order]) * std::pow(rep.h, order));
  return {taylor_advance(s, jets, rep.h), rep};
}

// Testbed counterpart: one step of g' = h(g).
inline std::pair<double, StepReport> taylor_step_scalar(const std::function<ScalarJet(const ScalarJet&)>& hfun, double g0,
                                                        int order, double sigma,
                                                        double h_cap = std::numeric_limits<double>::infinity()) {
  const auto g = ode1d_testbed(hfun, g0, order);
  const auto r = estimate_radius(coefficient_norms(g));
  StepReport rep;
  rep.radius = r.aggregate();
  rep.radius_infinite = r.infinite;
  rep.h = step_size(r, sigma, h_cap);
  rep.truncation = std::abs(g[order]) * std::pow(rep.h, order);
  return {g.evaluate(rep.h), rep};
}

}  // namespace lagpath
