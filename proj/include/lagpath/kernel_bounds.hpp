#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "lagpath/kernel_expr.hpp"
#include "lagpath/random.hpp"

namespace lagpath {

// Points with log-uniform radius in [r_min, r_max] and uniform direction.
inline std::vector<std::vector<double>> log_uniform_samples(std::size_t count, int dim, double r_min, double r_max,
                                                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> out;
  out.reserve(count);
  const double l0 = std::log(r_min), l1 = std::log(r_max);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = std::exp(rng.uniform(l0, l1));
    if (dim == 2) {
      const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
      out.push_back({r * std::cos(th), r * std::sin(th)});
    } else {
      const double z = rng.uniform(-1.0, 1.0);
      const double ph = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      out.push_back({r * s * std::cos(ph), r * s * std::sin(ph), r * z});
    }
  }
  return out;
}

enum class BoundForm { with_gaussian, without_gaussian };

struct DerivativeBoundReport {
  std::vector<double> worst_ratio;  // per order 0..max_order
  std::vector<std::vector<double>> worst_point;
  std::vector<MultiIndex> worst_alpha;
  bool pass = true;
};

// Checks |d^alpha e(y)| <= c_k^|alpha| |alpha|! |y|^-(|alpha|+offset) [exp(-|y|^2/2)]
// for every |alpha| <= max_order and every sample (Euclidean/Frobenius norm of the value).
inline DerivativeBoundReport verify_derivative_bound(const KernelExpr& e, double c_k, int power_offset, int max_order,
                                                     const std::vector<std::vector<double>>& samples, BoundForm form) {
  if (max_order < 0 || max_order > 6) throw std::invalid_argument("verify_derivative_bound: max_order must be 0..6");
  DerivativeBoundReport rep;
  rep.worst_ratio.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  rep.worst_point.assign(static_cast<std::size_t>(max_order) + 1, {});
  rep.worst_alpha.assign(static_cast<std::size_t>(max_order) + 1, MultiIndex(e.dim()));
  // Derivatives built incrementally: d^alpha from d^(alpha - e_last).
  std::vector<std::pair<MultiIndex, KernelExpr>> level{{MultiIndex(e.dim()), e}};
  double fact = 1.0;
  for (int order = 0; order <= max_order; ++order) {
    if (order > 0) {
      fact *= order;
      std::vector<std::pair<MultiIndex, KernelExpr>> next;
      for (const MultiIndex& a : MultiIndex::of_order(e.dim(), order)) {
        int ax = e.dim() - 1;
        while (a[ax] == 0) --ax;
        const MultiIndex parent = a - MultiIndex::unit(e.dim(), ax);
        auto it = std::find_if(level.begin(), level.end(), [&](const auto& p) { return p.first == parent; });
        next.emplace_back(a, derive(it->second, ax));
      }
      level = std::move(next);
    }
    const double ck_pow = std::pow(c_k, order);
    auto& worst = rep.worst_ratio[static_cast<std::size_t>(order)];
    for (const auto& [alpha, d] : level) {
      for (const auto& y : samples) {
        double r2 = 0;
        for (double v : y) r2 += v * v;
        const std::vector<double> val = evaluate(d, y);
        double n2 = 0;
        for (double v : val) n2 += v * v;
        const double r = std::sqrt(r2);
        // log-space bound to avoid overflow at small radii
        double log_bound = std::log(ck_pow * fact) - (order + power_offset) * std::log(r);
        if (form == BoundForm::with_gaussian) log_bound -= 0.5 * r2;
        const double ratio = n2 == 0.0 ? 0.0 : std::exp(0.5 * std::log(n2) - log_bound);
        if (ratio > worst) {
          worst = ratio;
          rep.worst_point[static_cast<std::size_t>(order)] = y;
          rep.worst_alpha[static_cast<std::size_t>(order)] = alpha;
        }
      }
    }
    if (worst > 1.0) rep.pass = false;
  }
  return rep;
}

// Gauss-Legendre nodes and weights on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Mean of e over the circle (2D, trapezoid with quad_points nodes) or the
// sphere (3D, quad_points azimuthal nodes x quad_points/2 Gauss-Legendre polar nodes).
inline std::vector<double> circle_mean(const KernelExpr& e, double radius, int quad_points) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle_mean: radius must be positive");
  if (quad_points < 8) throw std::invalid_argument("circle_mean: quad_points must be >= 8");
  std::vector<CompensatedSum> acc(e.size());
  double total_w = 0;
  auto add = [&](const std::vector<double>& y, double w) {
    const auto v = evaluate(e, y);
    for (std::size_t c = 0; c < v.size(); ++c) acc[c].add(w * v[c]);
    total_w += w;
  };
  if (e.dim() == 2) {
    for (int k = 0; k < quad_points; ++k) {
      const double th = 2.0 * std::numbers::pi * k / quad_points;
      add({radius * std::cos(th), radius * std::sin(th)}, 1.0);
    }
  } else if (e.dim() == 3) {
    std::vector<double> zs, ws;
    gauss_legendre(quad_points / 2, zs, ws);
    for (std::size_t a = 0; a < zs.size(); ++a) {
      const double s = std::sqrt(1.0 - zs[a] * zs[a]);
      for (int k = 0; k < quad_points; ++k) {
        const double ph = 2.0 * std::numbers::pi * k / quad_points;
        add({radius * s * std::cos(ph), radius * s * std::sin(ph), radius * zs[a]}, ws[a]);
      }
    }
  } else {
    throw std::invalid_argument("circle_mean: dimension must be 2 or 3");
  }
  std::vector<double> out(e.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = acc[c].value() / total_w;
  return out;
}

}  // namespace lagpath
