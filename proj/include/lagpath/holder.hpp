#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "lagpath/errors.hpp"
#include "lagpath/linalg.hpp"
#include "lagpath/particles.hpp"
#include "lagpath/random.hpp"

namespace lagpath {

struct HolderStats {
  double gamma = 0.5;
  double lambda = 1.5;
  double theta_seminorm = 0;  // [theta0]_{C^gamma}
  double theta_l1 = 0;
  double theta_linf = 0;
  double grad_seminorm = 0;   // [grad theta0]_{C^gamma}
  double grad_cgamma = 0;     // |grad theta0|_{L^inf} + [grad theta0]_{C^gamma}
  double grad_l1 = 0;
  double grad_linf = 0;
  // |X - a|_inf + |G|_inf + [G]_{C^gamma}; exactly 1 at t = 0
  double x_norm = 1;
};

// Nearest (axis) and next-nearest (diagonal) label pairs of a 2D grid state,
// plus a seeded random sample.
inline std::vector<std::pair<std::size_t, std::size_t>> holder_pairs(const State2& s, std::size_t samples,
                                                                     std::uint64_t seed) {
  if (s.grid_n < 2) throw config_error("Holder statistics need a grid state");
  const auto g = static_cast<std::size_t>(s.grid_n);
  std::vector<std::pair<std::size_t, std::size_t>> p;
  for (std::size_t r = 0; r < g; ++r)
    for (std::size_t c = 0; c < g; ++c) {
      const std::size_t i = r * g + c;
      if (c + 1 < g) p.emplace_back(i, i + 1);
      if (r + 1 < g) p.emplace_back(i, i + g);
      if (r + 1 < g && c + 1 < g) p.emplace_back(i, i + g + 1);
      if (r + 1 < g && c > 0) p.emplace_back(i, i + g - 1);
    }
  Rng rng(seed);
  const std::size_t n = s.size();
  for (std::size_t k = 0; k < samples; ++k) {
    const std::size_t i = rng.index(n);
    std::size_t j = rng.index(n - 1);
    if (j >= i) ++j;
    p.emplace_back(i, j);
  }
  return p;
}

// Sampled max of |f_i - f_j| / |a_i - a_j|^gamma; a lower bound of the true seminorm.
template <class F>
double sampled_seminorm(const State2& s, const std::vector<std::pair<std::size_t, std::size_t>>& pairs, double gamma,
                        F&& diff) {
  double m = 0;
  for (const auto& [i, j] : pairs) {
    const double d = norm(Vec<2>(s.a[i] - s.a[j]));
    if (d == 0) continue;
    m = std::max(m, diff(i, j) / std::pow(d, gamma));
  }
  return m;
}

inline HolderStats holder_stats(const State2& s, double gamma, double lambda = 1.5, std::size_t samples = 2000,
                                std::uint64_t seed = 0) {
  if (!(gamma > 0 && gamma < 1)) throw config_error("gamma must lie in (0,1)");
  if (!(lambda > 1 && lambda <= 1.5)) throw config_error("lambda must lie in (1, 3/2]");
  if (s.theta0.size() != s.size() || s.grad_theta0.size() != s.size()) throw config_error("Holder statistics need theta0");
  const auto pairs = holder_pairs(s, samples, seed);
  HolderStats h;
  h.gamma = gamma;
  h.lambda = lambda;
  for (std::size_t i = 0; i < s.size(); ++i) {
    h.theta_l1 += s.w[i] * std::abs(s.theta0[i]);
    h.theta_linf = std::max(h.theta_linf, std::abs(s.theta0[i]));
    const double gn = norm(s.grad_theta0[i]);
    h.grad_l1 += s.w[i] * gn;
    h.grad_linf = std::max(h.grad_linf, gn);
  }
  h.theta_seminorm = sampled_seminorm(s, pairs, gamma, [&](std::size_t i, std::size_t j) {
    return std::abs(s.theta0[i] - s.theta0[j]);
  });
  h.grad_seminorm = sampled_seminorm(s, pairs, gamma, [&](std::size_t i, std::size_t j) {
    return norm(Vec<2>(s.grad_theta0[i] - s.grad_theta0[j]));
  });
  h.grad_cgamma = h.grad_linf + h.grad_seminorm;
  double disp = 0, gsup = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    disp = std::max(disp, norm(Vec<2>(s.x[i] - s.a[i])));
    gsup = std::max(gsup, op_norm(s.g[i]));
  }
  const double gsemi = sampled_seminorm(s, pairs, gamma, [&](std::size_t i, std::size_t j) {
    return op_norm(Mat<2>(s.g[i] - s.g[j]));
  });
  h.x_norm = disp + gsup + gsemi;
  return h;
}

struct BoundTerm {
  std::string name;
  double value = 0;  // lower bound imposed on C0 (NaN when not enforced)
  bool enforced = true;
};

struct RadiusBound {
  double C0 = 0, C1 = 0, R = 0;
  std::vector<BoundTerm> provenance;
};

// Explicit constants only: C1 = 27 lambda c_k, C0 = max of the displayed lower
// bounds, R = 1/(C0 C1).
inline RadiusBound paper_radius_bound(const HolderStats& h, double c_k = 32.0) {
  const double g = h.gamma, l = h.lambda;
  if (!(g > 0 && g < 1)) throw config_error("gamma must lie in (0,1)");
  if (!(l > 1 && l <= 1.5)) throw config_error("lambda must lie in (1, 3/2]");
  if (!(c_k > 0)) throw config_error("kernel constant must be positive");
  const double pi = std::numbers::pi;
  RadiusBound b;
  b.C1 = 27.0 * l * c_k;
  auto add = [&](std::string name, double v) { b.provenance.push_back({std::move(name), v, true}); };
  add("deformation norm |X-a| + |grad X| + [grad X] at t=0", h.x_norm);
  add("theta0 Holder seminorm and L1 mass", 2.0 * (8.0 * l * l * (1.0 / g + l) * h.theta_seminorm + h.theta_l1));
  add("grad theta0 Holder norm and L1 mass against C1^2",
      8.0 * (8.0 * (1.0 / g + l) * l * l * h.grad_cgamma + h.grad_l1) / (b.C1 * b.C1));
  add("grad theta0 Holder norm over kernel constant squared", 160.0 * pi / g / (c_k * c_k) * h.grad_cgamma);
  add("near-field Holder estimate 288 pi/(1-gamma)", 16.0 * 288.0 * pi / (1.0 - g) * std::pow(4.0, g - 1.0) * h.grad_cgamma);
  add("grad theta0 L1 and L-infinity", 8.0 * std::pow(16.0 * pi, g / 2.0) * (h.grad_l1 + h.grad_linf));
  for (const auto& t : b.provenance) b.C0 = std::max(b.C0, t.value);
  b.provenance.push_back({"L^{2/(2-gamma)} term with constant C_gamma: not enforced, constant implicit",
                          std::numeric_limits<double>::quiet_NaN(), false});
  b.provenance.push_back({"short-time smallness (sufficiently large C0): not enforced, constant implicit",
                          std::numeric_limits<double>::quiet_NaN(), false});
  if (!(b.C0 > 0)) throw numerical_failure("radius bound: C0 vanished");
  b.R = 1.0 / (b.C0 * b.C1);
  return b;
}

}  // namespace lagpath
