#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "lagpath/dynamics.hpp"
#include "lagpath/errors.hpp"
#include "lagpath/linalg.hpp"
#include "lagpath/particles.hpp"
#include "lagpath/random.hpp"

namespace lagpath {

struct ChordArc {
  double min_ratio = 1.0;
  double max_ratio = 1.0;
  bool coincident = false;  // some sampled pair shares a position; max is +inf
  std::size_t pairs = 0;
};

// Pairs used by chord_arc: grid neighbours (axis and diagonal in the first
// two axes) for grid states, all pairs for small point sets, plus a seeded
// random sample.
template <std::size_t D>
std::vector<std::pair<std::size_t, std::size_t>> chord_pairs(const ParticleState<D>& s, std::size_t samples,
                                                             std::uint64_t seed) {
  const std::size_t n = s.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (s.grid_n > 0) {
    const auto g = static_cast<std::size_t>(s.grid_n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t stride = 1;
      for (std::size_t d = D; d-- > 0;) {
        const std::size_t k = (i / stride) % g;
        if (k + 1 < g) pairs.emplace_back(i, i + stride);
        stride *= g;
      }
    }
  } else if (n <= 64) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  } else {
    // nearest label neighbour of each particle
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = i == 0 ? 1 : 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const Vec<D> d = s.a[i] - s.a[j];
        const double dd = dot(d, d);
        if (dd < bd) {
          bd = dd;
          best = j;
        }
      }
      pairs.emplace_back(std::min(i, best), std::max(i, best));
    }
  }
  if (n >= 2) {
    Rng rng(seed);
    for (std::size_t k = 0; k < samples; ++k) {
      const std::size_t i = rng.index(n);
      std::size_t j = rng.index(n - 1);
      if (j >= i) ++j;
      pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

// min/max of |a_i - a_j| / |X_i - X_j| over the pair set.
template <std::size_t D>
ChordArc chord_arc(const ParticleState<D>& s, std::size_t samples, std::uint64_t seed = 0) {
  if (s.size() < 2) throw config_error("chord_arc needs at least two particles");
  ChordArc c;
  c.min_ratio = std::numeric_limits<double>::infinity();
  c.max_ratio = 0.0;
  for (const auto& [i, j] : chord_pairs(s, samples, seed)) {
    const double da = norm(Vec<D>(s.a[i] - s.a[j]));
    const double dx = norm(Vec<D>(s.x[i] - s.x[j]));
    double r = 0;
    if (dx == 0.0) {
      c.coincident = true;
      r = std::numeric_limits<double>::infinity();
    } else {
      r = da / dx;
    }
    c.min_ratio = std::min(c.min_ratio, r);
    c.max_ratio = std::max(c.max_ratio, r);
    ++c.pairs;
  }
  return c;
}

// max_i |(dG/dt G^{-1})_i|_2 : the discrete sup norm of the velocity gradient.
template <std::size_t D>
double grad_u_sup(const std::vector<Mat<D>>& dg, const std::vector<Mat<D>>& g) {
  double m = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Mat<D> inv{};
    if (!inverse(g[i], inv)) throw numerical_failure("singular deformation gradient");
    m = std::max(m, op_norm(matmul(dg[i], inv)));
  }
  return m;
}

// exp of the trapezoid integral of a sampled history with uniform spacing dt.
inline double lambda_accumulate(const std::vector<double>& history, double dt) {
  double integral = 0;
  for (std::size_t k = 0; k < history.size(); ++k) {
    if (history[k] < 0 || !std::isfinite(history[k])) throw config_error("lambda_accumulate: history must be nonnegative");
    if (k > 0) integral += 0.5 * dt * (history[k - 1] + history[k]);
  }
  return std::exp(integral);
}

// Running version for non-uniform steps.
class LambdaAccumulator {
 public:
  void push(double t, double grad_u) {
    if (has_) integral_ += 0.5 * (t - t_) * (g_ + grad_u);
    t_ = t;
    g_ = grad_u;
    has_ = true;
  }
  [[nodiscard]] double value() const { return std::exp(integral_); }

 private:
  double integral_ = 0, t_ = 0, g_ = 0;
  bool has_ = false;
};

struct PointVortexInvariants {
  double hamiltonian = 0;
  Vec<2> momentum{};
  double angular_impulse = 0;
};

// Circulations are w_i * omega0_i.
inline PointVortexInvariants invariants_euler2d(const State2& s) {
  PointVortexInvariants r;
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = s.w[i] * s.omega0[i];
    r.momentum += s.x[i] * gi;
    r.angular_impulse += gi * dot(s.x[i], s.x[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gj = s.w[j] * s.omega0[j];
      const double d = norm(Vec<2>(s.x[i] - s.x[j]));
      r.hamiltonian -= 0.25 * std::numbers::inv_pi * gi * gj * std::log(d);
    }
  }
  return r;
}

template <std::size_t D>
double incompressibility_residual(const ParticleState<D>& s) {
  double m = 0;
  for (const auto& g : s.g) m = std::max(m, std::abs(det(g) - 1.0));
  return m;
}

struct DiagnosticsRecord {
  double t = 0;
  double chord_min = 1, chord_max = 1;
  double lambda_bound = 1;
  double grad_u_sup = 0;
  double det_dev = 0;
  double hamiltonian = std::numeric_limits<double>::quiet_NaN();
  double p1 = std::numeric_limits<double>::quiet_NaN();
  double p2 = std::numeric_limits<double>::quiet_NaN();
  double ang_imp = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace lagpath
