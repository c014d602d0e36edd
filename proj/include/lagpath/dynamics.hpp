#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "lagpath/errors.hpp"
#include "lagpath/linalg.hpp"
#include "lagpath/parallel.hpp"
#include "lagpath/particles.hpp"

namespace lagpath {

// {f, g} = d1 f d2 g - d2 f d1 g
inline double poisson_bracket(const Vec<2>& f_grad, const Vec<2>& g_grad) { return dot(perp(f_grad), g_grad); }

// Right-hand side of the coupled system for (X, G, W).
template <std::size_t D>
struct Rhs {
  std::vector<Vec<D>> u;      // dX/dt
  std::vector<Mat<D>> gradu;  // Eulerian velocity gradient along each path
  std::vector<Mat<D>> dg;     // dG/dt = gradu G
  std::vector<double> dW;     // Boussinesq accumulator rate
};

namespace detail {

constexpr double kInv2Pi = 0.5 * std::numbers::inv_pi;
constexpr double kInv4Pi = 0.25 * std::numbers::inv_pi;

// 1 - exp(-r^2/delta^2), or 1 without regularization.
inline double blob(double r2, double delta) { return delta > 0.0 ? -std::expm1(-r2 / (delta * delta)) : 1.0; }

[[noreturn]] inline void coincident(std::size_t i, std::size_t j) {
  throw numerical_failure("coincident particles " + std::to_string(i) + " and " + std::to_string(j) +
                          " with zero regularization");
}

inline void check_finite(const double* p, std::size_t n, const char* what) {
  for (std::size_t k = 0; k < n; ++k)
    if (!std::isfinite(p[k])) throw numerical_failure(std::string("non-finite value in ") + what);
}

// {theta0, X2} at one particle: d1 theta0 G22 - d2 theta0 G21.
inline double bracket_theta_x2(const Vec<2>& grad_theta0, const Mat<2>& g) {
  return poisson_bracket(grad_theta0, {g[1][0], g[1][1]});
}

// Per-particle source strength for the 2D Biot-Savart family.
inline std::vector<double> vorticity_density(const ModelSpec& spec, const State2& s) {
  const std::size_t n = s.size();
  std::vector<double> rho(n);
  for (std::size_t j = 0; j < n; ++j) {
    switch (spec.model) {
      case Model::Euler2D: rho[j] = s.omega0[j]; break;
      case Model::IPM: rho[j] = -bracket_theta_x2(s.grad_theta0[j], s.g[j]); break;
      case Model::Boussinesq2D: rho[j] = s.omega0[j] + s.W[j]; break;
      default: rho[j] = 0; break;
    }
  }
  return rho;
}

}  // namespace detail

inline Rhs<2> compute_rhs(const ModelSpec& spec, const State2& s, bool with_gradient = true) {
  require_fields(spec, s);
  const std::size_t n = s.size();
  const bool grad = with_gradient || spec.gradients_required();
  const double delta = spec.delta;
  Rhs<2> out;
  out.u.resize(n);
  if (grad) {
    out.gradu.resize(n);
    out.dg.resize(n);
  }
  if (spec.model == Model::Boussinesq2D) out.dW.resize(n);

  const bool sqg = spec.model == Model::SQG;
  std::vector<double> rho;
  std::vector<Vec<2>> q;  // SQG: cof(G_j) grad theta0_j
  if (sqg) {
    q.resize(n);
    for (std::size_t j = 0; j < n; ++j) q[j] = matvec(cofactor(s.g[j]), s.grad_theta0[j]);
  } else {
    rho = detail::vorticity_density(spec, s);
  }

  parallel_for(n, [&](std::size_t i) {
    TreeSum<6> acc;
    const Vec<2> xi = s.x[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double y1 = xi[0] - s.x[j][0], y2 = xi[1] - s.x[j][1];
      const double r2 = y1 * y1 + y2 * y2;
      if (r2 == 0.0) {
        if (delta > 0.0) continue;
        detail::coincident(i, j);
      }
      const double reg = detail::blob(r2, delta);
      std::array<double, 6> c{};
      if (sqg) {
        const double k = s.w[j] * reg * detail::kInv2Pi / (r2 * std::sqrt(r2));
        const double k1 = -y2 * k, k2 = y1 * k;
        c[0] = k1 * s.theta0[j];
        c[1] = k2 * s.theta0[j];
        if (grad) {
          c[2] = k1 * q[j][0];
          c[3] = k1 * q[j][1];
          c[4] = k2 * q[j][0];
          c[5] = k2 * q[j][1];
        }
      } else {
        const double m = s.w[j] * rho[j];
        if (m == 0.0) continue;
        const double k = m * reg * detail::kInv2Pi / r2;
        c[0] = -y2 * k;
        c[1] = y1 * k;
        if (grad) {
          const double kk = k / r2;
          const double off = (y2 * y2 - y1 * y1) * kk;
          c[2] = 2.0 * y1 * y2 * kk;
          c[3] = off;
          c[4] = off;
          c[5] = -2.0 * y1 * y2 * kk;
        }
      }
      acc.add(c);
    }
    const auto v = acc.value();
    out.u[i] = {v[0], v[1]};
    if (grad) {
      Mat<2> gu = {{{v[2], v[3]}, {v[4], v[5]}}};
      if (!sqg) {
        // local rotation 1/2 rho_i J, J = [[0,-1],[1,0]]
        const double half = 0.5 * rho[i];
        gu[0][1] -= half;
        gu[1][0] += half;
      }
      out.gradu[i] = gu;
      out.dg[i] = matmul(gu, s.g[i]);
    }
    if (spec.model == Model::Boussinesq2D) out.dW[i] = detail::bracket_theta_x2(s.grad_theta0[i], s.g[i]);
  });
  detail::check_finite(reinterpret_cast<const double*>(out.u.data()), 2 * n, "velocity");
  if (grad) detail::check_finite(reinterpret_cast<const double*>(out.dg.data()), 4 * n, "gradient rate");
  return out;
}

inline Mat<3> cross_matrix(const Vec<3>& w) { return {{{0, -w[2], w[1]}, {w[2], 0, -w[0]}, {-w[1], w[0], 0}}}; }

inline Rhs<3> compute_rhs(const ModelSpec& spec, const State3& s, bool /*with_gradient*/ = true) {
  require_fields(spec, s);
  const std::size_t n = s.size();
  const double delta = spec.delta;
  Rhs<3> out;
  out.u.resize(n);
  out.gradu.resize(n);
  out.dg.resize(n);
  std::vector<Vec<3>> xi(n);  // Cauchy formula G omega0
  for (std::size_t j = 0; j < n; ++j) xi[j] = matvec(s.g[j], s.omega0_vec[j]);

  parallel_for(n, [&](std::size_t i) {
    TreeSum<12> acc;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec<3> y = s.x[i] - s.x[j];
      const double r2 = dot(y, y);
      if (r2 == 0.0) {
        if (delta > 0.0) continue;
        detail::coincident(i, j);
      }
      if (xi[j][0] == 0.0 && xi[j][1] == 0.0 && xi[j][2] == 0.0) continue;
      const double reg = detail::blob(r2, delta);
      const double r = std::sqrt(r2);
      const double k = s.w[j] * reg * detail::kInv4Pi / (r2 * r);
      const Vec<3> u = cross(xi[j], y) * k;
      // strain: 3/(8 pi r^5) ((y x xi)_a y_b + (y x xi)_b y_a)
      const Vec<3> yx = cross(y, xi[j]);
      const double ks = 1.5 * k / r2;
      std::array<double, 12> c{};
      c[0] = u[0];
      c[1] = u[1];
      c[2] = u[2];
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) c[3 + 3 * a + b] = ks * (yx[a] * y[b] + yx[b] * y[a]);
      acc.add(c);
    }
    const auto v = acc.value();
    out.u[i] = {v[0], v[1], v[2]};
    Mat<3> gu{};
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) gu[a][b] = v[3 + 3 * a + b];
    gu += cross_matrix(xi[i]) * 0.5;
    out.gradu[i] = gu;
    out.dg[i] = matmul(gu, s.g[i]);
  });
  detail::check_finite(reinterpret_cast<const double*>(out.u.data()), 3 * n, "velocity");
  detail::check_finite(reinterpret_cast<const double*>(out.dg.data()), 9 * n, "gradient rate");
  return out;
}

// Velocity induced at an arbitrary point p (not a particle) by a 2D state;
// every particle contributes.
inline Vec<2> probe_velocity(const ModelSpec& spec, const State2& s, const Vec<2>& p) {
  require_fields(spec, s);
  const std::vector<double> rho = spec.model == Model::SQG ? s.theta0 : detail::vorticity_density(spec, s);
  const double power = spec.model == Model::SQG ? 1.5 : 1.0;
  TreeSum<2> acc;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double y1 = p[0] - s.x[j][0], y2 = p[1] - s.x[j][1];
    const double r2 = y1 * y1 + y2 * y2;
    if (r2 == 0.0) {
      if (spec.delta > 0.0) continue;
      throw numerical_failure("probe point coincides with a particle");
    }
    const double k = s.w[j] * rho[j] * detail::blob(r2, spec.delta) * detail::kInv2Pi / std::pow(r2, power);
    acc.add({-y2 * k, y1 * k});
  }
  const auto v = acc.value();
  return {v[0], v[1]};
}

template <std::size_t D>
std::vector<Vec<D>> velocity(const ModelSpec& spec, const ParticleState<D>& s) {
  return compute_rhs(spec, s, false).u;
}

template <std::size_t D>
std::vector<Mat<D>> grad_rhs(const ModelSpec& spec, const ParticleState<D>& s) {
  return compute_rhs(spec, s, true).dg;
}

// Classical RK4 on (X, G, W).
template <std::size_t D>
ParticleState<D> rk4_step(const ModelSpec& spec, const ParticleState<D>& s0, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("rk4_step: dt must be positive");
  const bool grad = spec.gradients_required();
  const std::size_t n = s0.size();
  auto stage = [&](const Rhs<D>& k, double c) {
    ParticleState<D> s = s0;
    for (std::size_t i = 0; i < n; ++i) {
      s.x[i] += k.u[i] * c;
      if (grad) s.g[i] += k.dg[i] * c;
      if (!k.dW.empty()) s.W[i] += k.dW[i] * c;
    }
    s.t = s0.t + c;
    return s;
  };
  const Rhs<D> k1 = compute_rhs(spec, s0, grad);
  const Rhs<D> k2 = compute_rhs(spec, stage(k1, 0.5 * dt), grad);
  const Rhs<D> k3 = compute_rhs(spec, stage(k2, 0.5 * dt), grad);
  const Rhs<D> k4 = compute_rhs(spec, stage(k3, dt), grad);
  ParticleState<D> s = s0;
  const double w1 = dt / 6.0, w2 = dt / 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.x[i] += k1.u[i] * w1 + k2.u[i] * w2 + k3.u[i] * w2 + k4.u[i] * w1;
    if (grad) s.g[i] += k1.dg[i] * w1 + k2.dg[i] * w2 + k3.dg[i] * w2 + k4.dg[i] * w1;
    if (!k1.dW.empty()) s.W[i] += k1.dW[i] * w1 + k2.dW[i] * w2 + k3.dW[i] * w2 + k4.dW[i] * w1;
  }
  s.t = s0.t + dt;
  detail::check_finite(reinterpret_cast<const double*>(s.x.data()), D * n, "RK4 positions");
  return s;
}

}  // namespace lagpath
