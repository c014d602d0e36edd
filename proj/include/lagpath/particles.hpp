#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lagpath/errors.hpp"
#include "lagpath/kernel_catalog.hpp"
#include "lagpath/linalg.hpp"

namespace lagpath {

// Particle discretization of the label space. Scalar data theta0 carries the
// transported scalar (SQG, IPM, Boussinesq buoyancy); omega0 the 2D vorticity
// (Euler2D, Boussinesq); omega0_vec the 3D vorticity.
template <std::size_t D>
struct ParticleState {
  std::vector<Vec<D>> a;
  std::vector<Vec<D>> x;
  std::vector<Mat<D>> g;
  std::vector<double> w;
  std::vector<double> theta0;
  std::vector<Vec<D>> grad_theta0;
  std::vector<double> omega0;
  std::vector<Vec<D>> omega0_vec;
  std::vector<double> W;  // Boussinesq time integral of {theta0, X2}
  double t = 0.0;
  int grid_n = 0;         // particles per axis for grid states, 0 otherwise
  double spacing = 0.0;   // label spacing for grid states

  [[nodiscard]] std::size_t size() const { return x.size(); }
};

using State2 = ParticleState<2>;
using State3 = ParticleState<3>;

struct ModelSpec {
  Model model = Model::Euler2D;
  double delta = 0.0;
  bool evolve_gradients = true;

  [[nodiscard]] bool gradients_required() const {
    return evolve_gradients || model == Model::IPM || model == Model::Boussinesq2D || model == Model::Euler3D;
  }
};

template <std::size_t D>
struct ScalarSampler {
  std::function<double(const Vec<D>&)> value;
  std::function<Vec<D>(const Vec<D>&)> gradient;  // optional
};

template <std::size_t D>
struct VectorSampler {
  std::function<Vec<D>(const Vec<D>&)> value;
};

// Fill the structural fields of a state from labels a and weights w.
template <std::size_t D>
void reset_to_labels(ParticleState<D>& s) {
  s.x = s.a;
  s.g.assign(s.a.size(), identity<D>());
  s.W.assign(s.a.size(), 0.0);
  s.t = 0.0;
}

// Midpoint quadrature on [lo, hi]^D with n cells per axis. Row-major ordering
// with the last axis fastest.
template <std::size_t D>
ParticleState<D> init_grid(double lo, double hi, int n, const std::optional<ScalarSampler<D>>& theta0,
                           const std::optional<ScalarSampler<D>>& omega0 = std::nullopt,
                           const std::optional<VectorSampler<D>>& omega0_vec = std::nullopt) {
  if (n < 2) throw config_error("init_grid: n_per_axis must be at least 2");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw config_error("init_grid: degenerate extent");
  const double h = (hi - lo) / n;
  double cell = 1.0;
  for (std::size_t d = 0; d < D; ++d) cell *= h;
  std::size_t total = 1;
  for (std::size_t d = 0; d < D; ++d) total *= static_cast<std::size_t>(n);

  ParticleState<D> s;
  s.grid_n = n;
  s.spacing = h;
  s.a.resize(total);
  s.w.assign(total, cell);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (std::size_t d = D; d-- > 0;) {
      s.a[idx][d] = lo + (static_cast<double>(r % static_cast<std::size_t>(n)) + 0.5) * h;
      r /= static_cast<std::size_t>(n);
    }
  }
  reset_to_labels(s);

  if (theta0) {
    s.theta0.resize(total);
    s.grad_theta0.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
      s.theta0[i] = theta0->value(s.a[i]);
      if (!std::isfinite(s.theta0[i])) throw config_error("init_grid: theta0 sampler returned a non-finite value");
    }
    if (theta0->gradient) {
      for (std::size_t i = 0; i < total; ++i) s.grad_theta0[i] = theta0->gradient(s.a[i]);
    } else {
      // centered differences on the label grid, one-sided at the boundary
      for (std::size_t i = 0; i < total; ++i) {
        std::size_t stride = 1;
        for (std::size_t d = D; d-- > 0;) {
          const std::size_t k = (i / stride) % static_cast<std::size_t>(n);
          const std::size_t lo_i = k > 0 ? i - stride : i;
          const std::size_t hi_i = k + 1 < static_cast<std::size_t>(n) ? i + stride : i;
          const double span = h * static_cast<double>((hi_i - lo_i) / stride);
          s.grad_theta0[i][d] = (s.theta0[hi_i] - s.theta0[lo_i]) / span;
          stride *= static_cast<std::size_t>(n);
        }
      }
    }
  }
  if (omega0) {
    s.omega0.resize(total);
    for (std::size_t i = 0; i < total; ++i) s.omega0[i] = omega0->value(s.a[i]);
  }
  if (omega0_vec) {
    s.omega0_vec.resize(total);
    for (std::size_t i = 0; i < total; ++i) s.omega0_vec[i] = omega0_vec->value(s.a[i]);
  }
  return s;
}

// Point data: labels = positions, explicit weights (circulations go in omega0
// with unit weights, or vice versa).
inline State2 init_points(const std::vector<Vec<2>>& pos, const std::vector<double>& strength) {
  if (pos.size() != strength.size()) throw config_error("init_points: size mismatch");
  State2 s;
  s.a = pos;
  s.w.assign(pos.size(), 1.0);
  s.omega0 = strength;
  reset_to_labels(s);
  return s;
}

// Checks that the fields a model needs are present.
template <std::size_t D>
void require_fields(const ModelSpec& spec, const ParticleState<D>& s) {
  const std::size_t n = s.size();
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw config_error(std::string("state is missing ") + what + " for model " + std::string(to_string(spec.model)));
  };
  need(s.a.size() == n && s.w.size() == n && s.g.size() == n, "labels/weights/gradients");
  if (static_cast<int>(D) != model_dim(spec.model)) throw config_error("state dimension does not match the model");
  switch (spec.model) {
    case Model::Euler2D: need(s.omega0.size() == n, "omega0"); break;
    case Model::SQG: need(s.theta0.size() == n && s.grad_theta0.size() == n, "theta0"); break;
    case Model::IPM: need(s.grad_theta0.size() == n, "grad theta0"); break;
    case Model::Boussinesq2D: need(s.omega0.size() == n && s.grad_theta0.size() == n && s.W.size() == n, "omega0/theta0/W"); break;
    case Model::Euler3D: need(s.omega0_vec.size() == n, "vector omega0"); break;
  }
  if (spec.delta < 0 || !std::isfinite(spec.delta)) throw config_error("regularization delta must be >= 0");
}

}  // namespace lagpath
