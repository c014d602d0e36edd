#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "lagpath/errors.hpp"
#include "lagpath/kernel_catalog.hpp"
#include "lagpath/particles.hpp"

namespace lagpath {

// Inline Gaussian field: amplitude * exp(-|a - center|^2 / (2 sigma^2)).
struct GaussianField {
  double amplitude = 1.0;
  double sigma = 0.5;
  Vec<2> center{};
};

// Inline point vortices.
struct PointField {
  std::vector<Vec<2>> positions;
  std::vector<double> strengths;
};

struct ScenarioRequest {
  std::string name{};                          // built-in tag, empty for inline fields
  std::optional<GaussianField> gaussian{};       // inline field
  std::optional<PointField> points{};          // inline point data
  std::optional<Model> model{};                // overrides the scenario default
  std::optional<std::pair<double, double>> extent{};
  std::optional<int> n_per_axis{};
  std::optional<double> delta{};               // default: 2 x label spacing on grids, 0 for points
};

struct Setup {
  ModelSpec spec;
  std::variant<State2, State3> state;
};

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"two_vortex", "vortex_pair", "sqg_bump", "ipm_stratified",
                                                 "boussinesq_bubble", "euler3d_ring"};
  return names;
}

namespace detail {

inline ScalarSampler<2> gaussian_sampler(double amp, double s, Vec<2> c) {
  ScalarSampler<2> f;
  f.value = [=](const Vec<2>& a) {
    const double d1 = a[0] - c[0], d2 = a[1] - c[1];
    return amp * std::exp(-(d1 * d1 + d2 * d2) / (2 * s * s));
  };
  f.gradient = [=](const Vec<2>& a) {
    const double d1 = a[0] - c[0], d2 = a[1] - c[1];
    const double v = amp * std::exp(-(d1 * d1 + d2 * d2) / (2 * s * s));
    return Vec<2>{-d1 / (s * s) * v, -d2 / (s * s) * v};
  };
  return f;
}

template <std::size_t D>
void finish_grid_spec(Setup& st, const ScenarioRequest& rq, const ParticleState<D>& s) {
  st.spec.delta = rq.delta.value_or(2.0 * s.spacing);
}

}  // namespace detail

// Built-in scenarios:
//   two_vortex        Euler2D, unit circulations at (0,0) and (1,0)
//   vortex_pair       Euler2D, circulations +1 at (0,0) and -1 at (1,0)
//   sqg_bump          SQG, theta0 = 0.15 exp(-|a|^2/(2*0.5^2)) on [-2,2]^2, 64 per axis
//   ipm_stratified    IPM, theta0 = -0.5 a2 e^{-|a|^2/(2*0.6^2)} + 0.1 e^{-|a-(0.3,0.2)|^2/(2*0.6^2)}, [-2,2]^2, 48 per axis
//   boussinesq_bubble Boussinesq2D, omega0 = 0, theta0 = 0.5 exp(-|a-(0,-0.5)|^2/(2*0.4^2)), [-2,2]^2, 48 per axis
//   euler3d_ring      Euler3D, azimuthal Gaussian-core ring (radius 1, core 0.25, circulation 1) on [-1.75,1.75]^3, 14 per axis
inline Setup build_scenario(const ScenarioRequest& rq) {
  Setup st;
  auto grid2 = [&](double lo, double hi, int n) {
    const auto ext = rq.extent.value_or(std::pair{lo, hi});
    return std::tuple{ext.first, ext.second, rq.n_per_axis.value_or(n)};
  };

  if (rq.points || rq.name == "two_vortex" || rq.name == "vortex_pair") {
    PointField pf;
    if (rq.points) {
      pf = *rq.points;
    } else if (rq.name == "two_vortex") {
      pf = {{{0, 0}, {1, 0}}, {1, 1}};
    } else {
      pf = {{{0, 0}, {1, 0}}, {1, -1}};
    }
    if (pf.positions.empty()) throw config_error("point scenario needs at least one point");
    st.spec.model = rq.model.value_or(Model::Euler2D);
    if (st.spec.model != Model::Euler2D) throw config_error("point-vortex scenarios require model Euler2D");
    st.spec.delta = rq.delta.value_or(0.0);
    st.state = init_points(pf.positions, pf.strengths);
    return st;
  }

  if (rq.gaussian) {
    const auto& g = *rq.gaussian;
    if (!(g.sigma > 0)) throw config_error("gaussian field needs sigma > 0");
    st.spec.model = rq.model.value_or(Model::SQG);
    if (model_dim(st.spec.model) != 2) throw config_error("inline gaussian fields are two-dimensional");
    const auto [lo, hi, n] = grid2(-2.0, 2.0, 32);
    const auto f = detail::gaussian_sampler(g.amplitude, g.sigma, g.center);
    auto s = init_grid<2>(lo, hi, n, f, f);
    detail::finish_grid_spec(st, rq, s);
    st.state = std::move(s);
    return st;
  }

  if (rq.name == "sqg_bump") {
    st.spec.model = rq.model.value_or(Model::SQG);
    const auto [lo, hi, n] = grid2(-2.0, 2.0, 64);
    auto s = init_grid<2>(lo, hi, n, detail::gaussian_sampler(0.15, 0.5, {0, 0}));
    detail::finish_grid_spec(st, rq, s);
    st.state = std::move(s);
  } else if (rq.name == "ipm_stratified") {
    st.spec.model = rq.model.value_or(Model::IPM);
    const auto [lo, hi, n] = grid2(-2.0, 2.0, 48);
    const double s2 = 0.6 * 0.6;
    const auto bump = detail::gaussian_sampler(0.1, 0.6, {0.3, 0.2});
    ScalarSampler<2> f;
    f.value = [=](const Vec<2>& a) { return -0.5 * a[1] * std::exp(-(a[0] * a[0] + a[1] * a[1]) / (2 * s2)) + bump.value(a); };
    f.gradient = [=](const Vec<2>& a) {
      const double e = std::exp(-(a[0] * a[0] + a[1] * a[1]) / (2 * s2));
      const Vec<2> gb = bump.gradient(a);
      return Vec<2>{0.5 * a[1] * a[0] / s2 * e + gb[0], -0.5 * e + 0.5 * a[1] * a[1] / s2 * e + gb[1]};
    };
    auto s = init_grid<2>(lo, hi, n, f);
    detail::finish_grid_spec(st, rq, s);
    st.state = std::move(s);
  } else if (rq.name == "boussinesq_bubble") {
    st.spec.model = rq.model.value_or(Model::Boussinesq2D);
    const auto [lo, hi, n] = grid2(-2.0, 2.0, 48);
    ScalarSampler<2> zero;
    zero.value = [](const Vec<2>&) { return 0.0; };
    auto s = init_grid<2>(lo, hi, n, detail::gaussian_sampler(0.5, 0.4, {0, -0.5}), zero);
    detail::finish_grid_spec(st, rq, s);
    st.state = std::move(s);
  } else if (rq.name == "euler3d_ring") {
    st.spec.model = rq.model.value_or(Model::Euler3D);
    if (st.spec.model != Model::Euler3D) throw config_error("euler3d_ring requires model Euler3D");
    const auto ext = rq.extent.value_or(std::pair{-1.75, 1.75});
    const int n = rq.n_per_axis.value_or(14);
    const double r0 = 1.0, core = 0.25, amp = 1.0 / (2 * std::numbers::pi * core * core);
    VectorSampler<3> w;
    w.value = [=](const Vec<3>& a) {
      const double rho = std::hypot(a[0], a[1]);
      if (rho < 1e-12) return Vec<3>{0, 0, 0};
      const double d = rho - r0;
      const double m = amp * std::exp(-(d * d + a[2] * a[2]) / (2 * core * core));
      return Vec<3>{-a[1] / rho * m, a[0] / rho * m, 0};
    };
    auto s = init_grid<3>(ext.first, ext.second, n, std::nullopt, std::nullopt, w);
    detail::finish_grid_spec(st, rq, s);
    st.state = std::move(s);
    return st;
  } else {
    throw config_error("unknown scenario: " + rq.name);
  }
  if (model_dim(st.spec.model) != 2) throw config_error("scenario " + rq.name + " is two-dimensional");
  return st;
}

}  // namespace lagpath
