#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "lagpath/diagnostics.hpp"
#include "lagpath/dynamics.hpp"
#include "lagpath/holder.hpp"
#include "lagpath/random.hpp"
#include "lagpath/scenarios.hpp"
#include "lagpath/taylor.hpp"

using namespace lagpath;

namespace {

constexpr double kPi = std::numbers::pi;
const double kPeriod = 2 * kPi * kPi;

State2 two_vortex() { return std::get<State2>(build_scenario({.name = "two_vortex"}).state); }
ModelSpec euler_points() { return {Model::Euler2D, 0.0, true}; }

State2 random_cloud(std::uint64_t seed, int n) {
  Rng rng(seed);
  State2 s;
  for (int i = 0; i < n; ++i) {
    s.a.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    s.w.push_back(rng.uniform(0.5, 1.5) / n);
    s.theta0.push_back(rng.uniform(-1, 1));
    s.grad_theta0.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    s.omega0.push_back(rng.uniform(-1, 1));
  }
  reset_to_labels(s);
  return s;
}

// Largest per-order relative gap, scaled by the order's largest coefficient.
double jet_gap(const TrajectoryJets<2>& a, const TrajectoryJets<2>& b) {
  double worst = 0;
  for (int n = 0; n <= b.order(); ++n) {
    double scale = 0, diff = 0;
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      scale = std::max(scale, norm(b.x[i][n]));
      diff = std::max(diff, norm(Vec<2>(a.x[i][n] - b.x[i][n])));
    }
    if (scale > 0) worst = std::max(worst, diff / scale);
  }
  return worst;
}

// n-th normalized Taylor coefficient of the exact corotating path.
Vec<2> two_vortex_coef(int which, int n) {
  const double phase = which == 0 ? kPi : 0.0;
  const double f = 0.5 * std::pow(1.0 / kPi, n) / std::tgamma(n + 1.0);
  Vec<2> c{f * std::cos(phase + n * kPi / 2), f * std::sin(phase + n * kPi / 2)};
  if (n == 0) c[0] += 0.5;
  return c;
}

ScalarJet square(const ScalarJet& g) {
  ScalarJet r(g.order());
  for (int k = 0; k <= g.order(); ++k)
    for (int i = 0; i <= k; ++i) r[k] += g[i] * g[k - i];
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(Testbed, SquareGivesGeometricSeries) {
  const auto g = ode1d_testbed(square, 1.0, 20);
  for (int n = 0; n <= 20; ++n) EXPECT_NEAR(g[n], 1.0, 1e-12) << n;
  const auto r = estimate_radius(coefficient_norms(g));
  EXPECT_NEAR(r.aggregate(), 1.0, 0.05);
  EXPECT_NEAR(r.aggregate_root, 1.0, 0.05);
  EXPECT_FALSE(r.infinite);
}

TEST(Testbed, ConstantAndLinearRhs) {
  const auto lin = ode1d_testbed([](const ScalarJet& g) { return ScalarJet::constant(1.0, g.order()); }, 2.5, 6);
  EXPECT_DOUBLE_EQ(lin[0], 2.5);
  EXPECT_DOUBLE_EQ(lin[1], 1.0);
  for (int n = 2; n <= 6; ++n) EXPECT_DOUBLE_EQ(lin[n], 0.0);
  const auto e = ode1d_testbed([](const ScalarJet& g) { return g; }, 1.0, 15);
  for (int n = 0; n <= 15; ++n) EXPECT_NEAR(e[n], 1.0 / std::tgamma(n + 1.0), 1e-15);
}

TEST(Testbed, StepTruncationMatchesGeometricTail) {
  // error of the order-20 polynomial at h is exactly sum_{n>20} h^n = h^21/(1-h)
  const auto [g, rep] = taylor_step_scalar(square, 1.0, 20, 0.5);
  EXPECT_NEAR(rep.h, 0.5, 0.025);
  const double exact = 1.0 / (1.0 - rep.h);
  const double tail = std::pow(rep.h, 21) / (1.0 - rep.h);
  EXPECT_NEAR((exact - g) / tail, 1.0, 1e-6);
  EXPECT_NEAR(rep.truncation, std::pow(rep.h, 20), 1e-15);
}

TEST(Testbed, CappedStepMatchesExactSolution) {
  const auto [g, rep] = taylor_step_scalar(square, 1.0, 20, 0.5, 0.3);
  EXPECT_DOUBLE_EQ(rep.h, 0.15);
  EXPECT_NEAR(g, 1.0 / (1.0 - rep.h), 1e-10);
}

TEST(Testbed, RejectsBadSafetyFactor) {
  EXPECT_THROW(taylor_step_scalar(square, 1.0, 10, 0.0), config_error);
  EXPECT_THROW(taylor_step_scalar(square, 1.0, 10, 1.0), config_error);
}

// ---------------------------------------------------------------------------

TEST(Radius, ConstantJetIsInfinite) {
  const auto r = estimate_radius(std::vector<std::vector<double>>{{3.0, 0, 0, 0, 0, 0}});
  EXPECT_TRUE(r.infinite);
  EXPECT_TRUE(std::isinf(r.aggregate()));
  EXPECT_THROW(step_size(r, 0.5, std::numeric_limits<double>::infinity()), numerical_failure);
  EXPECT_DOUBLE_EQ(step_size(r, 0.5, 2.0), 1.0);
}

TEST(Radius, RequiresOrderFour) {
  EXPECT_THROW(estimate_radius(std::vector<std::vector<double>>{{1, 1, 1, 1}}), config_error);
  EXPECT_THROW(fit_cauchy(std::vector<double>{1, 1, 1, 1}), config_error);
}

TEST(Radius, MinOverParticles) {
  std::vector<std::vector<double>> c(2);
  for (int n = 0; n <= 12; ++n) {
    c[0].push_back(std::pow(0.5, n));
    c[1].push_back(std::pow(0.25, n));
  }
  const auto r = estimate_radius(c);
  EXPECT_NEAR(r.ratio[0], 2.0, 1e-12);
  EXPECT_NEAR(r.ratio[1], 4.0, 1e-12);
  EXPECT_NEAR(r.aggregate(), 2.0, 1e-12);
  EXPECT_FALSE(r.no_finite_radius);
}

TEST(Radius, TwoVortexHasNoFiniteRadius) {
  const auto j = time_jets_fast(euler_points(), two_vortex(), 20);
  const auto r = estimate_radius(j);
  EXPECT_TRUE(r.no_finite_radius);
  EXPECT_FALSE(r.infinite);
  const auto c = coefficient_norms(j);
  for (std::size_t n = 10; n + 2 < c[0].size(); ++n) EXPECT_GT(order_ratio(c[0], n + 1), order_ratio(c[0], n));
}

// ---------------------------------------------------------------------------

TEST(Cauchy, Examples) {
  const auto ones = fit_cauchy(std::vector<double>(11, 1.0));
  EXPECT_NEAR(ones.R, 1.0, 1e-12);
  EXPECT_NEAR(ones.C, 1.0, 1e-12);
  EXPECT_TRUE(ones.satisfied);
  std::vector<double> geo;
  for (int n = 0; n <= 10; ++n) geo.push_back(std::pow(2.0, -n));
  const auto g = fit_cauchy(geo);
  EXPECT_NEAR(g.R, 2.0, 1e-12);
  EXPECT_NEAR(g.C, 1.0, 1e-12);
  EXPECT_TRUE(g.satisfied);
}

TEST(Cauchy, EnvelopeLiesAboveNoisyData) {
  Rng rng(5);
  std::vector<double> c{1.0};
  for (int n = 1; n <= 14; ++n) c.push_back(std::pow(0.7, n) * rng.uniform(0.2, 3.0));
  for (const auto form : {EnvelopeForm::geometric, EnvelopeForm::half_binomial}) {
    const auto f = fit_cauchy(c, form);
    EXPECT_TRUE(f.satisfied);
    EXPECT_GT(f.R, 0.0);
  }
}

TEST(Cauchy, HalfBinomialRecoversConstants) {
  const double C0 = 3.0, C1 = 0.7;
  std::vector<double> c{0.0};
  for (int n = 1; n <= 12; ++n) c.push_back(half_binomial_abs(n) * std::pow(C0, n) * std::pow(C1, n - 1));
  const auto f = fit_cauchy(c, EnvelopeForm::half_binomial);
  EXPECT_NEAR(f.C0, C0, 1e-9);
  EXPECT_NEAR(f.C1, C1, 1e-9);
  EXPECT_NEAR(f.R, 1.0 / (C0 * C1), 1e-9);
  EXPECT_TRUE(f.satisfied);
}

TEST(Cauchy, ZeroJetsRejected) { EXPECT_THROW(fit_cauchy(std::vector<double>(8, 0.0)), numerical_failure); }

// ---------------------------------------------------------------------------

TEST(Jets, SingleParticleIsConstant) {
  State2 s = random_cloud(1, 1);
  const auto j = time_jets_fast({Model::SQG, 0.0, true}, s, 8);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(norm(j.x[0][n]), 0.0);
  EXPECT_EQ(j.x[0][0], s.x[0]);
}

TEST(Jets, FirstOrderIsVelocity) {
  for (const Model m : {Model::Euler2D, Model::SQG, Model::IPM}) {
    const ModelSpec spec{m, 0.2, true};
    const State2 s = random_cloud(7, 24);
    const auto u = velocity(spec, s);
    const auto jf = time_jets_fast(spec, s, 3);
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_NEAR(jf.x[i][1][0], u[i][0], 1e-12 * (1 + std::abs(u[i][0])));
      EXPECT_NEAR(jf.x[i][1][1], u[i][1], 1e-12 * (1 + std::abs(u[i][1])));
    }
    if (m != Model::IPM) {
      const auto jo = time_jets_oracle(spec, s, 1);
      for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(norm(Vec<2>(jo.x[i][1] - u[i])), 1e-12 * (1 + norm(u[i])));
    }
  }
}

TEST(Jets, GradientJetStartsWithVelocityGradient) {
  const ModelSpec spec{Model::SQG, 0.3, true};
  const State2 s = random_cloud(8, 20);
  const auto dg = grad_rhs(spec, s);
  const auto j = time_jets_fast(spec, s, 2);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(max_abs(Mat<2>(j.g[i][1] - dg[i])), 1e-12 * (1 + max_abs(dg[i])));
}

TEST(Jets, PrefixStableUnderHigherOrder) {
  const ModelSpec spec{Model::IPM, 0.25, true};
  const State2 s = random_cloud(9, 16);
  const auto a = time_jets_fast(spec, s, 5);
  const auto b = time_jets_fast(spec, s, 9);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (int n = 0; n <= 5; ++n) {
      EXPECT_EQ(a.x[i][n], b.x[i][n]);
      EXPECT_EQ(a.g[i][n], b.g[i][n]);
    }
}

TEST(Jets, TwoVortexMatchesTrigSeries) {
  const auto jf = time_jets_fast(euler_points(), two_vortex(), 6);
  const auto jo = time_jets_oracle(euler_points(), two_vortex(), 6);
  for (int which = 0; which < 2; ++which)
    for (int n = 0; n <= 6; ++n) {
      const Vec<2> ex = two_vortex_coef(which, n);
      const double tol = 1e-8 * std::max(norm(ex), 0.5 * std::pow(1.0 / kPi, n) / std::tgamma(n + 1.0));
      EXPECT_LE(norm(Vec<2>(jf.x[which][n] - ex)), tol) << which << " " << n;
      EXPECT_LE(norm(Vec<2>(jo.x[which][n] - ex)), tol) << which << " " << n;
    }
}

TEST(Jets, OracleAgreesWithFastOnSQGCloud) {
  for (const double delta : {0.0, 0.3}) {
    const ModelSpec spec{Model::SQG, delta, true};
    const State2 s = random_cloud(11, 16);
    EXPECT_LE(jet_gap(time_jets_oracle(spec, s, 6), time_jets_fast(spec, s, 6)), 1e-9) << delta;
  }
}

TEST(Jets, OracleAgreesWithFastOnEulerCloud) {
  const ModelSpec spec{Model::Euler2D, 0.2, true};
  const State2 s = random_cloud(12, 16);
  EXPECT_LE(jet_gap(time_jets_oracle(spec, s, 6), time_jets_fast(spec, s, 6)), 1e-9);
}

TEST(Jets, OracleAgreesWithFastOnSmallGrid) {
  auto st = build_scenario({.name = "sqg_bump", .n_per_axis = 8});
  const State2 s = std::get<State2>(st.state);
  EXPECT_LE(jet_gap(time_jets_oracle(st.spec, s, 6), time_jets_fast(st.spec, s, 6)), 1e-9);
}

TEST(Jets, RefusesUnsupportedRequests) {
  State2 s = random_cloud(1, 4);
  s.W.assign(4, 0.0);
  EXPECT_THROW(time_jets_fast({Model::Boussinesq2D, 0.1, true}, s, 4), config_error);
  EXPECT_THROW(time_jets_fast({Model::SQG, 0.1, true}, s, 26), config_error);
  EXPECT_THROW(time_jets_oracle({Model::SQG, 0.1, true}, s, 9), config_error);
  EXPECT_THROW(time_jets_oracle({Model::IPM, 0.1, true}, s, 4), config_error);
  EXPECT_THROW(time_jets_oracle({Model::SQG, 0.1, true}, random_cloud(2, 65), 2), config_error);
}

TEST(Jets, CoincidentParticlesFailWithoutRegularization) {
  State2 s = random_cloud(3, 3);
  s.x[1] = s.x[0];
  EXPECT_THROW(time_jets_fast({Model::SQG, 0.0, true}, s, 3), numerical_failure);
  EXPECT_THROW(time_jets_oracle({Model::SQG, 0.0, true}, s, 3), numerical_failure);
  EXPECT_NO_THROW(time_jets_fast({Model::SQG, 0.2, true}, s, 3));
}

// ---------------------------------------------------------------------------

TEST(TaylorStep, TwoVortexOrder12MatchesRk4) {
  const State2 s0 = two_vortex();
  const double h = 0.1 * kPeriod;
  const auto jets = time_jets_fast(euler_points(), s0, 12);
  const State2 ts = taylor_advance(s0, jets, h);
  State2 rk = s0;
  const int steps = 10000;
  for (int k = 0; k < steps; ++k) rk = rk4_step(euler_points(), rk, h / steps);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(norm(Vec<2>(ts.x[i] - rk.x[i])), 1e-8);
  EXPECT_DOUBLE_EQ(ts.t, h);
}

TEST(TaylorStep, Order4AgreesWithRk4ToFifthOrder) {
  const State2 s0 = two_vortex();
  std::vector<double> err;
  for (const double h : {0.4, 0.2, 0.1}) {
    const State2 ts = taylor_advance(s0, time_jets_fast(euler_points(), s0, 4), h);
    const State2 rk = rk4_step(euler_points(), s0, h);
    err.push_back(norm(Vec<2>(ts.x[0] - rk.x[0])));
  }
  EXPECT_GE(std::log2(err[0] / err[1]), 4.8);
  EXPECT_GE(std::log2(err[1] / err[2]), 4.8);
}

TEST(TaylorStep, GradientJetsTrackRk4ForIpm) {
  auto st = build_scenario({.name = "ipm_stratified", .n_per_axis = 12});
  const State2 s0 = std::get<State2>(st.state);
  const double h = 0.05;
  const State2 ts = taylor_advance(s0, time_jets_fast(st.spec, s0, 10), h);
  State2 rk = s0;
  for (int k = 0; k < 50; ++k) rk = rk4_step(st.spec, rk, h / 50);
  for (std::size_t i = 0; i < s0.size(); ++i) {
    EXPECT_LE(norm(Vec<2>(ts.x[i] - rk.x[i])), 1e-10);
    EXPECT_LE(max_abs(Mat<2>(ts.g[i] - rk.g[i])), 1e-9);
  }
}

TEST(TaylorStep, SmallSafetyFactorIsFirstOrderAdvance) {
  const State2 s0 = two_vortex();
  const auto u = velocity(euler_points(), s0);
  const auto [s1, rep] = taylor_step(euler_points(), s0, 8, 1e-6, 1.0);
  EXPECT_DOUBLE_EQ(rep.h, 1e-6);
  for (std::size_t i = 0; i < 2; ++i) {
    const Vec<2> d = s1.x[i] - s0.x[i];
    EXPECT_LE(norm(Vec<2>(d - u[i] * rep.h)), 1e-5 * norm(d));
  }
}

TEST(TaylorStep, SqgStepUsesEstimatedRadius) {
  auto st = build_scenario({.name = "sqg_bump", .n_per_axis = 16});
  const State2 s0 = std::get<State2>(st.state);
  const auto [s1, rep] = taylor_step(st.spec, s0, 8, 0.5);
  EXPECT_TRUE(std::isfinite(rep.radius));
  EXPECT_GT(rep.radius, 0.0);
  EXPECT_DOUBLE_EQ(rep.h, 0.5 * rep.radius);
  State2 rk = s0;
  for (int k = 0; k < 100; ++k) rk = rk4_step(st.spec, rk, rep.h / 100);
  for (std::size_t i = 0; i < s0.size(); ++i) EXPECT_LE(norm(Vec<2>(s1.x[i] - rk.x[i])), 1e-5);
  EXPECT_NEAR(incompressibility_residual(s1), incompressibility_residual(rk), 1e-6);
}

// ---------------------------------------------------------------------------

TEST(Holder, ConstantField) {
  auto st = build_scenario({.gaussian = GaussianField{2.0, 1e9, {0, 0}}, .n_per_axis = 16});
  const State2 s = std::get<State2>(st.state);
  const auto h = holder_stats(s, 0.5);
  EXPECT_NEAR(h.theta_seminorm, 0.0, 1e-12);
  EXPECT_NEAR(h.theta_linf, 2.0, 1e-12);
  EXPECT_NEAR(h.grad_linf, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(h.x_norm, 1.0);
}

TEST(Holder, LinearFieldIsSampledMaximum) {
  ScalarSampler<2> f;
  f.value = [](const Vec<2>& a) { return a[0]; };
  f.gradient = [](const Vec<2>&) { return Vec<2>{1, 0}; };
  const State2 s = init_grid<2>(0.0, 8.0, 8, f);
  const auto h = holder_stats(s, 0.5, 1.5, 100, 3);
  double expect = 0;
  for (const auto& [i, j] : holder_pairs(s, 100, 3)) {
    const double d = norm(Vec<2>(s.a[i] - s.a[j]));
    expect = std::max(expect, std::abs(s.a[i][0] - s.a[j][0]) / std::sqrt(d));
  }
  EXPECT_DOUBLE_EQ(h.theta_seminorm, expect);
  EXPECT_GE(h.theta_seminorm, 1.0);  // unit axis neighbour
  EXPECT_NEAR(h.grad_seminorm, 0.0, 1e-12);
}

TEST(Holder, GaussianMassByQuadrature) {
  const double amp = 0.7, sigma = 0.5;
  auto st = build_scenario({.gaussian = GaussianField{amp, sigma, {0, 0}}, .extent = std::pair{-4.0, 4.0}, .n_per_axis = 128});
  const auto h = holder_stats(std::get<State2>(st.state), 0.5);
  const double exact = 2 * kPi * sigma * sigma * amp;
  EXPECT_NEAR(h.theta_l1 / exact, 1.0, 0.01);
  EXPECT_NEAR(h.grad_l1 / (amp * sigma * std::sqrt(2.0) * std::pow(kPi, 1.5)), 1.0, 0.01);
}

TEST(Holder, RejectsBadParameters) {
  auto st = build_scenario({.name = "sqg_bump", .n_per_axis = 8});
  const State2 s = std::get<State2>(st.state);
  EXPECT_THROW(holder_stats(s, 1.0), config_error);
  EXPECT_THROW(holder_stats(s, 0.5, 1.0), config_error);
  EXPECT_THROW(holder_stats(two_vortex(), 0.5), config_error);
}

TEST(RadiusBound, Examples) {
  HolderStats h;
  h.gamma = 0.5;
  h.lambda = 1.5;
  h.x_norm = 0;
  EXPECT_DOUBLE_EQ(paper_radius_bound([] {
                     HolderStats z;
                     return z;
                   }()).C1,
                   1296.0);
  h.theta_seminorm = 1;
  h.theta_l1 = 1;
  const auto b = paper_radius_bound(h);
  EXPECT_DOUBLE_EQ(b.provenance[1].value, 128.0);
  EXPECT_DOUBLE_EQ(b.C0, 128.0);
  EXPECT_DOUBLE_EQ(b.R, 1.0 / (128.0 * 1296.0));
  std::size_t unenforced = 0;
  for (const auto& t : b.provenance) unenforced += t.enforced ? 0 : 1;
  EXPECT_EQ(unenforced, 2u);
}

TEST(RadiusBound, DegenerateDataUsesDeformationNorm) {
  HolderStats z;
  const auto b = paper_radius_bound(z);
  EXPECT_DOUBLE_EQ(b.C0, 1.0);
  EXPECT_GT(b.R, 0.0);
}

TEST(RadiusBound, RejectsBadParameters) {
  HolderStats h;
  h.gamma = 1.0;
  EXPECT_THROW(paper_radius_bound(h), config_error);
  h.gamma = 0.5;
  h.lambda = 1.6;
  EXPECT_THROW(paper_radius_bound(h), config_error);
}

TEST(RadiusBound, MonotoneInEveryStatistic) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    HolderStats h;
    h.gamma = rng.uniform(0.05, 0.95);
    h.lambda = rng.uniform(1.01, 1.5);
    h.theta_seminorm = rng.uniform(0, 2);
    h.theta_l1 = rng.uniform(0, 2);
    h.grad_cgamma = rng.uniform(0, 2);
    h.grad_l1 = rng.uniform(0, 2);
    h.grad_linf = rng.uniform(0, 2);
    h.x_norm = rng.uniform(0.5, 2);
    const double r0 = paper_radius_bound(h).R;
    for (double HolderStats::*f : {&HolderStats::theta_seminorm, &HolderStats::theta_l1, &HolderStats::grad_cgamma,
                                   &HolderStats::grad_l1, &HolderStats::grad_linf, &HolderStats::x_norm}) {
      HolderStats g = h;
      g.*f += rng.uniform(0, 1);
      EXPECT_LE(paper_radius_bound(g).R, r0);
    }
  }
}
