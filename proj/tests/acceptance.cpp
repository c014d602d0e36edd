// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagpath/combinatorics.hpp"
#include "lagpath/commands.hpp"
#include "lagpath/diagnostics.hpp"
#include "lagpath/dynamics.hpp"
#include "lagpath/holder.hpp"
#include "lagpath/parallel.hpp"
#include "lagpath/random.hpp"
#include "lagpath/scenarios.hpp"
#include "lagpath/taylor.hpp"
#include "lagpath/verify.hpp"

using namespace lagpath;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
const double kPeriod = 2 * kPi * kPi;
int failures = 0;

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("criterion %d [%s]: %s (%s)\n", id, title, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string f(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

State2 two_vortex() { return std::get<State2>(build_scenario({.name = "two_vortex"}).state); }
const ModelSpec kPoints{Model::Euler2D, 0.0, true};

// ---------------------------------------------------------------------------

void criterion1() {
  Stopwatch sw;
  std::vector<std::string> bad;
  for (int n = 1; n <= 15; ++n) {
    if (!magic_identity_1d(n).equal) bad.push_back("1d sum n=" + std::to_string(n));
    const auto m = magic_identity_multi(n, 1);
    if (m.lhs != m.rhs) bad.push_back("d=1 sum n=" + std::to_string(n));
  }
  for (int n = 1; n <= 40; ++n)
    if (!s_n_identity(n).equal) bad.push_back("S_n n=" + std::to_string(n));
  for (int m = 0; m <= 40; ++m) {
    const auto c = convolution_identity(m);
    if (!c.equal) bad.push_back("convolution m=" + std::to_string(m) + " lhs " + c.lhs.get_str() + " rhs " + c.rhs.get_str());
  }
  for (int j = 2; j <= 30; ++j)
    if (!check_factorial_bound(j).equal) bad.push_back("factorial bound j=" + std::to_string(j));
  const double t = sw.seconds();
  std::string detail = "time " + f(t) + " s";
  for (const auto& b : bad) detail += "; mismatch: " + b;
  report(1, "exact identities", bad.empty() && t < 5.0, detail);
}

void criterion2() {
  nlohmann::json archive = nlohmann::json::array();
  BigRational r21 = 0;
  for (int d = 2; d <= 3; ++d)
    for (int n = 1; n <= 10; ++n) {
      const auto m = magic_identity_multi(n, d);
      if (d == 2 && n == 1) r21 = m.ratio;
      archive.push_back({{"d", d}, {"n", n}, {"lhs", m.lhs.get_str()}, {"rhs", m.rhs.get_str()}, {"ratio", m.ratio.get_d()}});
    }
  std::ofstream("acceptance_multidim_ratios.json") << archive.dump(2) << '\n';
  report(2, "informational multidimensional ratios", r21 == BigRational(2) && archive.size() == 20,
         "d=2 n=1 ratio " + r21.get_str() + "; 20 ratios archived in acceptance_multidim_ratios.json");
}

void criterion3() {
  Stopwatch sw;
  const auto r = verify_kernels(32.0, 5, 1000, 0);
  double worst = 0;
  for (const auto& c : r.cases)
    if (c.name.rfind("derivative_bound", 0) == 0)
      for (const auto& o : c.got) worst = std::max(worst, o.at("worst_ratio").get<double>());
  const double t = sw.seconds();
  report(3, "kernel bounds", r.all_pass() && t < 60.0,
         std::to_string(r.cases.size() - r.failed()) + "/" + std::to_string(r.cases.size()) + " cases, worst ratio " + f(worst) +
             ", time " + f(t) + " s");
}

// Exact polynomial oracle for the multivariate composition formula.
using UniPoly = std::vector<BigRational>;
using MultiPoly = std::map<MultiIndex, BigRational>;

UniPoly poly_mul(const UniPoly& a, const UniPoly& b) {
  UniPoly r(a.size() + b.size() - 1, BigRational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

BigRational partial_at(const MultiPoly& h, const MultiIndex& alpha, const std::vector<BigRational>& p) {
  BigRational s = 0;
  for (const auto& [m, c] : h) {
    BigRational v = c;
    bool zero = false;
    for (int i = 0; i < m.dim() && !zero; ++i) {
      if (m[i] < alpha[i]) {
        zero = true;
        break;
      }
      for (int k = 0; k < alpha[i]; ++k) v *= m[i] - k;
      v *= pow(p[static_cast<std::size_t>(i)], static_cast<unsigned>(m[i] - alpha[i]));
    }
    if (!zero) s += v;
  }
  return s;
}

bool fdb_polynomial_check(int& cases) {
  Rng rng(77);
  auto rnd = [&] { return make_rational(static_cast<long>(rng.index(15)) - 7, static_cast<long>(rng.index(5)) + 1); };
  bool ok = true;
  for (int d = 1; d <= 3; ++d)
    for (int trial = 0; trial < 3; ++trial) {
      MultiPoly h;
      for (const MultiIndex& m : MultiIndex::orders_between(d, 0, 4))
        if (rng.index(3) != 0) h[m] = rnd();
      std::vector<UniPoly> g(static_cast<std::size_t>(d));
      for (auto& gi : g)
        for (int k = 0; k <= 4; ++k) gi.push_back(rnd());
      UniPoly comp{0};
      for (const auto& [m, c] : h) {
        UniPoly term{c};
        for (int i = 0; i < d; ++i)
          for (int k = 0; k < m[i]; ++k) term = poly_mul(term, g[static_cast<std::size_t>(i)]);
        if (term.size() > comp.size()) comp.resize(term.size(), BigRational(0));
        for (std::size_t i = 0; i < term.size(); ++i) comp[i] += term[i];
      }
      std::vector<BigRational> g0;
      for (const auto& gi : g) g0.push_back(gi[0]);
      for (int n = 1; n <= 8; ++n) {
        MultiPoly hd;
        for (const MultiIndex& a : MultiIndex::orders_between(d, 1, n)) hd[a] = partial_at(h, a, g0);
        std::vector<std::vector<BigRational>> gd(static_cast<std::size_t>(n) + 1, std::vector<BigRational>(static_cast<std::size_t>(d)));
        for (int l = 0; l <= n; ++l)
          for (int i = 0; i < d; ++i) {
            const auto& gi = g[static_cast<std::size_t>(i)];
            gd[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] =
                l < static_cast<int>(gi.size()) ? gi[static_cast<std::size_t>(l)] * factorial(static_cast<unsigned>(l)) : BigRational(0);
          }
        const BigRational expect = n < static_cast<int>(comp.size()) ? comp[static_cast<std::size_t>(n)] * factorial(static_cast<unsigned>(n)) : BigRational(0);
        ok = ok && faa_di_bruno_multi(hd, gd, n) == expect;
        ++cases;
      }
    }
  return ok;
}

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

void criterion4() {
  Rng rng(2026);
  State2 cloud;
  for (int i = 0; i < 16; ++i) {
    cloud.a.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    cloud.w.push_back(1.0 / 16);
    cloud.theta0.push_back(rng.uniform(-1, 1));
    cloud.grad_theta0.push_back({0, 0});
  }
  reset_to_labels(cloud);
  const ModelSpec sqg{Model::SQG, 0.0, true};
  const double g_sqg = jet_gap(time_jets_oracle(sqg, cloud, 6), time_jets_fast(sqg, cloud, 6));
  const double g_tv = jet_gap(time_jets_oracle(kPoints, two_vortex(), 6), time_jets_fast(kPoints, two_vortex(), 6));
  int cases = 0;
  const bool exact = fdb_polynomial_check(cases);
  report(4, "cross-oracle composition formula", g_sqg <= 1e-9 && g_tv <= 1e-9 && exact,
         "SQG cloud rel diff " + f(g_sqg) + ", two-vortex rel diff " + f(g_tv) + ", polynomial cases exact " +
             (exact ? "yes" : "no") + " (" + std::to_string(cases) + ")");
}

void criterion5() {
  Stopwatch sw;
  // period: phase advance of vortex 1 over the nominal period
  State2 s = two_vortex();
  const int steps = 2000;
  for (int k = 0; k < steps; ++k) s = rk4_step(kPoints, s, kPeriod / steps);
  const double dphi = std::atan2(s.x[1][1], s.x[1][0] - 0.5);
  const double period = 2 * kPi / ((2 * kPi + dphi) / kPeriod);
  const double period_err = std::abs(period - kPeriod) / kPeriod;

  State2 pair = std::get<State2>(build_scenario({.name = "vortex_pair"}).state);
  const double t_pair = 2.0;
  for (int k = 0; k < 200; ++k) pair = rk4_step(kPoints, pair, t_pair / 200);
  const double speed = 0.5 * (pair.x[0][1] + pair.x[1][1]) / t_pair;
  const double drift_x = std::max(std::abs(pair.x[0][0]), std::abs(pair.x[1][0] - 1.0));
  const double speed_err = std::max(std::abs(speed - 1 / (2 * kPi)), drift_x);

  // three unequal vortices: non-trivial conserved quantities
  auto st = build_scenario({.points = PointField{{{0, 0}, {1, 0.2}, {0.3, 0.9}}, {1.0, 0.6, -0.4}}});
  State2 three = std::get<State2>(st.state);
  const auto i0 = invariants_euler2d(three);
  double inv_drift = 0;
  for (int k = 0; k < 20000; ++k) {
    three = rk4_step(kPoints, three, kPeriod / 20000);
    if (k % 100 == 99) {
      const auto i1 = invariants_euler2d(three);
      inv_drift = std::max({inv_drift, std::abs(i1.hamiltonian - i0.hamiltonian), norm(Vec<2>(i1.momentum - i0.momentum)),
                            std::abs(i1.angular_impulse - i0.angular_impulse)});
    }
  }
  State2 tv = two_vortex();
  const auto t0 = invariants_euler2d(tv);
  for (int k = 0; k < 2000; ++k) tv = rk4_step(kPoints, tv, kPeriod / 2000);
  const auto t1 = invariants_euler2d(tv);
  inv_drift = std::max({inv_drift, std::abs(t1.hamiltonian - t0.hamiltonian), norm(Vec<2>(t1.momentum - t0.momentum)),
                        std::abs(t1.angular_impulse - t0.angular_impulse)});

  // convergence order against the exact corotation after one period
  std::vector<double> err;
  for (int n : {40, 80, 160}) {
    State2 c = two_vortex();
    for (int k = 0; k < n; ++k) c = rk4_step(kPoints, c, kPeriod / n);
    err.push_back(norm(Vec<2>(c.x[1] - Vec<2>{1.0, 0.0})));
  }
  const double order = std::log2(err[1] / err[2]);
  const double t = sw.seconds();
  report(5, "closed-form dynamics",
         period_err < 1e-6 && speed_err < 1e-8 && inv_drift < 1e-8 && order >= 3.8 && std::log2(err[0] / err[1]) >= 3.8 && t < 120,
         "period rel err " + f(period_err) + ", pair speed err " + f(speed_err) + ", invariant drift " + f(inv_drift) +
             ", RK4 order " + f(std::log2(err[0] / err[1])) + "/" + f(order) + ", time " + f(t) + " s");
}

void criterion6() {
  const State2 s0 = two_vortex();
  const double h = 0.1 * kPeriod;
  const State2 ts = taylor_advance(s0, time_jets_fast(kPoints, s0, 12), h);
  State2 rk = s0;
  for (int k = 0; k < 10000; ++k) rk = rk4_step(kPoints, rk, h / 10000);
  double gap = 0;
  for (std::size_t i = 0; i < 2; ++i) gap = std::max(gap, norm(Vec<2>(ts.x[i] - rk.x[i])));
  const auto g = ode1d_testbed(
      [](const ScalarJet& x) {
        ScalarJet r(x.order());
        for (int k = 0; k <= x.order(); ++k)
          for (int i = 0; i <= k; ++i) r[k] += x[i] * x[k - i];
        return r;
      },
      1.0, 20);
  double ones = 0;
  for (double c : g.coeffs()) ones = std::max(ones, std::abs(c - 1.0));
  const double radius = estimate_radius(coefficient_norms(g)).aggregate();
  report(6, "Taylor stepper", gap <= 1e-8 && ones <= 1e-12 && std::abs(radius - 1.0) <= 0.05,
         "order-12 step vs RK4 " + f(gap) + ", testbed coefficient err " + f(ones) + ", testbed radius " + f(radius));
}

void criterion7() {
  Stopwatch sw;
  auto setup = build_scenario({.name = "sqg_bump"});
  const State2 init = std::get<State2>(setup.state);
  State2 s = init;
  const ModelSpec& spec = setup.spec;
  LambdaAccumulator lam;
  double det_dev = 0, chord_excess = 0;
  const double dt = 0.1;
  for (int k = 0; k <= 10; ++k) {
    const auto rhs = compute_rhs(spec, s, true);
    double gsup = 0;
    for (const auto& gu : rhs.gradu) gsup = std::max(gsup, op_norm(gu));
    lam.push(s.t, gsup);
    const double lh = lam.value();
    const auto ca = chord_arc(s, 1000, 0);
    // how far the sampled ratios reach toward the tolerance band edges (<= 1 passes)
    chord_excess = std::max({chord_excess, (1.0 / lh) * 0.95 / ca.min_ratio, ca.max_ratio / (lh * 1.05)});
    det_dev = std::max(det_dev, incompressibility_residual(s));
    if (k < 10) {
      s = rk4_step(spec, s, dt);
      s.t = (k + 1) * dt;
    }
  }
  const auto jets = time_jets_fast(spec, s, 12);
  const auto norms = coefficient_norms(jets);
  const auto r = estimate_radius(norms);
  const auto fit = fit_cauchy(max_norms(norms), EnvelopeForm::half_binomial);
  const auto bound = paper_radius_bound(holder_stats(init, 0.5, 1.5, 1000, 0));
  const bool pass = det_dev < 1e-3 && chord_excess <= 1.0 && fit.satisfied && bound.R > 0 && bound.R <= r.aggregate();
  report(7, "SQG structural invariants", pass,
         "det dev " + f(det_dev) + ", chord band use " + f(chord_excess) + ", lambda " + f(lam.value()) + ", envelope " +
             (fit.satisfied ? "satisfied" : "violated") + " (C0 " + f(fit.C0) + ", C1 " + f(fit.C1) + "), R_paper " + f(bound.R) +
             " vs ratio radius " + f(r.aggregate()) + ", time " + f(sw.seconds()) + " s");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion8() {
  const fs::path root = fs::temp_directory_path() / "lagpath_acceptance_determinism";
  fs::remove_all(root);
  const int saved = thread_count();
  std::vector<int> counts{1, 2, max_threads()};
  std::vector<std::string> outputs;
  for (int th : counts) {
    set_thread_count(th);
    std::string blob;
    for (const char* kind : {"rk4", "taylor"}) {
      nlohmann::json cfg = {{"model", "SQG"},
                            {"scenario", "sqg_bump"},
                            {"grid", {{"n_per_axis", 24}}},
                            {"integrator", {{"kind", kind}, {"dt", 0.1}, {"t_end", 0.3}, {"taylor_order", 10}}},
                            {"diagnostics", {{"pair_samples", 200}}},
                            {"output", {{"directory", (root / (std::string(kind) + std::to_string(th))).string()}}},
                            {"seed", 9}};
      const RunConfig c = parse_config(cfg);
      run_simulate(c);
      run_taylor(c);
      for (const char* file : {"state.csv", "diagnostics.csv", "summary.json", "taylor.csv", "taylor_summary.json"})
        blob += slurp(fs::path(c.output_dir) / file);
    }
    outputs.push_back(blob);
  }
  set_thread_count(saved);
  const bool same = outputs[1] == outputs[0] && outputs[2] == outputs[0] && !outputs[0].empty();
  report(8, "determinism", same,
         "threads 1/2/" + std::to_string(counts[2]) + ", " + std::to_string(outputs[0].size()) + " bytes compared");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
