#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lagpath/config.hpp"
#include "lagpath/diagnostics.hpp"
#include "lagpath/dynamics.hpp"
#include "lagpath/errors.hpp"
#include "lagpath/holder.hpp"
#include "lagpath/io.hpp"
#include "lagpath/scenarios.hpp"
#include "lagpath/taylor.hpp"

namespace lagpath {

enum ExitCode : int { kExitOk = 0, kExitVerification = 1, kExitConfig = 2, kExitNumerical = 3 };

namespace detail {

inline std::filesystem::path prepare_output(const RunConfig& c) {
  std::filesystem::path dir(c.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw config_error("cannot create output directory " + c.output_dir + ": " + ec.message());
  return dir;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw config_error("cannot open output file " + p.string());
  out << j.dump(2) << '\n';
}

inline bool taylor_capable(Model m) { return fast_jets_supported(m); }

struct InvariantTrack {
  bool active = false;
  PointVortexInvariants first{};
  double dh = 0, dp1 = 0, dp2 = 0, di = 0;
  void observe(const PointVortexInvariants& v) {
    if (!active) {
      active = true;
      first = v;
      return;
    }
    dh = std::max(dh, std::abs(v.hamiltonian - first.hamiltonian));
    dp1 = std::max(dp1, std::abs(v.momentum[0] - first.momentum[0]));
    dp2 = std::max(dp2, std::abs(v.momentum[1] - first.momentum[1]));
    di = std::max(di, std::abs(v.angular_impulse - first.angular_impulse));
  }
};

struct RunStats {
  std::size_t steps = 0;
  double chord_min = std::numeric_limits<double>::infinity();
  double chord_max = 0;
  double lambda = 1;
  double grad_u_max = 0;
  double det_dev = 0;
  double min_radius = std::numeric_limits<double>::infinity();
  double max_truncation = 0;
  InvariantTrack inv;
};

template <std::size_t D>
double velocity_gradient_sup(const ModelSpec& spec, const ParticleState<D>& s) {
  const auto rhs = compute_rhs(spec, s, true);
  double m = 0;
  for (const auto& g : rhs.gradu) m = std::max(m, op_norm(g));
  return m;
}

// Advances s to t_end with the configured integrator, optionally writing the
// state and diagnostics series.
template <std::size_t D>
RunStats advance(const RunConfig& c, const ModelSpec& spec, ParticleState<D>& s, CsvFile* state_csv, CsvFile* diag_csv) {
  RunStats st;
  LambdaAccumulator lam;
  auto record = [&](bool write) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.grad_u_sup = velocity_gradient_sup(spec, s);
    lam.push(s.t, r.grad_u_sup);
    r.lambda_bound = lam.value();
    r.det_dev = incompressibility_residual(s);
    if constexpr (D == 2) {
      if (spec.model == Model::Euler2D) {
        const auto v = invariants_euler2d(s);
        st.inv.observe(v);
        r.hamiltonian = v.hamiltonian;
        r.p1 = v.momentum[0];
        r.p2 = v.momentum[1];
        r.ang_imp = v.angular_impulse;
      }
    }
    st.lambda = r.lambda_bound;
    st.grad_u_max = std::max(st.grad_u_max, r.grad_u_sup);
    st.det_dev = std::max(st.det_dev, r.det_dev);
    if (!write) return;
    const ChordArc ca = s.size() >= 2 ? chord_arc(s, c.pair_samples, c.seed) : ChordArc{};
    r.chord_min = ca.min_ratio;
    r.chord_max = ca.max_ratio;
    st.chord_min = std::min(st.chord_min, r.chord_min);
    st.chord_max = std::max(st.chord_max, r.chord_max);
    if (diag_csv) write_diagnostics_row(*diag_csv, r);
    if (state_csv) write_state_rows(*state_csv, s);
  };

  record(true);
  const double t_end = c.t_end;
  const double eps = 1e-12 * std::max(1.0, t_end);
  while (s.t < t_end - eps) {
    const double remaining = t_end - s.t;
    if (c.integrator == IntegratorKind::rk4) {
      const double h = std::min(c.dt, remaining);
      const double t_next = remaining <= c.dt + eps ? t_end : s.t + h;
      s = rk4_step(spec, s, h);
      s.t = t_next;
    } else {
      if constexpr (D == 2) {
        const auto jets = time_jets_fast(spec, s, c.taylor_order);
        const auto r = estimate_radius(jets);
        st.min_radius = std::min(st.min_radius, r.aggregate());
        double h = step_size(r, c.safety, c.dt);
        const bool last = h >= remaining - eps;
        if (last) h = remaining;
        for (const auto& xj : jets.x) st.max_truncation = std::max(st.max_truncation, norm(xj[c.taylor_order]) * std::pow(h, c.taylor_order));
        s = taylor_advance(s, jets, h);
        if (last) s.t = t_end;
      } else {
        throw config_error("Taylor integration is available for Euler2D, SQG and IPM only");
      }
    }
    ++st.steps;
    const bool last = s.t >= t_end - eps;
    record(last || st.steps % static_cast<std::size_t>(c.output_every) == 0);
  }
  return st;
}

inline nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline Setup setup_for(const RunConfig& c) {
  Setup st = build_scenario(c.scenario);
  if (st.spec.model != c.model) throw config_error("scenario does not support the requested model");
  return st;
}

inline void check_integrator(const RunConfig& c) {
  if (c.integrator == IntegratorKind::taylor && !taylor_capable(c.model))
    throw config_error("Taylor integration is available for Euler2D, SQG and IPM only");
}

}  // namespace detail

struct CommandResult {
  nlohmann::json summary;
  std::vector<std::string> files;
};

inline CommandResult run_simulate(const RunConfig& c) {
  detail::check_integrator(c);
  Setup setup = detail::setup_for(c);
  const auto dir = detail::prepare_output(c);
  CommandResult res;
  nlohmann::json j;
  j["command"] = "simulate";
  j["model"] = std::string(to_string(c.model));
  j["scenario"] = c.scenario_label;
  j["integrator"] = c.integrator == IntegratorKind::rk4 ? "rk4" : "taylor";
  j["delta"] = setup.spec.delta;
  std::visit(
      [&](auto& s) {
        constexpr std::size_t D = std::tuple_size_v<std::decay_t<decltype(s.x[0])>>;
        CsvFile state_csv((dir / "state.csv").string(), state_header<D>());
        CsvFile diag_csv((dir / "diagnostics.csv").string(), kDiagnosticsHeader);
        const auto st = detail::advance<D>(c, setup.spec, s, &state_csv, &diag_csv);
        state_csv.close();
        diag_csv.close();
        j["particles"] = s.size();
        j["steps"] = st.steps;
        j["final_t"] = s.t;
        j["chord_min"] = detail::num(st.chord_min);
        j["chord_max"] = detail::num(st.chord_max);
        j["lambda"] = detail::num(st.lambda);
        j["grad_u_sup_max"] = detail::num(st.grad_u_max);
        j["det_dev"] = detail::num(st.det_dev);
        if (st.inv.active)
          j["invariant_drifts"] = {{"hamiltonian", st.inv.dh}, {"p1", st.inv.dp1}, {"p2", st.inv.dp2}, {"ang_imp", st.inv.di}};
        else
          j["invariant_drifts"] = nullptr;
        if (c.integrator == IntegratorKind::taylor) {
          j["min_radius_estimate"] = detail::num(st.min_radius);
          j["max_truncation"] = detail::num(st.max_truncation);
        }
      },
      setup.state);
  res.files = {"state.csv", "diagnostics.csv", "summary.json"};
  j["files"] = res.files;
  detail::write_json(dir / "summary.json", j);
  res.summary = j;
  return res;
}

// Holder statistics of a grid state carrying theta0, or nullopt.
inline std::optional<HolderStats> maybe_holder(const RunConfig& c, const Setup& setup) {
  const auto* s = std::get_if<State2>(&setup.state);
  if (!s || s->grid_n < 2 || s->theta0.size() != s->size()) return std::nullopt;
  return holder_stats(*s, c.gamma, c.lambda, c.pair_samples, c.seed);
}

inline nlohmann::json holder_json(const HolderStats& h) {
  return {{"gamma", h.gamma},           {"lambda", h.lambda},         {"theta_seminorm", h.theta_seminorm},
          {"theta_l1", h.theta_l1},     {"theta_linf", h.theta_linf}, {"grad_seminorm", h.grad_seminorm},
          {"grad_cgamma", h.grad_cgamma}, {"grad_l1", h.grad_l1},     {"grad_linf", h.grad_linf},
          {"x_norm", h.x_norm}};
}

inline nlohmann::json bound_json(const RadiusBound& b) {
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& t : b.provenance)
    cons.push_back({{"name", t.name}, {"value", detail::num(t.value)}, {"enforced", t.enforced}});
  return cons;
}

inline CommandResult run_taylor(const RunConfig& c) {
  if (!detail::taylor_capable(c.model)) throw config_error("taylor command supports Euler2D, SQG and IPM only");
  Setup setup = detail::setup_for(c);
  const auto holder = maybe_holder(c, setup);
  const auto dir = detail::prepare_output(c);
  State2 s = std::get<State2>(setup.state);
  detail::advance<2>(c, setup.spec, s, nullptr, nullptr);
  const auto jets = time_jets_fast(setup.spec, s, c.taylor_order);
  const auto norms = coefficient_norms(jets);
  const auto r = estimate_radius(norms);
  const auto envelope = max_norms(norms);
  const auto hb = fit_cauchy(envelope, EnvelopeForm::half_binomial);
  const auto geo = fit_cauchy(envelope, EnvelopeForm::geometric);

  CsvFile csv((dir / "taylor.csv").string(), kTaylorHeader);
  write_taylor_rows(csv, norms);
  csv.close();

  nlohmann::json j;
  j["command"] = "taylor";
  j["model"] = std::string(to_string(c.model));
  j["scenario"] = c.scenario_label;
  j["particles"] = s.size();
  j["expansion_t"] = s.t;
  j["order"] = c.taylor_order;
  j["aggregate_radius"] = detail::num(r.aggregate());
  j["aggregate_root_radius"] = detail::num(r.aggregate_root);
  j["radius_infinite"] = r.infinite;
  j["no_finite_radius"] = r.no_finite_radius;
  j["envelope_form"] = "half_binomial";
  j["fitted_C"] = hb.C;
  j["fitted_R"] = hb.R;
  j["fitted_C0"] = hb.C0;
  j["fitted_C1"] = hb.C1;
  j["envelope_satisfied"] = hb.satisfied;
  j["geometric_fit"] = {{"C", geo.C}, {"R", geo.R}, {"satisfied", geo.satisfied}};
  if (holder) {
    const auto b = paper_radius_bound(*holder, c.c_k);
    j["R_paper"] = b.R;
    j["C0_paper"] = b.C0;
    j["C1_paper"] = b.C1;
    j["enforced_constraints"] = bound_json(b);
    j["holder"] = holder_json(*holder);
  } else {
    j["R_paper"] = nullptr;
    j["enforced_constraints"] = nlohmann::json::array();
  }
  CommandResult res;
  res.files = {"taylor.csv", "taylor_summary.json"};
  j["files"] = res.files;
  detail::write_json(dir / "taylor_summary.json", j);
  res.summary = j;
  return res;
}

inline CommandResult run_radius_bound(const RunConfig& c) {
  Setup setup = detail::setup_for(c);
  const auto holder = maybe_holder(c, setup);
  if (!holder) throw config_error("radius-bound needs a two-dimensional grid scenario with theta0");
  const auto b = paper_radius_bound(*holder, c.c_k);
  const auto dir = detail::prepare_output(c);
  nlohmann::json j;
  j["command"] = "radius-bound";
  j["model"] = std::string(to_string(c.model));
  j["scenario"] = c.scenario_label;
  j["c_k"] = c.c_k;
  j["C0"] = b.C0;
  j["C1"] = b.C1;
  j["R_paper"] = b.R;
  j["enforced_constraints"] = bound_json(b);
  j["holder"] = holder_json(*holder);
  CommandResult res;
  res.files = {"radius_bound.json"};
  detail::write_json(dir / "radius_bound.json", j);
  res.summary = j;
  return res;
}

}  // namespace lagpath
