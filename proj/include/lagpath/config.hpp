#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "lagpath/errors.hpp"
#include "lagpath/kernel_catalog.hpp"
#include "lagpath/scenarios.hpp"

namespace lagpath {

enum class IntegratorKind { rk4, taylor };

struct RunConfig {
  Model model = Model::Euler2D;
  ScenarioRequest scenario;
  std::string scenario_label;
  double t_end = 1.0;
  double dt = 0.1;
  IntegratorKind integrator = IntegratorKind::rk4;
  int taylor_order = 12;
  double safety = 0.5;
  std::size_t pair_samples = 1000;
  int output_every = 1;
  std::string output_dir = "output";
  std::uint64_t seed = 0;
  // Holder statistics and explicit radius bound
  double gamma = 0.5;
  double lambda = 1.5;
  double c_k = 32.0;
};

namespace detail {

using nlohmann::json;

inline void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw config_error(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw config_error("unknown key '" + k + "' in " + where);
}

inline double get_number(const json& j, const char* key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw config_error(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw config_error(where + "." + key + " must be finite");
  return x;
}

inline long long get_int(const json& j, const char* key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw config_error(where + "." + key + " must be an integer");
  return v.get<long long>();
}

inline Vec<2> get_vec2(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw config_error(where + " must be a pair of numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

inline void parse_scenario(const json& j, RunConfig& c) {
  if (j.is_string()) {
    c.scenario.name = j.get<std::string>();
    bool known = false;
    for (const auto& n : scenario_names()) known = known || n == c.scenario.name;
    if (!known) throw config_error("unknown scenario '" + c.scenario.name + "'");
    c.scenario_label = c.scenario.name;
    return;
  }
  only_keys(j, {"gaussian", "points"}, "scenario");
  if (j.contains("gaussian") == j.contains("points")) throw config_error("inline scenario needs exactly one of gaussian, points");
  if (j.contains("gaussian")) {
    const auto& g = j.at("gaussian");
    only_keys(g, {"amplitude", "sigma", "center"}, "scenario.gaussian");
    GaussianField f;
    if (g.contains("amplitude")) f.amplitude = get_number(g, "amplitude", "scenario.gaussian");
    if (g.contains("sigma")) f.sigma = get_number(g, "sigma", "scenario.gaussian");
    if (g.contains("center")) f.center = get_vec2(g.at("center"), "scenario.gaussian.center");
    if (!(f.sigma > 0)) throw config_error("scenario.gaussian.sigma must be positive");
    c.scenario.gaussian = f;
    c.scenario_label = "gaussian";
  } else {
    const auto& p = j.at("points");
    only_keys(p, {"positions", "strengths"}, "scenario.points");
    if (!p.contains("positions") || !p.contains("strengths")) throw config_error("scenario.points needs positions and strengths");
    PointField f;
    if (!p.at("positions").is_array() || !p.at("strengths").is_array()) throw config_error("scenario.points entries must be arrays");
    for (const auto& v : p.at("positions")) f.positions.push_back(get_vec2(v, "scenario.points.positions[]"));
    for (const auto& v : p.at("strengths")) {
      if (!v.is_number()) throw config_error("scenario.points.strengths must be numbers");
      f.strengths.push_back(v.get<double>());
    }
    if (f.positions.empty() || f.positions.size() != f.strengths.size())
      throw config_error("scenario.points needs matching, non-empty positions and strengths");
    c.scenario.points = f;
    c.scenario_label = "points";
  }
}

}  // namespace detail

// Strict schema: every key is known, types and ranges are checked before any
// compute happens.
inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::get_int;
  using detail::get_number;
  using detail::only_keys;
  only_keys(j, {"model", "scenario", "grid", "regularization_delta", "integrator", "diagnostics", "output", "seed", "analysis"},
            "config");
  RunConfig c;
  if (!j.contains("model")) throw config_error("missing required key 'model'");
  if (!j.contains("scenario")) throw config_error("missing required key 'scenario'");
  if (!j.at("model").is_string()) throw config_error("model must be a string");
  try {
    c.model = parse_model(j.at("model").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  detail::parse_scenario(j.at("scenario"), c);
  c.scenario.model = c.model;

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    only_keys(g, {"extent", "n_per_axis"}, "grid");
    if (g.contains("extent")) {
      const Vec<2> e = detail::get_vec2(g.at("extent"), "grid.extent");
      if (!(e[0] < e[1])) throw config_error("grid.extent must satisfy lo < hi");
      c.scenario.extent = std::pair{e[0], e[1]};
    }
    if (g.contains("n_per_axis")) {
      const auto n = get_int(g, "n_per_axis", "grid");
      if (n < 2 || n > 4096) throw config_error("grid.n_per_axis must be in 2..4096");
      c.scenario.n_per_axis = static_cast<int>(n);
    }
  }
  if (j.contains("regularization_delta")) {
    const double d = get_number(j, "regularization_delta", "config");
    if (d < 0) throw config_error("regularization_delta must be nonnegative");
    c.scenario.delta = d;
  }
  if (j.contains("integrator")) {
    const auto& it = j.at("integrator");
    only_keys(it, {"kind", "dt", "t_end", "taylor_order", "safety"}, "integrator");
    if (it.contains("kind")) {
      if (!it.at("kind").is_string()) throw config_error("integrator.kind must be a string");
      const auto k = it.at("kind").get<std::string>();
      if (k == "rk4") c.integrator = IntegratorKind::rk4;
      else if (k == "taylor") c.integrator = IntegratorKind::taylor;
      else throw config_error("integrator.kind must be rk4 or taylor");
    }
    if (it.contains("dt")) c.dt = get_number(it, "dt", "integrator");
    if (it.contains("t_end")) c.t_end = get_number(it, "t_end", "integrator");
    if (it.contains("taylor_order")) c.taylor_order = static_cast<int>(get_int(it, "taylor_order", "integrator"));
    if (it.contains("safety")) c.safety = get_number(it, "safety", "integrator");
  }
  if (!(c.dt > 0)) throw config_error("integrator.dt must be positive");
  if (c.t_end < 0) throw config_error("integrator.t_end must be nonnegative");
  if (c.taylor_order < 4 || c.taylor_order > 25) throw config_error("integrator.taylor_order must be in 4..25");
  if (!(c.safety > 0 && c.safety < 1)) throw config_error("integrator.safety must lie in (0,1)");

  if (j.contains("diagnostics")) {
    const auto& d = j.at("diagnostics");
    only_keys(d, {"pair_samples", "output_every"}, "diagnostics");
    if (d.contains("pair_samples")) {
      const auto p = get_int(d, "pair_samples", "diagnostics");
      if (p < 0) throw config_error("diagnostics.pair_samples must be nonnegative");
      c.pair_samples = static_cast<std::size_t>(p);
    }
    if (d.contains("output_every")) {
      const auto o = get_int(d, "output_every", "diagnostics");
      if (o < 1) throw config_error("diagnostics.output_every must be >= 1");
      c.output_every = static_cast<int>(o);
    }
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    only_keys(o, {"directory"}, "output");
    if (o.contains("directory")) {
      if (!o.at("directory").is_string() || o.at("directory").get<std::string>().empty())
        throw config_error("output.directory must be a non-empty string");
      c.output_dir = o.at("directory").get<std::string>();
    }
  }
  if (j.contains("seed")) {
    const auto s = get_int(j, "seed", "config");
    if (s < 0) throw config_error("seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("analysis")) {
    const auto& a = j.at("analysis");
    only_keys(a, {"gamma", "lambda", "c_k"}, "analysis");
    if (a.contains("gamma")) c.gamma = get_number(a, "gamma", "analysis");
    if (a.contains("lambda")) c.lambda = get_number(a, "lambda", "analysis");
    if (a.contains("c_k")) c.c_k = get_number(a, "c_k", "analysis");
  }
  if (!(c.gamma > 0 && c.gamma < 1)) throw config_error("analysis.gamma must lie in (0,1)");
  if (!(c.lambda > 1 && c.lambda <= 1.5)) throw config_error("analysis.lambda must lie in (1, 3/2]");
  if (!(c.c_k > 0)) throw config_error("analysis.c_k must be positive");
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace lagpath
