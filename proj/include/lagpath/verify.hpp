#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagpath/combinatorics.hpp"
#include "lagpath/errors.hpp"
#include "lagpath/kernel_bounds.hpp"
#include "lagpath/kernel_catalog.hpp"
#include "lagpath/kernel_expr.hpp"

namespace lagpath {

struct VerificationCase {
  std::string name;
  nlohmann::json inputs;
  nlohmann::json expected;
  nlohmann::json got;
  bool pass = false;
  bool asserted = true;  // informational entries never fail a suite
};

struct VerificationReport {
  std::string suite;
  std::vector<VerificationCase> cases;

  [[nodiscard]] std::size_t failed() const {
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const auto& c) { return c.asserted && !c.pass; }));
  }
  [[nodiscard]] bool all_pass() const { return failed() == 0; }

  // A throwing case is recorded as a failure; later cases still run.
  void run(const std::string& name, nlohmann::json inputs, bool asserted, const std::function<void(VerificationCase&)>& body) {
    VerificationCase c;
    c.name = name;
    c.inputs = std::move(inputs);
    c.asserted = asserted;
    try {
      body(c);
    } catch (const std::exception& e) {
      c.pass = false;
      c.got = std::string("error: ") + e.what();
    }
    cases.push_back(std::move(c));
  }

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["cases"] = nlohmann::json::array();
    std::size_t passed = 0, info = 0;
    for (const auto& c : cases) {
      j["cases"].push_back({{"name", c.name},
                            {"inputs", c.inputs},
                            {"expected", c.expected},
                            {"got", c.got},
                            {"pass", c.pass},
                            {"asserted", c.asserted}});
      if (!c.asserted) ++info;
      else if (c.pass) ++passed;
    }
    j["summary"] = {{"total", cases.size()}, {"passed", passed}, {"failed", failed()}, {"informational", info}};
    return j;
  }
};

inline std::string qstr(const BigRational& q) { return q.get_str(); }

inline constexpr int kIdentityMaxN = 40;
inline constexpr int kMagic1DMaxN = 15;
inline constexpr int kMagicMultiMaxN = 10;
inline constexpr int kFactorialBoundMaxJ = 30;

// max_n bounds every family; the one-dimensional signed partition sums stop at
// 15, the informational d >= 2 sums at 10, the factorial bound at 30.
inline VerificationReport verify_identities(int max_n = kIdentityMaxN, const std::vector<int>& dims = {1, 2, 3}) {
  if (max_n < 1 || max_n > kIdentityMaxN) throw config_error("max_n must be in 1..40");
  if (dims.empty()) throw config_error("dims must not be empty");
  for (int d : dims)
    if (d < 1 || d > 3) throw config_error("dims entries must be 1, 2 or 3");
  const bool has1 = std::find(dims.begin(), dims.end(), 1) != dims.end();
  VerificationReport r;
  r.suite = "identities";

  if (has1) {
    for (int n = 1; n <= std::min(max_n, kMagic1DMaxN); ++n)
      r.run("signed_partition_sum_1d", {{"n", n}}, true, [&](VerificationCase& c) {
        const auto m = magic_identity_1d(n);
        c.expected = qstr(m.rhs);
        c.got = qstr(m.lhs);
        c.pass = m.equal;
      });
  }
  for (int d : dims)
    for (int n = 1; n <= std::min(max_n, d == 1 ? kMagic1DMaxN : kMagicMultiMaxN); ++n)
      r.run("signed_partition_sum_multi", {{"n", n}, {"d", d}}, d == 1, [&](VerificationCase& c) {
        const auto m = magic_identity_multi(n, d);
        c.expected = qstr(m.rhs);
        c.got = {{"lhs", qstr(m.lhs)}, {"ratio", qstr(m.ratio)}, {"ratio_float", m.ratio.get_d()}};
        c.pass = m.lhs == m.rhs;
      });
  if (has1) {
    for (int n = 1; n <= max_n; ++n)
      r.run("triple_series_sum", {{"n", n}}, true, [&](VerificationCase& c) {
        const auto s = s_n_identity(n);
        c.expected = qstr(s.closed_form);
        c.got = {{"sum", qstr(s.triple_sum)}, {"bound_holds", s.bound_holds}};
        c.pass = s.equal && s.bound_holds;
      });
    for (int m = 0; m <= max_n; ++m)
      r.run("series_convolution", {{"m", m}}, true, [&](VerificationCase& c) {
        const auto v = convolution_identity(m);
        c.expected = qstr(v.rhs);
        c.got = qstr(v.lhs);
        c.pass = v.equal;
      });
    for (int j = 2; j <= std::min(max_n, kFactorialBoundMaxJ); ++j)
      r.run("factorial_half_binomial", {{"j", j}}, true, [&](VerificationCase& c) {
        const auto v = check_factorial_bound(j);
        c.expected = qstr(v.rhs);
        c.got = qstr(v.lhs);
        c.pass = v.equal;
      });
  }
  return r;
}

struct KernelBoundCase {
  std::string name;
  KernelExpr kernel;
  int offset;
  BoundForm form;
};

inline std::vector<KernelBoundCase> kernel_bound_cases() {
  const auto sqg = split_gaussian(kernels::sqg_velocity());
  const auto kin = decompose_kin(Model::SQG);
  const auto kk = split_gaussian(kernels::biot_savart_2d_gradient());
  const auto bs = split_gaussian(kernels::biot_savart_2d());
  return {{"sqg_inner", sqg.inner, 2, BoundForm::with_gaussian},
          {"sqg_outer", sqg.outer, 0, BoundForm::without_gaussian},
          {"sqg_inner_scalar_part", kin.k1, 1, BoundForm::with_gaussian},
          {"sqg_inner_vector_part", kin.k2, 0, BoundForm::with_gaussian},
          {"euler_gradient_inner", kk.inner, 2, BoundForm::with_gaussian},
          {"euler_gradient_outer", kk.outer, 0, BoundForm::without_gaussian},
          {"biot_savart_inner", bs.inner, 1, BoundForm::with_gaussian},
          {"biot_savart_outer", bs.outer, 0, BoundForm::without_gaussian}};
}

inline std::vector<std::pair<std::string, KernelExpr>> circle_mean_kernels() {
  std::vector<std::pair<std::string, KernelExpr>> out = {{"sqg_velocity", kernels::sqg_velocity()},
                                                         {"biot_savart_2d", kernels::biot_savart_2d()},
                                                         {"euler_gradient", kernels::biot_savart_2d_gradient()}};
  for (const auto& [name, k] : std::vector(out)) {
    const auto s = split_gaussian(k);
    out.emplace_back(name + "_inner", s.inner);
    out.emplace_back(name + "_outer", s.outer);
  }
  return out;
}

inline VerificationReport verify_kernels(double c_k = 32.0, int max_order = 5, std::size_t samples = 1000, std::uint64_t seed = 0) {
  if (!(c_k > 0) || !std::isfinite(c_k)) throw config_error("ck must be positive");
  if (max_order < 0 || max_order > 6) throw config_error("max_order must be in 0..6");
  if (samples == 0) throw config_error("samples must be positive");
  VerificationReport r;
  r.suite = "kernels";
  const auto pts = log_uniform_samples(samples, 2, 1e-3, 10.0, seed);
  for (const auto& kc : kernel_bound_cases())
    r.run("derivative_bound_" + kc.name,
          {{"c_k", c_k}, {"max_order", max_order}, {"samples", samples}, {"seed", seed}, {"power_offset", kc.offset},
           {"gaussian", kc.form == BoundForm::with_gaussian}},
          true, [&](VerificationCase& c) {
            const auto rep = verify_derivative_bound(kc.kernel, c_k, kc.offset, max_order, pts, kc.form);
            c.expected = "worst ratio <= 1 at every order";
            nlohmann::json orders = nlohmann::json::array();
            for (std::size_t o = 0; o < rep.worst_ratio.size(); ++o)
              orders.push_back({{"order", o}, {"worst_ratio", rep.worst_ratio[o]}, {"alpha", rep.worst_alpha[o].str()},
                                {"point", rep.worst_point[o]}});
            c.got = orders;
            c.pass = rep.pass;
          });
  for (const auto& [name, k] : circle_mean_kernels())
    for (double radius : {0.5, 1.0, 2.0})
      r.run("circle_mean_" + name, {{"radius", radius}, {"quad_points", 64}}, true, [&](VerificationCase& c) {
        const auto m = circle_mean(k, radius, 64);
        double worst = 0;
        for (double v : m) worst = std::max(worst, std::abs(v));
        c.expected = "max |mean| < 1e-12";
        c.got = worst;
        c.pass = worst < 1e-12;
      });
  return r;
}

}  // namespace lagpath
