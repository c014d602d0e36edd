#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "lagpath/errors.hpp"
#include "lagpath/jets.hpp"
#include "lagpath/kernel_expr.hpp"

namespace lagpath {

// Floating-point form of one or more KernelExprs stacked into one flat
// component list. Radial powers and Gaussian rates are shared across terms
// so each is evaluated once per point.
class CompiledKernel {
 public:
  static constexpr int kMaxOrder = 32;

  CompiledKernel() = default;
  explicit CompiledKernel(const std::vector<const KernelExpr*>& parts) {
    for (const KernelExpr* e : parts) {
      if (dim_ == 0) dim_ = e->dim();
      if (e->dim() != dim_) throw std::invalid_argument("CompiledKernel: mixed dimensions");
      for (const TermList& comp : e->components()) {
        Component c;
        for (const KernelTerm& t : comp) {
          Term ct;
          ct.coeff = t.coeff.get_d() * std::pow(std::numbers::pi, t.pi_power);
          for (int i = 0; i < dim_; ++i) {
            ct.beta[static_cast<std::size_t>(i)] = t.monomial[i];
            max_deg_ = std::max(max_deg_, t.monomial[i]);
          }
          ct.factor = factor_index(t.radial_power, t.gauss_rate.get_d());
          c.terms.push_back(ct);
        }
        comps_.push_back(std::move(c));
      }
    }
    if (max_deg_ > kMaxDeg) throw std::invalid_argument("CompiledKernel: monomial degree too large");
    prepare_jets();
  }
  explicit CompiledKernel(const KernelExpr& e) : CompiledKernel(std::vector<const KernelExpr*>{&e}) {}

  [[nodiscard]] std::size_t size() const { return comps_.size(); }
  [[nodiscard]] int dim() const { return dim_; }

  // out[c] for every component; requires y != 0.
  void evaluate(const double* y, double* out) const {
    double r2 = 0;
    for (int i = 0; i < dim_; ++i) r2 += y[i] * y[i];
    std::array<double, kMaxFactors> fac{};
    const double inv_r = 1.0 / std::sqrt(r2);
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      const Factor& fc = factors_[f];
      double v = int_pow(inv_r, fc.p);
      if (fc.q != 0.0) v *= std::exp(-fc.q * r2);
      fac[f] = v;
    }
    std::array<std::array<double, kMaxDeg + 1>, 3> ypow{};
    for (int i = 0; i < dim_; ++i) {
      ypow[static_cast<std::size_t>(i)][0] = 1.0;
      for (int k = 1; k <= max_deg_; ++k) ypow[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = ypow[static_cast<std::size_t>(i)][static_cast<std::size_t>(k - 1)] * y[i];
    }
    for (std::size_t c = 0; c < comps_.size(); ++c) {
      double s = 0;
      for (const Term& t : comps_[c].terms) {
        double v = t.coeff * fac[static_cast<std::size_t>(t.factor)];
        for (int i = 0; i < dim_; ++i) v *= ypow[static_cast<std::size_t>(i)][static_cast<std::size_t>(t.beta[static_cast<std::size_t>(i)])];
        s += v;
      }
      out[c] = s;
    }
  }

  // Scratch space for jet evaluation; one per thread.
  struct JetWorkspace {
    std::vector<double> u, tmp, factors, mono, yj;
  };

  // Time jets of every component for a displacement jet y (y[i][k], k = 0..n).
  // With top_only, only coefficient n of each component is written (out[c]);
  // otherwise out[c*(n+1)+k] holds all coefficients.
  void evaluate_jet(const double* const* y, int n, double* out, bool top_only, JetWorkspace& ws) const {
    if (n > kMaxOrder) throw std::invalid_argument("CompiledKernel: jet order too large");
    const auto len = static_cast<std::size_t>(n) + 1;
    ws.u.assign(len, 0.0);
    for (int i = 0; i < dim_; ++i) {
      const std::span<const double> yi(y[i], len);
      for (int k = 0; k <= n; ++k) ws.u[static_cast<std::size_t>(k)] += jetops::mul_at(yi, yi, k);
    }
    if (!(ws.u[0] > 0.0)) throw singular_evaluation("kernel jet evaluated at zero displacement");

    // Radial/Gaussian factor jets: |y|^-p exp(-q |y|^2).
    ws.factors.assign(factors_.size() * len, 0.0);
    ws.tmp.assign(2 * len, 0.0);
    std::span<double> pw(ws.tmp.data(), len), ex(ws.tmp.data() + len, len);
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      const Factor& fc = factors_[f];
      std::span<double> dst(ws.factors.data() + f * len, len);
      if (fc.q == 0.0) {
        jetops::pow_real(ws.u, -0.5 * fc.p, dst, n);
      } else {
        jetops::pow_real(ws.u, -0.5 * fc.p, pw, n);
        std::vector<double>& arg = ws.yj;
        arg.assign(len, 0.0);
        for (std::size_t k = 0; k < len; ++k) arg[k] = -fc.q * ws.u[k];
        jetops::exp(arg, ex, n);
        jetops::mul(pw, ex, dst, n);
      }
    }

    // Monomial jets y^beta, cached per distinct beta.
    ws.mono.assign(monos_.size() * len, 0.0);
    for (std::size_t m = 0; m < monos_.size(); ++m) {
      std::span<double> dst(ws.mono.data() + m * len, len);
      dst[0] = 1.0;
      std::vector<double>& scratch = ws.yj;
      scratch.assign(len, 0.0);
      for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < monos_[m][static_cast<std::size_t>(i)]; ++k) {
          jetops::mul(dst, std::span<const double>(y[i], len), scratch, n);
          std::copy(scratch.begin(), scratch.end(), dst.begin());
        }
    }

    for (std::size_t c = 0; c < comps_.size(); ++c) {
      if (top_only) {
        double s = 0;
        for (const Term& t : comps_[c].terms) s += t.coeff * jetops::mul_at(mono_span(ws, t, len), factor_span(ws, t, len), n);
        out[c] = s;
      } else {
        double* dst = out + c * len;
        std::fill(dst, dst + len, 0.0);
        for (const Term& t : comps_[c].terms)
          for (int k = 0; k <= n; ++k) dst[k] += t.coeff * jetops::mul_at(mono_span(ws, t, len), factor_span(ws, t, len), k);
      }
    }
  }

 private:
  static constexpr int kMaxFactors = 16;
  static constexpr int kMaxDeg = 12;

  struct Factor {
    int p;
    double q;
  };
  struct Term {
    double coeff = 0;
    std::array<int, 3> beta{};
    int factor = 0;
    int mono = 0;
  };
  struct Component {
    std::vector<Term> terms;
  };

  void prepare_jets() {
    monos_.clear();
    for (auto& c : comps_)
      for (auto& t : c.terms) {
        auto it = std::find(monos_.begin(), monos_.end(), t.beta);
        if (it == monos_.end()) {
          monos_.push_back(t.beta);
          t.mono = static_cast<int>(monos_.size()) - 1;
        } else {
          t.mono = static_cast<int>(it - monos_.begin());
        }
      }
  }

  static double int_pow(double x, int p) {
    if (p < 0) return 1.0 / int_pow(x, -p);
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
  }

  int factor_index(int p, double q) {
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (factors_[i].p == p && factors_[i].q == q) return static_cast<int>(i);
    if (factors_.size() >= kMaxFactors) throw std::invalid_argument("CompiledKernel: too many distinct radial factors");
    factors_.push_back({p, q});
    return static_cast<int>(factors_.size()) - 1;
  }

  static std::span<const double> mono_span(const JetWorkspace& ws, const Term& t, std::size_t len) {
    return {ws.mono.data() + static_cast<std::size_t>(t.mono) * len, len};
  }
  static std::span<const double> factor_span(const JetWorkspace& ws, const Term& t, std::size_t len) {
    return {ws.factors.data() + static_cast<std::size_t>(t.factor) * len, len};
  }

  int dim_ = 0;
  int max_deg_ = 0;
  std::vector<Factor> factors_;
  std::vector<Component> comps_;
  std::vector<std::array<int, 3>> monos_;
};


// Kernel jets for a vector displacement jet: one scalar jet per flattened component.
template <std::size_t D>
std::vector<ScalarJet> kernel_on_jet(const KernelExpr& e, const VecJet<D>& y) {
  if (e.dim() != D) throw std::invalid_argument("kernel_on_jet: dimension mismatch");
  const CompiledKernel k(e);
  const int n = y.order();
  std::vector<std::vector<double>> comps(D, std::vector<double>(static_cast<std::size_t>(n) + 1));
  std::array<const double*, 3> ptr{};
  for (std::size_t i = 0; i < D; ++i) {
    for (int t = 0; t <= n; ++t) comps[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = y[t][static_cast<std::size_t>(i)];
    ptr[static_cast<std::size_t>(i)] = comps[static_cast<std::size_t>(i)].data();
  }
  std::vector<double> out(k.size() * (static_cast<std::size_t>(n) + 1));
  CompiledKernel::JetWorkspace ws;
  k.evaluate_jet(ptr.data(), n, out.data(), false, ws);
  std::vector<ScalarJet> jets;
  for (std::size_t c = 0; c < k.size(); ++c)
    jets.emplace_back(std::vector<double>(out.begin() + static_cast<std::ptrdiff_t>(c * (n + 1)),
                                          out.begin() + static_cast<std::ptrdiff_t>((c + 1) * (n + 1))));
  return jets;
}

}  // namespace lagpath
