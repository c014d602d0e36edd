#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lagpath/errors.hpp"
#include "lagpath/kernel_expr.hpp"

namespace lagpath {

enum class Model { Euler2D, SQG, IPM, Boussinesq2D, Euler3D };

inline std::string_view to_string(Model m) {
  switch (m) {
    case Model::Euler2D: return "Euler2D";
    case Model::SQG: return "SQG";
    case Model::IPM: return "IPM";
    case Model::Boussinesq2D: return "Boussinesq2D";
    case Model::Euler3D: return "Euler3D";
  }
  return "?";
}

inline Model parse_model(std::string_view s) {
  for (Model m : {Model::Euler2D, Model::SQG, Model::IPM, Model::Boussinesq2D, Model::Euler3D})
    if (s == to_string(m)) return m;
  throw config_error("unknown model tag: " + std::string(s));
}

inline int model_dim(Model m) { return m == Model::Euler3D ? 3 : 2; }

namespace kernels {

inline MultiIndex mono(std::initializer_list<int> c) { return MultiIndex(c); }

// y_perp / (2 pi |y|^3)
inline KernelExpr sqg_velocity() {
  KernelExpr e(2, {2});
  e.component(0) = {make_term(make_rational(-1, 2), -1, mono({0, 1}), 3)};
  e.component(1) = {make_term(make_rational(1, 2), -1, mono({1, 0}), 3)};
  return e;
}

// y_perp / (2 pi |y|^2)
inline KernelExpr biot_savart_2d() {
  KernelExpr e(2, {2});
  e.component(0) = {make_term(make_rational(-1, 2), -1, mono({0, 1}), 2)};
  e.component(1) = {make_term(make_rational(1, 2), -1, mono({1, 0}), 2)};
  return e;
}

// [[2 y1 y2, y2^2 - y1^2], [y2^2 - y1^2, -2 y1 y2]] / (2 pi |y|^4); entry [i][k] is d_k of component i above.
inline KernelExpr biot_savart_2d_gradient() {
  const BigRational h = make_rational(1, 2);
  KernelExpr e(2, {2, 2});
  e.component(0) = {make_term(1, -1, mono({1, 1}), 4)};
  TermList off = {make_term(h, -1, mono({0, 2}), 4), make_term(-h, -1, mono({2, 0}), 4)};
  e.component(1) = off;
  e.component(2) = off;
  e.component(3) = {make_term(-1, -1, mono({1, 1}), 4)};
  e.canonicalize();
  return e;
}

inline int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

// Matrix V with u = V xi = xi x y / (4 pi |y|^3); V[i][a] = eps_{i a l} y_l / (4 pi |y|^3).
inline KernelExpr biot_savart_3d() {
  KernelExpr e(3, {3, 3});
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) {
      TermList& c = e.component(static_cast<std::size_t>(3 * i + a));
      for (int l = 0; l < 3; ++l) {
        const int s = levi_civita(i, a, l);
        if (s != 0) c.push_back(make_term(make_rational(s, 4), -1, MultiIndex::unit(3, l), 3));
      }
    }
  e.canonicalize();
  return e;
}

// Rank-3 array T with (K(y) v)_{ij} = sum_l T[i][j][l] v_l
//   = 3/(8 pi) ((y x v)_i y_j + (y x v)_j y_i) / |y|^5.
inline KernelExpr strain_3d() {
  KernelExpr e(3, {3, 3, 3});
  const BigRational c = make_rational(3, 8);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        TermList& t = e.component(static_cast<std::size_t>(9 * i + 3 * j + l));
        for (int m = 0; m < 3; ++m) {
          if (const int s = levi_civita(i, m, l); s != 0)
            t.push_back(make_term(c * s, -1, MultiIndex::unit(3, m) + MultiIndex::unit(3, j), 5));
          if (const int s = levi_civita(j, m, l); s != 0)
            t.push_back(make_term(c * s, -1, MultiIndex::unit(3, m) + MultiIndex::unit(3, i), 5));
        }
      }
  e.canonicalize();
  return e;
}

// Components i of the 2D perpendicular gradient (-d_2 f, d_1 f) of a scalar.
inline KernelExpr perp_gradient(const KernelExpr& f) {
  if (f.dim() != 2 || !f.shape().empty()) throw std::invalid_argument("perp_gradient expects a 2D scalar");
  KernelExpr e(2, {2});
  e.component(0) = derive(f, 1).component(0);
  for (auto& t : e.component(0)) t.coeff = -t.coeff;
  e.component(1) = derive(f, 0).component(0);
  return e;
}

}  // namespace kernels

struct KernelCatalogEntry {
  Model model;
  KernelExpr velocity_kernel;
  KernelExpr gradient_kernel;
  int singularity_order;           // homogeneity degree of the velocity kernel
  int gradient_singularity_order;  // homogeneity degree of the gradient kernel
};

// For SQG the gradient uses the velocity kernel itself, contracted with the
// transported scalar gradient.
inline KernelCatalogEntry catalog(Model m) {
  switch (m) {
    case Model::SQG: return {m, kernels::sqg_velocity(), kernels::sqg_velocity(), -2, -2};
    case Model::Euler2D:
    case Model::IPM:
    case Model::Boussinesq2D: return {m, kernels::biot_savart_2d(), kernels::biot_savart_2d_gradient(), -1, -2};
    case Model::Euler3D: return {m, kernels::biot_savart_3d(), kernels::strain_3d(), -2, -3};
  }
  throw config_error("unknown model tag");
}

struct KinDecomposition {
  KernelExpr k1;  // scalar
  KernelExpr k2;  // vector
};

// K_in = perp_gradient(k1) + k2 for the SQG inner kernel.
inline KinDecomposition decompose_kin(Model m) {
  if (m != Model::SQG) throw std::invalid_argument("decompose_kin is defined for the SQG kernel");
  const MultiIndex zero(2);
  KinDecomposition d;
  d.k1 = KernelExpr::scalar(2, {make_term(make_rational(-1, 2), -1, zero, 1, 1)});
  d.k2 = KernelExpr(2, {2});
  d.k2.component(0) = {make_term(1, -1, kernels::mono({0, 1}), 1, 1)};
  d.k2.component(1) = {make_term(-1, -1, kernels::mono({1, 0}), 1, 1)};
  return d;
}

}  // namespace lagpath
