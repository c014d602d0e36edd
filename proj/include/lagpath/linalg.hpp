#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace lagpath {

template <std::size_t D>
using Vec = std::array<double, D>;
template <std::size_t D>
using Mat = std::array<std::array<double, D>, D>;

template <std::size_t D>
Vec<D>& operator+=(Vec<D>& a, const Vec<D>& b) {
  for (std::size_t i = 0; i < D; ++i) a[i] += b[i];
  return a;
}
template <std::size_t D>
Vec<D>& operator-=(Vec<D>& a, const Vec<D>& b) {
  for (std::size_t i = 0; i < D; ++i) a[i] -= b[i];
  return a;
}
template <std::size_t D>
Vec<D>& operator*=(Vec<D>& a, double s) {
  for (std::size_t i = 0; i < D; ++i) a[i] *= s;
  return a;
}
template <std::size_t D>
Vec<D> operator+(Vec<D> a, const Vec<D>& b) { return a += b; }
template <std::size_t D>
Vec<D> operator-(Vec<D> a, const Vec<D>& b) { return a -= b; }
template <std::size_t D>
Vec<D> operator*(Vec<D> a, double s) { return a *= s; }
template <std::size_t D>
Vec<D> operator*(double s, Vec<D> a) { return a *= s; }

template <std::size_t D>
double dot(const Vec<D>& a, const Vec<D>& b) {
  double s = 0;
  for (std::size_t i = 0; i < D; ++i) s += a[i] * b[i];
  return s;
}
template <std::size_t D>
double norm(const Vec<D>& a) { return std::sqrt(dot(a, a)); }

inline Vec<2> perp(const Vec<2>& v) { return {-v[1], v[0]}; }
inline Vec<3> cross(const Vec<3>& a, const Vec<3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <std::size_t D>
Mat<D> identity() {
  Mat<D> m{};
  for (std::size_t i = 0; i < D; ++i) m[i][i] = 1.0;
  return m;
}
template <std::size_t D>
Mat<D>& operator+=(Mat<D>& a, const Mat<D>& b) {
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) a[i][j] += b[i][j];
  return a;
}
template <std::size_t D>
Mat<D>& operator-=(Mat<D>& a, const Mat<D>& b) {
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) a[i][j] -= b[i][j];
  return a;
}
template <std::size_t D>
Mat<D>& operator*=(Mat<D>& a, double s) {
  for (auto& row : a)
    for (double& x : row) x *= s;
  return a;
}
template <std::size_t D>
Mat<D> operator+(Mat<D> a, const Mat<D>& b) { return a += b; }
template <std::size_t D>
Mat<D> operator-(Mat<D> a, const Mat<D>& b) { return a -= b; }
template <std::size_t D>
Mat<D> operator*(Mat<D> a, double s) { return a *= s; }
template <std::size_t D>
Mat<D> operator*(double s, Mat<D> a) { return a *= s; }

template <std::size_t D>
Mat<D> matmul(const Mat<D>& a, const Mat<D>& b) {
  Mat<D> c{};
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t k = 0; k < D; ++k)
      for (std::size_t j = 0; j < D; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}
template <std::size_t D>
Vec<D> matvec(const Mat<D>& a, const Vec<D>& v) {
  Vec<D> r{};
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) r[i] += a[i][j] * v[j];
  return r;
}
template <std::size_t D>
Mat<D> transpose(const Mat<D>& a) {
  Mat<D> t{};
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) t[i][j] = a[j][i];
  return t;
}
template <std::size_t D>
Mat<D> outer(const Vec<D>& a, const Vec<D>& b) {
  Mat<D> m{};
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) m[i][j] = a[i] * b[j];
  return m;
}
template <std::size_t D>
double trace(const Mat<D>& a) {
  double s = 0;
  for (std::size_t i = 0; i < D; ++i) s += a[i][i];
  return s;
}

inline double det(const Mat<2>& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }
inline double det(const Mat<3>& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

// Cofactor matrix: cof(A) = det(A) A^{-T}.
inline Mat<2> cofactor(const Mat<2>& a) { return {{{a[1][1], -a[1][0]}, {-a[0][1], a[0][0]}}}; }
inline Mat<3> cofactor(const Mat<3>& a) {
  Mat<3> c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      c[i][j] = a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1];
    }
  return c;
}
template <std::size_t D>
Mat<D> adjugate(const Mat<D>& a) { return transpose(cofactor(a)); }

template <std::size_t D>
bool inverse(const Mat<D>& a, Mat<D>& out) {
  const double d = det(a);
  if (!(std::abs(d) > 0.0) || !std::isfinite(d)) return false;
  out = adjugate(a) * (1.0 / d);
  return true;
}

template <std::size_t D>
double max_abs(const Mat<D>& a) {
  double m = 0;
  for (const auto& row : a)
    for (double x : row) m = std::max(m, std::abs(x));
  return m;
}

// Spectral norm (largest singular value) from the closed forms for 2x2 and 3x3.
inline double op_norm(const Mat<2>& a) {
  const double p = a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1];
  const double d = det(a);
  const double disc = std::max(0.0, p * p - 4.0 * d * d);
  return std::sqrt(0.5 * (p + std::sqrt(disc)));
}

inline double op_norm(const Mat<3>& a) {
  const Mat<3> s = matmul(transpose(a), a);
  // Largest eigenvalue of a symmetric positive semidefinite 3x3 (trigonometric solution).
  const double p1 = s[0][1] * s[0][1] + s[0][2] * s[0][2] + s[1][2] * s[1][2];
  const double q = trace(s) / 3.0;
  if (p1 == 0.0) return std::sqrt(std::max({s[0][0], s[1][1], s[2][2], 0.0}));
  const double p2 = (s[0][0] - q) * (s[0][0] - q) + (s[1][1] - q) * (s[1][1] - q) + (s[2][2] - q) * (s[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat<3> b = s;
  for (int i = 0; i < 3; ++i) b[i][i] -= q;
  b *= 1.0 / p;
  const double r = std::clamp(det(b) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  return std::sqrt(std::max(0.0, q + 2.0 * p * std::cos(phi)));
}

}  // namespace lagpath
