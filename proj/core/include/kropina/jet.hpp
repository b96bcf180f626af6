#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "kropina/dual.hpp"
#include "kropina/errors.hpp"
#include "kropina/tensor.hpp"

// Truncated Taylor arithmetic carrying exactly the derivative slots the
// geometry needs: up to third order in y, first order in x, and the mixed
// x-y and x-y-y blocks.  All products use the exact Leibniz rule on this
// slot set, so every derivative that fits the cap is exact to roundoff.
// The scalar type T is double for plain evaluation and Dual when one more
// derivative is nested around an entire jet computation.
namespace kropina {

template <class T>
struct Jet {
  int n = 0;
  T v{};
  std::array<T, kMaxDim> dy{};
  std::array<T, kSym2Cap> dyy{};
  std::array<T, kSym3Cap> dyyy{};
  std::array<T, kMaxDim> dx{};
  std::array<T, kMaxDim * kMaxDim> dxdy{};    // [x slot][y slot]
  std::array<T, kMaxDim * kSym2Cap> dxdyy{};  // [x slot][packed y pair]

  Jet() = default;
  explicit Jet(int n_) : n(n_) {}

  T& yy(int i, int j) { return dyy[sym2_index(i, j, n)]; }
  const T& yy(int i, int j) const { return dyy[sym2_index(i, j, n)]; }
  T& yyy(int i, int j, int k) { return dyyy[sym3_index(i, j, k, n)]; }
  const T& yyy(int i, int j, int k) const {
    return dyyy[sym3_index(i, j, k, n)];
  }
  T& xy(int k, int i) { return dxdy[k * n + i]; }
  const T& xy(int k, int i) const { return dxdy[k * n + i]; }
  T& xyy(int k, int i, int j) {
    return dxdyy[k * sym2_count(n) + sym2_index(i, j, n)];
  }
  const T& xyy(int k, int i, int j) const {
    return dxdyy[k * sym2_count(n) + sym2_index(i, j, n)];
  }
};

template <class T>
Jet<T> jconst(const T& c, int n) {
  Jet<T> r(n);
  r.v = c;
  return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a) {
  Jet<T> r(a.n);
  r.v = -a.v;
  for (int i = 0; i < a.n; ++i) {
    r.dy[i] = -a.dy[i];
    r.dx[i] = -a.dx[i];
  }
  for (int p = 0; p < sym2_count(a.n); ++p) r.dyy[p] = -a.dyy[p];
  for (int p = 0; p < sym3_count(a.n); ++p) r.dyyy[p] = -a.dyyy[p];
  for (int p = 0; p < a.n * a.n; ++p) r.dxdy[p] = -a.dxdy[p];
  for (int p = 0; p < a.n * sym2_count(a.n); ++p) r.dxdyy[p] = -a.dxdyy[p];
  return r;
}

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> r(a.n);
  r.v = a.v + b.v;
  for (int i = 0; i < a.n; ++i) {
    r.dy[i] = a.dy[i] + b.dy[i];
    r.dx[i] = a.dx[i] + b.dx[i];
  }
  for (int p = 0; p < sym2_count(a.n); ++p) r.dyy[p] = a.dyy[p] + b.dyy[p];
  for (int p = 0; p < sym3_count(a.n); ++p) r.dyyy[p] = a.dyyy[p] + b.dyyy[p];
  for (int p = 0; p < a.n * a.n; ++p) r.dxdy[p] = a.dxdy[p] + b.dxdy[p];
  for (int p = 0; p < a.n * sym2_count(a.n); ++p)
    r.dxdyy[p] = a.dxdyy[p] + b.dxdyy[p];
  return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  return a + (-b);
}

template <class T>
Jet<T> operator*(const Jet<T>& a, const T& s) {
  Jet<T> r(a.n);
  r.v = a.v * s;
  for (int i = 0; i < a.n; ++i) {
    r.dy[i] = a.dy[i] * s;
    r.dx[i] = a.dx[i] * s;
  }
  for (int p = 0; p < sym2_count(a.n); ++p) r.dyy[p] = a.dyy[p] * s;
  for (int p = 0; p < sym3_count(a.n); ++p) r.dyyy[p] = a.dyyy[p] * s;
  for (int p = 0; p < a.n * a.n; ++p) r.dxdy[p] = a.dxdy[p] * s;
  for (int p = 0; p < a.n * sym2_count(a.n); ++p) r.dxdyy[p] = a.dxdyy[p] * s;
  return r;
}

// Exact Leibniz product over the full slot set.
template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  const int n = a.n;
  Jet<T> r(n);
  r.v = a.v * b.v;
  for (int i = 0; i < n; ++i) {
    r.dy[i] = a.v * b.dy[i] + a.dy[i] * b.v;
    r.dx[i] = a.v * b.dx[i] + a.dx[i] * b.v;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      r.yy(i, j) = a.v * b.yy(i, j) + a.dy[i] * b.dy[j] + a.dy[j] * b.dy[i] +
                   a.yy(i, j) * b.v;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k)
        r.yyy(i, j, k) = a.v * b.yyy(i, j, k) + a.dy[i] * b.yy(j, k) +
                         a.dy[j] * b.yy(i, k) + a.dy[k] * b.yy(i, j) +
                         a.yy(j, k) * b.dy[i] + a.yy(i, k) * b.dy[j] +
                         a.yy(i, j) * b.dy[k] + a.yyy(i, j, k) * b.v;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      r.xy(k, i) = a.v * b.xy(k, i) + a.dx[k] * b.dy[i] + a.dy[i] * b.dx[k] +
                   a.xy(k, i) * b.v;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        r.xyy(k, i, j) = a.v * b.xyy(k, i, j) + a.dx[k] * b.yy(i, j) +
                         a.dy[i] * b.xy(k, j) + a.dy[j] * b.xy(k, i) +
                         a.yy(i, j) * b.dx[k] + a.xy(k, j) * b.dy[i] +
                         a.xy(k, i) * b.dy[j] + a.xyy(k, i, j) * b.v;
  return r;
}

// Composition with a scalar function given by its Taylor coefficients
// c_k = f^(k)(u.v)/k! via Horner's scheme on the nilpotent part of u.
template <class T>
Jet<T> japply(const Jet<T>& u, const T& c0, const T& c1, const T& c2,
              const T& c3) {
  Jet<T> w = u;
  w.v = T(0.0);
  Jet<T> acc = jconst(c3, u.n);
  acc = w * acc;
  acc.v = acc.v + c2;
  acc = w * acc;
  acc.v = acc.v + c1;
  acc = w * acc;
  acc.v = acc.v + c0;
  return acc;
}

template <class T>
Jet<T> jrecip(const Jet<T>& u) {
  const T i1 = T(1.0) / u.v;
  const T i2 = i1 * i1;
  return japply(u, i1, -i2, i2 * i1, -i2 * i2);
}

template <class T>
Jet<T> jsqrt(const Jet<T>& u) {
  using std::sqrt;
  const T s = sqrt(u.v);
  const T is = T(1.0) / s;
  const T is3 = is * is * is;
  return japply(u, s, T(0.5) * is, T(-0.125) * is3,
                T(0.0625) * is3 * is * is);
}

template <class T>
Jet<T> jpow(const Jet<T>& u, double p) {
  using std::pow;
  const T c0 = pow(u.v, p);
  const T c1 = T(p) * pow(u.v, p - 1.0);
  const T c2 = T(p * (p - 1.0) / 2.0) * pow(u.v, p - 2.0);
  const T c3 = T(p * (p - 1.0) * (p - 2.0) / 6.0) * pow(u.v, p - 3.0);
  return japply(u, c0, c1, c2, c3);
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  return a * jrecip(b);
}

// Coordinate seeds: xj[k] varies in the x slot k only, yj[i] in the y slot i.
template <class T>
void seed_xy(std::span<const T> x, std::span<const T> y,
             std::vector<Jet<T>>& xj, std::vector<Jet<T>>& yj) {
  const int n = static_cast<int>(x.size());
  xj.assign(n, Jet<T>(n));
  yj.assign(n, Jet<T>(n));
  for (int k = 0; k < n; ++k) {
    xj[k].v = x[k];
    xj[k].dx[k] = T(1.0);
    yj[k].v = y[k];
    yj[k].dy[k] = T(1.0);
  }
}

}  // namespace kropina
