#pragma once

#include <array>
#include <cmath>

#include "kropina/tensor.hpp"

// First-order forward-mode scalar with kMaxDim derivative lanes.  Used to
// nest one extra derivative around jet evaluation (e.g. the y-derivative of
// nonlinear connection coefficients, which exceeds the jet's y-order cap).
namespace kropina {

struct Dual {
  double v = 0;
  std::array<double, kMaxDim> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // constants lift with zero derivative
  static Dual var(double value, int lane) {
    Dual x(value);
    x.d[lane] = 1.0;
    return x;
  }
};

inline double val(const Dual& x) { return x.v; }

inline Dual operator-(const Dual& a) {
  Dual r(-a.v);
  for (int i = 0; i < kMaxDim; ++i) r.d[i] = -a.d[i];
  return r;
}

inline Dual operator+(const Dual& a, const Dual& b) {
  Dual r(a.v + b.v);
  for (int i = 0; i < kMaxDim; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

inline Dual operator-(const Dual& a, const Dual& b) {
  Dual r(a.v - b.v);
  for (int i = 0; i < kMaxDim; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

inline Dual operator*(const Dual& a, const Dual& b) {
  Dual r(a.v * b.v);
  for (int i = 0; i < kMaxDim; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

inline Dual operator/(const Dual& a, const Dual& b) {
  Dual r(a.v / b.v);
  const double inv2 = 1.0 / (b.v * b.v);
  for (int i = 0; i < kMaxDim; ++i)
    r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
  return r;
}

inline Dual& operator+=(Dual& a, const Dual& b) { return a = a + b; }
inline Dual& operator-=(Dual& a, const Dual& b) { return a = a - b; }
inline Dual& operator*=(Dual& a, const Dual& b) { return a = a * b; }

inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.v);
  Dual r(s);
  const double f = 0.5 / s;
  for (int i = 0; i < kMaxDim; ++i) r.d[i] = f * a.d[i];
  return r;
}

inline Dual pow(const Dual& a, double p) {
  const double vp = std::pow(a.v, p);
  Dual r(vp);
  const double f = p * std::pow(a.v, p - 1.0);
  for (int i = 0; i < kMaxDim; ++i) r.d[i] = f * a.d[i];
  return r;
}

}  // namespace kropina
