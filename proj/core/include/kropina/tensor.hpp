#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <utility>

#include "kropina/errors.hpp"
#include "kropina/tol.hpp"

// Small dense tensors with runtime dimension n <= kMaxDim and fixed inline
// storage.  Symmetric ranks are stored packed so that symmetry holds by
// construction: writing (i,j) and (j,i) hits the same slot.
namespace kropina {

inline constexpr int kMaxDim = 6;
inline constexpr int kSym2Cap = kMaxDim * (kMaxDim + 1) / 2;               // 21
inline constexpr int kSym3Cap = kMaxDim * (kMaxDim + 1) * (kMaxDim + 2) / 6;  // 56

inline double val(double x) { return x; }

inline int sym2_index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

inline int sym3_index(int i, int j, int k, int n) {
  if (i > j) std::swap(i, j);
  if (j > k) std::swap(j, k);
  if (i > j) std::swap(i, j);
  int idx = 0;
  for (int t = 0; t < i; ++t) idx += (n - t) * (n - t + 1) / 2;
  for (int t = i; t < j; ++t) idx += n - t;
  return idx + (k - j);
}

inline int sym2_count(int n) { return n * (n + 1) / 2; }
inline int sym3_count(int n) { return n * (n + 1) * (n + 2) / 6; }

template <class T>
struct Vec {
  int n = 0;
  std::array<T, kMaxDim> a{};
  Vec() = default;
  explicit Vec(int n_) : n(n_) {}
  T& operator[](int i) { return a[i]; }
  const T& operator[](int i) const { return a[i]; }
};

template <class T>
struct Mat {
  int n = 0;
  std::array<T, kMaxDim * kMaxDim> a{};
  Mat() = default;
  explicit Mat(int n_) : n(n_) {}
  T& operator()(int i, int j) { return a[i * n + j]; }
  const T& operator()(int i, int j) const { return a[i * n + j]; }
};

template <class T>
struct SymMat {
  int n = 0;
  std::array<T, kSym2Cap> a{};
  SymMat() = default;
  explicit SymMat(int n_) : n(n_) {}
  T& at(int i, int j) { return a[sym2_index(i, j, n)]; }
  const T& operator()(int i, int j) const { return a[sym2_index(i, j, n)]; }
  Mat<T> full() const {
    Mat<T> m(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = (*this)(i, j);
    return m;
  }
};

// Totally symmetric rank-3 tensor.
template <class T>
struct Sym3 {
  int n = 0;
  std::array<T, kSym3Cap> a{};
  Sym3() = default;
  explicit Sym3(int n_) : n(n_) {}
  T& at(int i, int j, int k) { return a[sym3_index(i, j, k, n)]; }
  const T& operator()(int i, int j, int k) const {
    return a[sym3_index(i, j, k, n)];
  }
};

// Rank-3 tensor with a free first slot and a symmetric trailing pair,
// e.g. connection coefficients A^i_{jk} = A^i_{kj}.
template <class T>
struct Ten3 {
  int n = 0;
  std::array<T, kMaxDim * kSym2Cap> a{};
  Ten3() = default;
  explicit Ten3(int n_) : n(n_) {}
  T& at(int i, int j, int k) {
    return a[i * sym2_count(n) + sym2_index(j, k, n)];
  }
  const T& operator()(int i, int j, int k) const {
    return a[i * sym2_count(n) + sym2_index(j, k, n)];
  }
};

template <class T>
double sup_norm(const Vec<T>& v) {
  double m = 0;
  for (int i = 0; i < v.n; ++i) m = std::max(m, std::abs(val(v[i])));
  return m;
}

template <class T>
double sup_norm(const Mat<T>& v) {
  double m = 0;
  for (int i = 0; i < v.n; ++i)
    for (int j = 0; j < v.n; ++j) m = std::max(m, std::abs(val(v(i, j))));
  return m;
}

template <class T>
double sup_norm(const SymMat<T>& v) {
  double m = 0;
  for (int i = 0; i < sym2_count(v.n); ++i)
    m = std::max(m, std::abs(val(v.a[i])));
  return m;
}

template <class T>
double sup_norm(const Sym3<T>& v) {
  double m = 0;
  for (int i = 0; i < sym3_count(v.n); ++i)
    m = std::max(m, std::abs(val(v.a[i])));
  return m;
}

template <class T>
double sup_norm(const Ten3<T>& v) {
  double m = 0;
  for (int i = 0; i < v.n; ++i)
    for (int p = 0; p < sym2_count(v.n); ++p)
      m = std::max(m, std::abs(val(v.a[i * sym2_count(v.n) + p])));
  return m;
}

template <class T>
struct InverseResult {
  SymMat<T> inv;
  T det;
};

// Dense symmetric inverse by Gauss-Jordan with partial pivoting.  The guard
// compares |det| against det_floor * scale^n so that uniformly scaling the
// matrix does not change what counts as singular.
template <class T>
InverseResult<T> invert_sym(const SymMat<T>& m) {
  const int n = m.n;
  Mat<T> a = m.full();
  Mat<T> inv(n);
  for (int i = 0; i < n; ++i) inv(i, i) = T(1.0);

  double scale = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(val(a(i, j))));
  if (scale == 0) throw SingularMatrix("invert_sym: zero matrix", 0.0);

  T det = T(1.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(val(a(r, col))) > std::abs(val(a(piv, col)))) piv = r;
    if (piv != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(a(piv, c), a(col, c));
        std::swap(inv(piv, c), inv(col, c));
      }
      det = -det;
    }
    T p = a(col, col);
    det = det * p;
    if (std::abs(val(p)) == 0)
      throw SingularMatrix("invert_sym: exact zero pivot", 0.0);
    for (int c = 0; c < n; ++c) {
      a(col, c) = a(col, c) / p;
      inv(col, c) = inv(col, c) / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      T f = a(r, col);
      for (int c = 0; c < n; ++c) {
        a(r, c) = a(r, c) - f * a(col, c);
        inv(r, c) = inv(r, c) - f * inv(col, c);
      }
    }
  }

  double det_scale = 1;
  for (int i = 0; i < n; ++i) det_scale *= scale;
  if (std::abs(val(det)) < tol::det_floor * det_scale)
    throw SingularMatrix("invert_sym: matrix numerically singular", val(det));

  InverseResult<T> out;
  out.det = det;
  out.inv = SymMat<T>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      out.inv.at(i, j) = (inv(i, j) + inv(j, i)) * T(0.5);
  return out;
}

// Sherman-Morrison style inverse for l_ij = m_ij + n_i n_j given the inverse
// of m.  Returns the inverse of l and its determinant.
inline InverseResult<double> matsumoto_invert(const SymMat<double>& m_inv,
                                              const Vec<double>& n_vec,
                                              double det_m) {
  const int n = m_inv.n;
  Vec<double> up(n);  // n^i = m^{ij} n_j
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += m_inv(i, j) * n_vec[j];
    up[i] = s;
  }
  double denom = 1;
  for (int i = 0; i < n; ++i) denom += n_vec[i] * up[i];
  if (std::abs(denom) <= tol::rank_one_floor)
    throw DomainError("matsumoto_invert: rank-one update is singular");

  InverseResult<double> out;
  out.inv = SymMat<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      out.inv.at(i, j) = m_inv(i, j) - up[i] * up[j] / denom;
  out.det = det_m * denom;
  return out;
}

}  // namespace kropina
