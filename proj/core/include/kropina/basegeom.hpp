#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "kropina/dual.hpp"
#include "kropina/jet.hpp"
#include "kropina/tensor.hpp"

// Fundamental objects of a Finsler metric function L(x, y), all obtained from
// the jet of L (and of the energy E = L^2/2) at a single admissible (x, y).
// Everything is templated on the scalar so a Dual pass can differentiate the
// whole construction once more in y.
namespace kropina {

template <class T>
struct BaseGeometry {
  int n = 0;
  Vec<T> x, y;
  T L{};
  Vec<T> l;         // l_i = dL/dy^i
  SymMat<T> Lij;    // angular Hessian of L
  Sym3<T> Lijk;     // third y-derivatives of L
  SymMat<T> g;      // fundamental tensor
  SymMat<T> g_inv;
  T g_det{};
  SymMat<T> h;      // angular metric L * Lij
  Sym3<T> C;        // Cartan tensor
  Ten3<T> C_up;     // C^i_{jk}
  Jet<T> L_full;    // complete jet of L, kept for later stages
  Jet<T> E_full;    // complete jet of E = L^2/2
};

template <class T>
struct ConnectionData {
  int n = 0;
  Vec<T> G;         // spray coefficients
  Mat<T> N;         // nonlinear connection N^i_j
  Ten3<T> berwald;  // G^i_{jk}; filled for the plain-double entry points
  bool berwald_filled = false;
  Ten3<T> cartan;   // horizontal Cartan coefficients F^i_{jk}
};

template <class T, class Field>
BaseGeometry<T> base_objects(const Field& f, std::span<const T> x,
                             std::span<const T> y) {
  const int n = f.dim();
  std::vector<Jet<T>> xj, yj;
  seed_xy(x, y, xj, yj);
  Jet<T> Lj = f.L_jet(std::span<const Jet<T>>(xj), std::span<const Jet<T>>(yj));
  if (val(Lj.v) <= 0) throw DomainError("base_objects: L <= 0 at this (x, y)");

  BaseGeometry<T> b;
  b.n = n;
  b.x = Vec<T>(n);
  b.y = Vec<T>(n);
  for (int i = 0; i < n; ++i) {
    b.x[i] = x[i];
    b.y[i] = y[i];
  }
  b.L_full = Lj;
  b.E_full = Lj * Lj * T(0.5);

  // Euler check: degree-one homogeneity in y is a standing assumption of the
  // whole construction; expression metrics are only validated here.
  {
    T ly{};
    for (int i = 0; i < n; ++i) ly = ly + Lj.dy[i] * y[i];
    if (std::abs(val(ly) - val(Lj.v)) > 1e-8 * std::abs(val(Lj.v)))
      throw DomainError("base_objects: metric is not 1-homogeneous in y");
  }

  b.L = Lj.v;
  b.l = Vec<T>(n);
  for (int i = 0; i < n; ++i) b.l[i] = Lj.dy[i];

  b.Lij = SymMat<T>(n);
  b.g = SymMat<T>(n);
  b.h = SymMat<T>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      b.Lij.at(i, j) = Lj.yy(i, j);
      b.g.at(i, j) = b.E_full.yy(i, j);
      b.h.at(i, j) = Lj.v * Lj.yy(i, j);
    }

  b.Lijk = Sym3<T>(n);
  b.C = Sym3<T>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        b.Lijk.at(i, j, k) = Lj.yyy(i, j, k);
        b.C.at(i, j, k) = T(0.5) * b.E_full.yyy(i, j, k);
      }

  auto ginv = invert_sym(b.g);
  b.g_inv = ginv.inv;
  b.g_det = ginv.det;

  b.C_up = Ten3<T>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        T s{};
        for (int r = 0; r < n; ++r) s = s + b.g_inv(i, r) * b.C(r, j, k);
        b.C_up.at(i, j, k) = s;
      }
  return b;
}

// Spray, nonlinear connection, and horizontal Cartan coefficients, all from
// the stored jets.  The Berwald block is left empty here; the plain-double
// overloads below fill it with a nested Dual pass.
template <class T>
ConnectionData<T> connection_from(const BaseGeometry<T>& b) {
  const int n = b.n;
  const Jet<T>& E = b.E_full;
  ConnectionData<T> cd;
  cd.n = n;

  // term_l = y^k d2E/dx^k dy^l - dE/dx^l; G^i = g^{il} term_l / 2.
  Vec<T> term(n);
  for (int l = 0; l < n; ++l) {
    T s{};
    for (int k = 0; k < n; ++k) s = s + b.y[k] * E.xy(k, l);
    term[l] = s - E.dx[l];
  }
  cd.G = Vec<T>(n);
  for (int i = 0; i < n; ++i) {
    T s{};
    for (int l = 0; l < n; ++l) s = s + b.g_inv(i, l) * term[l];
    cd.G[i] = T(0.5) * s;
  }

  // N^i_j = dG^i/dy^j, using d(g^{il})/dy^j = -2 C^{ilj} (both raised).
  Mat<T> dterm(n);  // dterm(l, j) = d term_l / dy^j
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j) {
      T s = E.xy(j, l) - E.xy(l, j);
      for (int k = 0; k < n; ++k) s = s + b.y[k] * E.xyy(k, l, j);
      dterm(l, j) = s;
    }
  cd.N = Mat<T>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T s{};
      for (int l = 0; l < n; ++l) {
        T cup{};  // C^{il}_j raised twice
        for (int r = 0; r < n; ++r) {
          T inner{};
          for (int q = 0; q < n; ++q) inner = inner + b.g_inv(l, q) * b.C(r, q, j);
          cup = cup + b.g_inv(i, r) * inner;
        }
        s = s + T(-2.0) * cup * term[l] + b.g_inv(i, l) * dterm(l, j);
      }
      cd.N(i, j) = T(0.5) * s;
    }

  // delta_j g_ab = d g_ab/dx^j - N^r_j d g_ab/dy^r, then the usual
  // Christoffel trick in the horizontal slots.
  std::vector<T> delg(n * n * n);
  auto dg = [&](int j, int a2, int b2) -> T& { return delg[(j * n + a2) * n + b2]; };
  for (int j = 0; j < n; ++j)
    for (int a2 = 0; a2 < n; ++a2)
      for (int b2 = a2; b2 < n; ++b2) {
        T s = E.xyy(j, a2, b2);
        for (int r = 0; r < n; ++r)
          s = s - cd.N(r, j) * T(2.0) * b.C(r, a2, b2);
        dg(j, a2, b2) = s;
        dg(j, b2, a2) = s;
      }
  cd.cartan = Ten3<T>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        T s{};
        for (int a2 = 0; a2 < n; ++a2)
          s = s + b.g_inv(i, a2) *
                      (dg(j, a2, k) + dg(k, a2, j) - dg(a2, j, k));
        cd.cartan.at(i, j, k) = T(0.5) * s;
      }
  return cd;
}

// Berwald coefficients G^i_{jk} = d N^i_j / dy^k by one nested Dual pass:
// the entire connection construction is replayed with y carrying Dual lanes.
template <class Field>
Ten3<double> berwald(const Field& f, std::span<const double> x,
                     std::span<const double> y) {
  const int n = f.dim();
  std::vector<Dual> xd(n), yd(n);
  for (int i = 0; i < n; ++i) {
    xd[i] = Dual(x[i]);
    yd[i] = Dual::var(y[i], i);
  }
  BaseGeometry<Dual> bg =
      base_objects<Dual>(f, std::span<const Dual>(xd), std::span<const Dual>(yd));
  ConnectionData<Dual> cd = connection_from(bg);
  Ten3<double> out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        // dN^i_j/dy^k must equal dN^i_k/dy^j; trust it and store symmetric.
        out.at(i, j, k) = cd.N(i, j).d[k];
      }
  return out;
}

template <class Field>
ConnectionData<double> connection(const Field& f, std::span<const double> x,
                                  std::span<const double> y,
                                  const BaseGeometry<double>& bg,
                                  bool with_berwald = true) {
  ConnectionData<double> cd = connection_from(bg);
  if (with_berwald) {
    cd.berwald = berwald(f, x, y);
    cd.berwald_filled = true;
  }
  return cd;
}

template <class Field>
ConnectionData<double> connection(const Field& f, std::span<const double> x,
                                  std::span<const double> y) {
  BaseGeometry<double> bg = base_objects<double>(f, x, y);
  return connection(f, x, y, bg);
}

// Horizontal covariant derivative of a scalar: delta_j f = d_j f - N^r_j dot_r f.
template <class T>
Vec<T> h_cov_deriv(const Jet<T>& fj, const ConnectionData<T>& cd) {
  const int n = cd.n;
  Vec<T> out(n);
  for (int j = 0; j < n; ++j) {
    T s = fj.dx[j];
    for (int r = 0; r < n; ++r) s = s - cd.N(r, j) * fj.dy[r];
    out[j] = s;
  }
  return out;
}

// Horizontal covariant derivative of a covector whose components are given
// as jets: T_{i|j} = delta_j T_i - T_r F^r_{ij}.
template <class T>
Mat<T> h_cov_deriv(const std::vector<Jet<T>>& comp,
                   const ConnectionData<T>& cd) {
  const int n = cd.n;
  Mat<T> out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T s = comp[i].dx[j];
      for (int r = 0; r < n; ++r)
        s = s - cd.N(r, j) * comp[i].dy[r] - comp[r].v * cd.cartan(r, i, j);
      out(i, j) = s;
    }
  return out;
}

}  // namespace kropina
