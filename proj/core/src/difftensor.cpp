#include "kropina/difftensor.hpp"

#include <cmath>

#include "kropina/tol.hpp"

namespace kropina {
namespace {

struct PlugBack {
  double mixed = 0;
  double scalar = 0;
};

// Residuals are judged against the magnitude of the summed terms, not only
// the right-hand side: the system is solved in closed form, and what remains
// is cancellation noise proportional to the term sizes.
PlugBack plug_back(const StarGeometry& star, const Vec<double>& A,
                   const Vec<double>& B_i, double B) {
  const int n = star.n;
  PlugBack pb;
  for (int i = 0; i < n; ++i) {
    double lhs = 0, asum = 0;
    for (int r = 0; r < n; ++r) {
      const double t = star.star_Lij(i, r) * A[r];
      lhs += t;
      asum += std::abs(t);
    }
    pb.mixed = std::max(pb.mixed, std::abs(lhs - B_i[i]) /
                                      std::max({asum, std::abs(B_i[i]), 1.0}));
  }
  double lhs = 0, asum = 0;
  for (int r = 0; r < n; ++r) {
    const double t = star.star_l[r] * A[r];
    lhs += t;
    asum += std::abs(t);
  }
  pb.scalar = std::abs(lhs - B) / std::max({asum, std::abs(B), 1.0});
  return pb;
}

}  // namespace

Vec<double> solve_star_system(const BaseGeometry<double>& base,
                              const HVectorState& h, const StarGeometry& star,
                              const Vec<double>& B_i, double B) {
  guard_change(h);
  const int n = base.n;
  const double L = base.L;
  const double tau = h.tau, rho = h.rho, beta = h.beta;
  const double P1 = 2.0 * tau - rho * tau * tau;
  const double S0 = 2.0 * h.b_sq / beta - rho / L;
  if (std::abs(S0) <= tol::degeneracy_floor)
    throw DegenerateChange("2*b^2/beta - rho/L", S0);
  const double S = tau * tau * S0;

  Vec<double> B_up(n);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int r = 0; r < n; ++r) s += base.g_inv(i, r) * B_i[r];
    B_up[i] = s;
  }
  double B_beta = 0;
  for (int i = 0; i < n; ++i) B_beta += B_i[i] * h.b_up[i];

  Vec<double> A(n);
  for (int i = 0; i < n; ++i)
    A[i] = (L / P1) * B_up[i] +
           h.l_up[i] * (B / tau + tau * B_beta / S) -
           (2.0 * tau * tau / (2.0 - rho * tau)) * h.m_up[i] * B_beta / S;
  (void)star;
  return A;
}

Vec<double> d00(const BaseGeometry<double>& base, const HVectorState& h,
                const StarGeometry& star) {
  const int n = base.n;
  const double tau = h.tau, beta = h.beta;
  Vec<double> F_i0(n);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += h.Fskew(i, j) * base.y[j];
    F_i0[i] = s;
  }
  Vec<double> B1(n);
  for (int i = 0; i < n; ++i)
    B1[i] = (2.0 * tau * tau / beta) * h.beta_0 * h.m[i] -
            2.0 * tau * tau * F_i0[i];
  return solve_star_system(base, h, star, B1, -tau * tau * h.beta_0);
}

namespace {

// Right-hand side of the single-contraction stage, including the horizontal
// derivative terms of the one-form that the scalar substitution drops.
Mat<double> stage2_rhs(const BaseGeometry<double>& base, const HVectorState& h,
                       const Vec<double>& D00) {
  const int n = base.n;
  const double L = base.L;
  const double tau = h.tau, rho = h.rho, beta = h.beta;
  const double P1 = 2.0 * tau - rho * tau * tau;

  Vec<double> LD(n), b_i0(n);
  double mD = 0, bD = 0;
  for (int a = 0; a < n; ++a) {
    double s = 0;
    for (int r = 0; r < n; ++r) s += base.Lij(a, r) * D00[r];
    LD[a] = s;
    double t = 0;
    for (int j = 0; j < n; ++j) t += h.bcov(a, j) * base.y[j];
    b_i0[a] = t;
    mD += h.m[a] * D00[a];
    bD += h.b[a] * D00[a];
  }

  Mat<double> Gij(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double LijkD = 0;
      for (int r = 0; r < n; ++r) LijkD += base.Lijk(i, j, r) * D00[r];
      Gij(i, j) =
          (tau * tau / beta) * (h.m[i] * h.beta_j[j] - h.m[j] * h.beta_j[i]) -
          tau * tau * h.Fskew(i, j) - 0.5 * P1 * LijkD -
          0.5 * tau * tau * h.rho_0 * base.Lij(i, j) -
          (tau / beta) *
              ((rho * tau - 1.0) *
                   (h.m[i] * LD[j] + h.m[j] * LD[i] + mD * base.Lij(i, j)) -
               (tau / beta) * (h.m[i] * h.m[j] * bD + h.m[j] * mD * h.b[i] +
                               mD * h.m[i] * h.b[j])) +
          (tau / beta) * h.beta_0 *
              ((rho * tau - 1.0) * base.Lij(i, j) -
               (3.0 * tau / beta) * h.m[i] * h.m[j]) +
          (tau * tau / beta) * (b_i0[i] * h.m[j] + h.m[i] * b_i0[j]) -
          (tau * tau / (L * beta)) * h.beta_0 *
              (base.l[i] * h.m[j] + h.m[i] * base.l[j]);
    }
  return Gij;
}

}  // namespace

Mat<double> d0j(const BaseGeometry<double>& base, const HVectorState& h,
                const StarGeometry& star, const Vec<double>& D00) {
  const int n = base.n;
  Mat<double> Gij = stage2_rhs(base, h, D00);
  Mat<double> D0j(n);
  for (int j = 0; j < n; ++j) {
    double E_j0 = 0, F_j0 = 0;
    for (int r = 0; r < n; ++r) {
      E_j0 += h.E(j, r) * base.y[r];
      F_j0 += h.Fskew(j, r) * base.y[r];
    }
    const double Gj = h.tau * h.tau * (F_j0 - E_j0);
    Vec<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = Gij(i, j);
    Vec<double> sol = solve_star_system(base, h, star, col, Gj);
    for (int i = 0; i < n; ++i) D0j(i, j) = sol[i];
  }
  return D0j;
}

namespace {

struct Stage3Rhs {
  std::vector<double> Hjik;  // [j][i][k]
  SymMat<double> Hik;
};

Stage3Rhs stage3_rhs(const BaseGeometry<double>& base, const HVectorState& h,
                     const Mat<double>& Gij, const Mat<double>& D0j) {
  const int n = base.n;
  const double L = base.L;
  const double tau = h.tau, rho = h.rho, beta = h.beta;

  Mat<double> LD0(n);  // L_{ar} D^r_0k
  Vec<double> mD0(n), bD0(n);
  for (int k = 0; k < n; ++k) {
    double sm = 0, sb = 0;
    for (int r = 0; r < n; ++r) {
      sm += h.m[r] * D0j(r, k);
      sb += h.b[r] * D0j(r, k);
    }
    mD0[k] = sm;
    bD0[k] = sb;
    for (int a = 0; a < n; ++a) {
      double s = 0;
      for (int r = 0; r < n; ++r) s += base.Lij(a, r) * D0j(r, k);
      LD0(a, k) = s;
    }
  }

  // Cyclic block contracted with the column col of D^r_0(col).
  auto cyc = [&](int i, int j, int col) {
    return (rho * tau - 1.0) * (h.m[i] * LD0(j, col) + h.m[j] * LD0(i, col) +
                                mD0[col] * base.Lij(i, j)) -
           (tau / beta) * (h.m[i] * h.m[j] * bD0[col] +
                           h.m[j] * mD0[col] * h.b[i] +
                           mD0[col] * h.m[i] * h.b[j]);
  };

  Stage3Rhs out;
  out.Hjik.assign(n * n * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double t1 = 0, t2 = 0, t3 = 0;
        for (int r = 0; r < n; ++r) {
          t1 += base.Lijk(i, j, r) * D0j(r, k);
          t2 += base.Lijk(j, k, r) * D0j(r, i);
          t3 += base.Lijk(k, i, r) * D0j(r, j);
        }
        out.Hjik[(j * n + i) * n + k] =
            0.5 * (rho * tau * tau - 2.0 * tau) * (t1 + t2 - t3) -
            (tau / beta) * cyc(i, j, k) - (tau / beta) * cyc(j, k, i) +
            (tau / beta) * cyc(k, i, j) -
            0.5 * tau * tau *
                (h.rho_k[k] * base.Lij(i, j) + h.rho_k[i] * base.Lij(j, k) -
                 h.rho_k[j] * base.Lij(k, i)) +
            (tau / beta) *
                (h.beta_j[k] * ((rho * tau - 1.0) * base.Lij(i, j) -
                                (3.0 * tau / beta) * h.m[i] * h.m[j]) +
                 h.beta_j[i] * ((rho * tau - 1.0) * base.Lij(j, k) -
                                (3.0 * tau / beta) * h.m[j] * h.m[k]) -
                 h.beta_j[j] * ((rho * tau - 1.0) * base.Lij(k, i) -
                                (3.0 * tau / beta) * h.m[k] * h.m[i])) +
            (2.0 * tau * tau / beta) *
                (h.m[j] * h.E(i, k) + h.m[i] * h.Fskew(j, k) -
                 h.m[k] * h.Fskew(i, j)) -
            (tau * tau / (L * beta)) *
                (h.beta_j[k] * (base.l[i] * h.m[j] + h.m[i] * base.l[j]) +
                 h.beta_j[i] * (base.l[j] * h.m[k] + h.m[j] * base.l[k]) -
                 h.beta_j[j] * (base.l[k] * h.m[i] + h.m[k] * base.l[i]));
      }

  out.Hik = SymMat<double>(n);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k)
      out.Hik.at(i, k) =
          (tau * tau / beta) * (h.m[i] * h.beta_j[k] + h.m[k] * h.beta_j[i]) -
          tau * tau * h.E(i, k) - 0.5 * (Gij(i, k) + Gij(k, i));
  return out;
}

}  // namespace

Ten3<double> djk(const BaseGeometry<double>& base, const HVectorState& h,
                 const StarGeometry& star, const Vec<double>& D00,
                 const Mat<double>& D0j) {
  const int n = base.n;
  Mat<double> Gij = stage2_rhs(base, h, D00);
  Stage3Rhs rhs = stage3_rhs(base, h, Gij, D0j);
  Ten3<double> out(n);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      Vec<double> B(n);
      for (int j = 0; j < n; ++j) B[j] = rhs.Hjik[(j * n + i) * n + k];
      Vec<double> col = solve_star_system(base, h, star, B, rhs.Hik(i, k));
      for (int a = 0; a < n; ++a) out.at(a, i, k) = col[a];
    }
  return out;
}

DiffTensor difference_tensor(const BaseGeometry<double>& base,
                             const HVectorState& h, const StarGeometry& star) {
  const int n = base.n;
  const double L = base.L;
  const double tau = h.tau, rho = h.rho, beta = h.beta;
  const double P1 = 2.0 * tau - rho * tau * tau;

  DiffTensor D;
  D.n = n;
  D.F_i0 = Vec<double>(n);
  D.E_i0 = Vec<double>(n);
  for (int i = 0; i < n; ++i) {
    double sf = 0, se = 0;
    for (int j = 0; j < n; ++j) {
      sf += h.Fskew(i, j) * base.y[j];
      se += h.E(i, j) * base.y[j];
    }
    D.F_i0[i] = sf;
    D.E_i0[i] = se;
  }
  D.E_00 = 0;
  D.F_beta0 = 0;
  for (int i = 0; i < n; ++i) {
    D.E_00 += D.E_i0[i] * base.y[i];
    D.F_beta0 += D.F_i0[i] * h.b_up[i];
  }

  // Stage 1.
  Vec<double> B1(n);
  for (int i = 0; i < n; ++i)
    B1[i] = (2.0 * tau * tau / beta) * h.beta_0 * h.m[i] -
            2.0 * tau * tau * D.F_i0[i];
  const double B1s = -tau * tau * D.E_00;
  D.D00 = solve_star_system(base, h, star, B1, B1s);
  {
    PlugBack pb = plug_back(star, D.D00, B1, B1s);
    D.stage1_mixed = pb.mixed;
    D.stage1_scalar = pb.scalar;
    D.res_spray_mixed = pb.mixed;
    D.res_spray_scalar = pb.scalar;
  }

  // Stage 2.
  D.Gij = stage2_rhs(base, h, D.D00);
  D.Gj = Vec<double>(n);
  D.D0j = Mat<double>(n);
  for (int j = 0; j < n; ++j) {
    D.Gj[j] = tau * tau * (D.F_i0[j] - D.E_i0[j]);
    Vec<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = D.Gij(i, j);
    Vec<double> sol = solve_star_system(base, h, star, col, D.Gj[j]);
    for (int i = 0; i < n; ++i) D.D0j(i, j) = sol[i];
    PlugBack pb = plug_back(star, sol, col, D.Gj[j]);
    D.stage2_mixed = std::max(D.stage2_mixed, pb.mixed);
    D.stage2_scalar = std::max(D.stage2_scalar, pb.scalar);
  }

  // Stage 3.
  Stage3Rhs rhs3 = stage3_rhs(base, h, D.Gij, D.D0j);
  D.Hjik = rhs3.Hjik;
  D.Hik = rhs3.Hik;
  D.Djk = Ten3<double>(n);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      Vec<double> B(n);
      for (int j = 0; j < n; ++j) B[j] = rhs3.Hjik[(j * n + i) * n + k];
      Vec<double> col = solve_star_system(base, h, star, B, rhs3.Hik(i, k));
      for (int a = 0; a < n; ++a) D.Djk.at(a, i, k) = col[a];
      PlugBack pb = plug_back(star, col, B, rhs3.Hik(i, k));
      D.stage3_mixed = std::max(D.stage3_mixed, pb.mixed);
      D.stage3_scalar = std::max(D.stage3_scalar, pb.scalar);
    }

  // Defining-equation residuals, measured against the magnitude of the
  // terms being cancelled so ill-conditioned (still admissible) instances
  // are judged by the precision actually available.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double lhs = 0, asum = 0;
      for (int r = 0; r < n; ++r) {
        const double t1 = star.star_l[r] * D.Djk(r, i, j);
        const double t2 = star.star_Lij(i, r) * D.D0j(r, j);
        lhs += t1 + t2;
        asum += std::abs(t1) + std::abs(t2);
      }
      const double rhsv =
          (2.0 * tau * tau / beta) * h.m[i] * h.beta_j[j] -
          tau * tau * h.bcov(i, j);
      D.res_defining_grad =
          std::max(D.res_defining_grad,
                   std::abs(lhs - rhsv) /
                       std::max({asum, std::abs(rhsv), 1.0}));
    }

  for (int i = 0; i < n; ++i) {
    double lhs = 0, asum = 0;
    for (int r = 0; r < n; ++r) {
      const double t1 = 2.0 * star.star_l[r] * D.D0j(r, i);
      const double t2 = star.star_Lij(i, r) * D.D00[r];
      lhs += t1 + t2;
      asum += std::abs(t1) + std::abs(t2);
    }
    const double rhsv =
        (2.0 * tau * tau / beta) * h.beta_0 * h.m[i] - 2.0 * tau * tau * D.E_i0[i];
    D.res_sym_contraction =
        std::max(D.res_sym_contraction,
                 std::abs(lhs - rhsv) /
                     std::max({asum, std::abs(rhsv), 1.0}));
  }

  // Hessian-level equation: accumulate each grouped term's magnitude so the
  // residual is measured against the size of the expression itself.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double bD0k = 0, mD0k = 0;
        for (int r = 0; r < n; ++r) {
          bD0k += h.b[r] * D.D0j(r, k);
          mD0k += h.m[r] * D.D0j(r, k);
        }
        double t = 0, asum = 0;
        auto add = [&](double term) {
          t += term;
          asum += std::abs(term);
        };
        double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0;
        for (int r = 0; r < n; ++r) {
          s1 += base.Lijk(i, j, r) * D.D0j(r, k);
          s2 += base.Lij(r, j) * D.Djk(r, i, k);
          s3 += base.Lij(i, r) * D.Djk(r, j, k);
          s4 += h.m[r] * (h.m[j] * D.Djk(r, i, k) + h.m[i] * D.Djk(r, j, k));
          s5 += (base.Lij(j, r) * h.m[i] + base.Lij(i, r) * h.m[j] +
                 base.Lij(i, j) * h.m[r]) *
                D.D0j(r, k);
        }
        add(P1 * (s1 + s2 + s3));
        add((2.0 * tau * tau / beta) * s4);
        add(-(2.0 * tau * tau / (beta * beta)) *
            (h.m[i] * h.m[j] * bD0k + h.m[j] * mD0k * h.b[i] +
             mD0k * h.m[i] * h.b[j]));
        add((2.0 * tau / beta) * h.beta_j[k] * base.Lij(i, j));
        add(-(2.0 * rho * tau * tau / beta) * h.beta_j[k] * base.Lij(i, j));
        add((2.0 * tau * tau / beta) * (rho - 1.0 / tau) * s5);
        add((6.0 * tau * tau / (beta * beta)) * h.beta_j[k] * h.m[i] * h.m[j]);
        add(tau * tau * h.rho_k[k] * base.Lij(i, j));
        add(-(2.0 * tau * tau / beta) *
            (h.bcov(i, k) * h.m[j] + h.m[i] * h.bcov(j, k)));
        add((2.0 * tau * tau / (L * beta)) * h.beta_j[k] *
            (base.l[i] * h.m[j] + h.m[i] * base.l[j]));
        D.res_defining_hess =
            std::max(D.res_defining_hess, std::abs(t) / std::max(asum, 1.0));
      }
  return D;
}

Theorem31Result theorem31_check(const HVectorState& h, const DiffTensor& D,
                                double tol_abs) {
  Theorem31Result r;
  r.bcov_norm = sup_norm(h.bcov);
  r.rho_grad_norm = sup_norm(h.rho_k);
  r.hypothesis_holds = r.bcov_norm <= 1e-10 && r.rho_grad_norm <= 1e-10;
  double dn = sup_norm(D.Djk);
  dn = std::max(dn, sup_norm(D.D0j));
  dn = std::max(dn, sup_norm(D.D00));
  r.d_norm = dn;
  r.forward_pass = !r.hypothesis_holds || dn < tol_abs;
  r.converse_flag = dn < tol_abs && !r.hypothesis_holds;
  return r;
}

StarConnection star_connections(const ConnectionData<double>& conn,
                                const DiffTensor& D) {
  const int n = conn.n;
  StarConnection sc;
  sc.G = Vec<double>(n);
  sc.N = Mat<double>(n);
  for (int i = 0; i < n; ++i) {
    sc.G[i] = conn.G[i] + 0.5 * D.D00[i];
    for (int j = 0; j < n; ++j) sc.N(i, j) = conn.N(i, j) + D.D0j(i, j);
  }
  return sc;
}

}  // namespace kropina
