#include "kropina/kropina.hpp"

#include <cmath>

#include "kropina/tol.hpp"

namespace kropina {

void guard_change(const HVectorState& h) {
  const double g1 = 2.0 - h.rho * h.tau;
  if (std::abs(g1) <= tol::degeneracy_floor)
    throw DegenerateChange("2 - rho*tau", g1);
  const double g2 = 2.0 * h.b_sq * h.tau - h.rho;
  if (std::abs(g2) <= tol::degeneracy_floor)
    throw DegenerateChange("2*b^2*tau - rho", g2);
}

StarGeometry star_closed_form(const BaseGeometry<double>& base,
                              const HVectorState& h) {
  guard_change(h);
  const int n = base.n;
  const double L = base.L;
  const double tau = h.tau, rho = h.rho, beta = h.beta;
  const double bsq = h.b_sq, msq = h.m_sq;
  const double P1 = 2.0 * tau - rho * tau * tau;
  const double P2 = tau * tau * (2.0 - rho * tau);
  const double den = 2.0 * bsq * tau - rho;

  StarGeometry s;
  s.n = n;
  s.star_L = L * L / beta;

  s.star_l = Vec<double>(n);
  s.star_Li = Vec<double>(n);
  for (int i = 0; i < n; ++i) {
    s.star_l[i] = tau * (base.l[i] - tau * h.m[i]);
    s.star_Li[i] = 2.0 * tau * base.l[i] - tau * tau * h.b[i];
  }

  s.star_Lij = SymMat<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      s.star_Lij.at(i, j) =
          P1 * base.Lij(i, j) + (2.0 * tau * tau / beta) * h.m[i] * h.m[j];

  s.star_Lijk = Sym3<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k)
        s.star_Lijk.at(i, j, k) =
            P1 * base.Lijk(i, j, k) +
            (2.0 * tau / beta) * (rho * tau - 1.0) *
                (h.m[i] * base.Lij(j, k) + h.m[j] * base.Lij(i, k) +
                 h.m[k] * base.Lij(i, j)) -
            (2.0 * tau * tau / (L * beta)) *
                (h.m[i] * h.m[j] * base.l[k] + h.m[j] * h.m[k] * base.l[i] +
                 h.m[k] * h.m[i] * base.l[j]) -
            (6.0 * tau * tau / (beta * beta)) * h.m[i] * h.m[j] * h.m[k];

  s.star_g = SymMat<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      s.star_g.at(i, j) = P2 * base.g(i, j) +
                          3.0 * std::pow(tau, 4) * h.b[i] * h.b[j] -
                          4.0 * std::pow(tau, 3) *
                              (base.l[i] * h.b[j] + h.b[i] * base.l[j]) +
                          (4.0 * tau * tau + rho * std::pow(tau, 3)) *
                              base.l[i] * base.l[j];

  // Structured inverse: (g^{ij} + d1 b^i b^j + d2 (l^i b^j + b^i l^j)
  //                      + d3 l^i l^j) / P2.
  const double d1 = -2.0 * tau / den;
  const double d2 = (4.0 - rho * tau) / den;
  const double d3 = -(3.0 * rho * bsq * std::pow(tau, 3) -
                      rho * rho * tau * tau - 4.0 * bsq * tau * tau -
                      2.0 * rho * tau + 8.0) /
                    (tau * den);
  s.star_g_inv = SymMat<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      s.star_g_inv.at(i, j) =
          (base.g_inv(i, j) + d1 * h.b_up[i] * h.b_up[j] +
           d2 * (h.l_up[i] * h.b_up[j] + h.b_up[i] * h.l_up[j]) +
           d3 * h.l_up[i] * h.l_up[j]) /
          P2;

  auto dense = invert_sym(s.star_g);
  s.star_g_inv_dense = dense.inv;
  s.star_g_det = dense.det;
  {
    double worst = 0, scale = sup_norm(s.star_g_inv_dense);
    for (int p = 0; p < sym2_count(n); ++p)
      worst = std::max(worst,
                       std::abs(s.star_g_inv.a[p] - s.star_g_inv_dense.a[p]));
    s.g_inv_agreement = scale > 0 ? worst / scale : worst;
  }

  // Cartan tensor of the transformed metric.  The fully contracted m m m
  // coefficient is 6 tau^4 / beta — it must carry the same tau power as the
  // mixed h m terms once normalized, and the oracle route confirms it.
  const double Sc = (tau * tau / (2.0 * beta)) * (4.0 - 3.0 * rho * tau);
  const double Tc = 6.0 * std::pow(tau, 4) / beta;
  s.star_C = Sym3<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k)
        s.star_C.at(i, j, k) =
            P2 * base.C(i, j, k) -
            Sc * (base.h(i, j) * h.m[k] + base.h(j, k) * h.m[i] +
                  base.h(k, i) * h.m[j]) -
            Tc * h.m[i] * h.m[j] * h.m[k];

  // Raised Cartan tensor in its expanded form.  The contraction C_rij b^r is
  // kept explicit: substituting a multiple of h_ij for it is valid only for
  // exact solutions of the one-form's defining contraction identity, which
  // generic bases do not admit.
  const double coefS = Sc / P2;
  const double coefT = Tc / P2;
  s.star_C_raised = Ten3<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double Cb = 0;
      for (int r = 0; r < n; ++r) Cb += base.C(r, i, j) * h.b_up[r];
      const double paren =
          Cb - coefS * (2.0 * h.m[i] * h.m[j] + msq * base.h(i, j)) -
          coefT * msq * h.m[i] * h.m[j];
      for (int a = 0; a < n; ++a) {
        double hup_ai = 0, hup_aj = 0;
        for (int r = 0; r < n; ++r) {
          hup_ai += base.g_inv(a, r) * base.h(r, i);
          hup_aj += base.g_inv(a, r) * base.h(r, j);
        }
        const double vec_a =
            (2.0 * tau * h.b_up[a] - (4.0 - rho * tau) * h.l_up[a]) / den;
        s.star_C_raised.at(a, i, j) =
            base.C_up(a, i, j) -
            coefS * (base.h(i, j) * h.m_up[a] + hup_ai * h.m[j] +
                     hup_aj * h.m[i]) -
            coefT * h.m_up[a] * h.m[i] * h.m[j] - vec_a * paren;
      }
    }
  return s;
}

StarGeometry star_oracle(const BaseGeometry<double>& base,
                         const HVectorState& h) {
  guard_change(h);
  const int n = base.n;

  // Jet of beta = b_r y^r in the y slots, with every derivative of b_i
  // supplied by the vertical differentiation rule.  Each explicit y^r
  // contraction kills one angular factor (h_ir y^r = 0, C_ijr y^r = 0), which
  // collapses the Leibniz sums to: d beta = b, d2 beta = (rho/L) h, and
  // d3 beta equal to the rule's second jet of b.
  Jet<double> bj(n);
  bj.v = h.beta;
  for (int i = 0; i < n; ++i) bj.dy[i] = h.b[i];
  BVerticalJets bv = b_jet(base, h);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) bj.yy(i, j) = bv.d1(i, j);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) bj.yyy(i, j, k) = bv.d2(i, j, k);

  Jet<double> sL = base.L_full * base.L_full * jrecip(bj);
  Jet<double> sL2 = sL * sL;

  StarGeometry s;
  s.n = n;
  s.star_L = sL.v;
  s.star_l = Vec<double>(n);
  s.star_Li = Vec<double>(n);
  for (int i = 0; i < n; ++i) {
    s.star_l[i] = sL.dy[i];
    s.star_Li[i] = sL.dy[i];
  }
  s.star_Lij = SymMat<double>(n);
  s.star_g = SymMat<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      s.star_Lij.at(i, j) = sL.yy(i, j);
      s.star_g.at(i, j) = 0.5 * sL2.yy(i, j);
    }
  s.star_Lijk = Sym3<double>(n);
  s.star_C = Sym3<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        s.star_Lijk.at(i, j, k) = sL.yyy(i, j, k);
        s.star_C.at(i, j, k) = 0.25 * sL2.yyy(i, j, k);
      }
  auto inv = invert_sym(s.star_g);
  s.star_g_inv = inv.inv;
  s.star_g_inv_dense = inv.inv;
  s.star_g_det = inv.det;
  s.g_inv_agreement = 0;
  s.star_C_raised = Ten3<double>(n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double t = 0;
        for (int r = 0; r < n; ++r) t += s.star_g_inv(a, r) * s.star_C(r, i, j);
        s.star_C_raised.at(a, i, j) = t;
      }
  return s;
}

namespace {

double rel_residual(double diff, double scale) {
  return scale > 0 ? diff / scale : diff;
}

template <class A>
FieldResidual field_res(const std::string& name, const A& lhs, const A& rhs,
                        double tol_rel) {
  A d = lhs;
  for (std::size_t p = 0; p < d.a.size(); ++p) d.a[p] = lhs.a[p] - rhs.a[p];
  const double scale = std::max(sup_norm(lhs), sup_norm(rhs));
  const double r = rel_residual(sup_norm(d), scale);
  return {name, r, r <= tol_rel};
}

}  // namespace

std::vector<FieldResidual> compare_star(const StarGeometry& cf,
                                        const StarGeometry& oracle,
                                        double tol_rel) {
  std::vector<FieldResidual> out;
  {
    const double scale = std::max(std::abs(cf.star_L), std::abs(oracle.star_L));
    const double r = rel_residual(std::abs(cf.star_L - oracle.star_L), scale);
    out.push_back({"star_L", r, r <= tol_rel});
  }
  out.push_back(field_res("star_l", cf.star_l, oracle.star_l, tol_rel));
  out.push_back(field_res("star_Li", cf.star_Li, oracle.star_Li, tol_rel));
  out.push_back(field_res("star_Lij", cf.star_Lij, oracle.star_Lij, tol_rel));
  out.push_back(
      field_res("star_Lijk", cf.star_Lijk, oracle.star_Lijk, tol_rel));
  out.push_back(field_res("star_g", cf.star_g, oracle.star_g, tol_rel));
  out.push_back(
      field_res("star_g_inv", cf.star_g_inv, oracle.star_g_inv, tol_rel));
  out.push_back(field_res("star_C", cf.star_C, oracle.star_C, tol_rel));
  out.push_back(field_res("star_C_raised", cf.star_C_raised,
                          oracle.star_C_raised, tol_rel));
  return out;
}

}  // namespace kropina
