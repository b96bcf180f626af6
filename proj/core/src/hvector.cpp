#include "kropina/hvector.hpp"

#include <cmath>

#include "kropina/tol.hpp"

namespace kropina {

std::vector<Jet<double>> field_component_jets(const BaseGeometry<double>& base,
                                              const HVectorSpec& spec,
                                              std::span<const double> x,
                                              std::span<const double> y) {
  const int n = base.n;
  std::vector<Jet<double>> xj, yj;
  seed_xy(x, y, xj, yj);
  std::span<const Jet<double>> xs(xj), ys(yj);
  Jet<double> rho = eval_expr(spec.rho_expr, xs, ys);
  const Jet<double>& L = base.L_full;

  // b_i = rho(x) l_i + c_i(x); l_i = dL/dy^i, so the component jet of b_i is
  // assembled from one-higher slots of the jet of L.
  std::vector<Jet<double>> comp(n, Jet<double>(n));
  for (int i = 0; i < n; ++i) {
    Jet<double> ci = eval_expr(spec.c[i], xs, ys);
    Jet<double>& bi = comp[i];
    bi.v = rho.v * L.dy[i] + ci.v;
    for (int j = 0; j < n; ++j) bi.dy[j] = rho.v * L.yy(i, j);
    for (int k = 0; k < n; ++k)
      bi.dx[k] = rho.dx[k] * L.dy[i] + rho.v * L.xy(k, i) + ci.dx[k];
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        bi.xy(k, j) = rho.dx[k] * L.yy(i, j) + rho.v * L.xyy(k, i, j);
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k)
        bi.yy(j, k) = rho.v * L.yyy(i, j, k);
  }
  return comp;
}

HVectorState build_state(const BaseGeometry<double>& base,
                         const ConnectionData<double>& conn,
                         const HVectorSpec& spec, std::span<const double> x,
                         std::span<const double> y) {
  const int n = base.n;
  HVectorState st;
  st.n = n;
  st.b = Vec<double>(n);
  st.bcov = Mat<double>(n);
  st.rho_k = Vec<double>(n);

  if (spec.mode == HVectorSpec::Mode::pointwise) {
    st.b = spec.b;
    st.bcov = spec.bcov;
    st.rho = spec.rho;
    st.rho_k = spec.rho_grad;
  } else {
    std::vector<Jet<double>> xj, yj;
    seed_xy(x, y, xj, yj);
    std::span<const Jet<double>> xs(xj), ys(yj);
    Jet<double> rho = eval_expr(spec.rho_expr, xs, ys);
    st.rho = rho.v;
    for (int k = 0; k < n; ++k) st.rho_k[k] = rho.dx[k];
    std::vector<Jet<double>> comp = field_component_jets(base, spec, x, y);
    for (int i = 0; i < n; ++i) st.b[i] = comp[i].v;
    st.bcov = h_cov_deriv(comp, conn);
  }

  if (std::abs(st.rho) <= tol::rho_floor)
    throw RhoZeroError("h-vector: rho must be non-zero");

  st.beta = 0;
  for (int i = 0; i < n; ++i) st.beta += st.b[i] * y[i];
  if (st.beta <= tol::beta_floor * val(base.L))
    throw BetaDomainError("h-vector: beta at or below the cone guard");
  st.tau = val(base.L) / st.beta;

  st.m = Vec<double>(n);
  st.l_up = Vec<double>(n);
  st.b_up = Vec<double>(n);
  st.m_up = Vec<double>(n);
  for (int i = 0; i < n; ++i) st.m[i] = st.b[i] - val(base.l[i]) / st.tau;
  for (int i = 0; i < n; ++i) {
    double sb = 0, sl = 0;
    for (int j = 0; j < n; ++j) {
      sb += val(base.g_inv(i, j)) * st.b[j];
      sl += val(base.g_inv(i, j)) * val(base.l[j]);
    }
    st.b_up[i] = sb;
    st.l_up[i] = sl;
    st.m_up[i] = sb - sl / st.tau;
  }
  st.b_sq = 0;
  st.m_sq = 0;
  for (int i = 0; i < n; ++i) {
    st.b_sq += st.b[i] * st.b_up[i];
    st.m_sq += st.m[i] * st.m_up[i];
  }

  st.E = SymMat<double>(n);
  st.Fskew = Mat<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j >= i) st.E.at(i, j) = 0.5 * (st.bcov(i, j) + st.bcov(j, i));
      st.Fskew(i, j) = 0.5 * (st.bcov(i, j) - st.bcov(j, i));
    }
  st.beta_j = Vec<double>(n);
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += y[i] * st.bcov(i, j);
    st.beta_j[j] = s;
  }
  st.beta_0 = 0;
  st.rho_0 = 0;
  for (int j = 0; j < n; ++j) {
    st.beta_0 += st.beta_j[j] * y[j];
    st.rho_0 += st.rho_k[j] * y[j];
  }
  return st;
}

BVerticalJets b_jet(const BaseGeometry<double>& base, const HVectorState& st) {
  const int n = base.n;
  const double L = val(base.L);
  const double rL = st.rho / L;
  BVerticalJets out;
  out.d1 = SymMat<double>(n);
  out.d2 = Sym3<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out.d1.at(i, j) = rL * val(base.h(i, j));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k)
        out.d2.at(i, j, k) =
            2.0 * rL * val(base.C(i, j, k)) -
            (rL / L) * (val(base.h(i, j)) * val(base.l[k]) +
                        val(base.h(i, k)) * val(base.l[j]) +
                        val(base.h(j, k)) * val(base.l[i]));
  return out;
}

double hvector_axiom_residual(const BaseGeometry<double>& base,
                              const HVectorState& st) {
  const int n = base.n;
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double lc = 0;
      for (int h = 0; h < n; ++h)
        lc += val(base.C_up(h, i, j)) * st.b[h];
      lc *= val(base.L);
      worst = std::max(worst,
                       std::abs(lc - st.rho * val(base.h(i, j))));
    }
  return worst;
}

RuleCheck lemma32_consistency(const HVectorSpec& spec,
                              const HVectorState& st) {
  RuleCheck rc;
  rc.f_norm = sup_norm(st.Fskew);
  rc.rho_grad_norm = sup_norm(st.rho_k);
  rc.applicable = spec.gradient;
  if (!rc.applicable) {
    rc.message = "no gradient declaration; rule not applicable";
    return rc;
  }
  const double scale = std::max(1.0, sup_norm(st.bcov));
  const bool f_zero = rc.f_norm <= tol::rel_floor * scale + tol::abs_floor;
  const bool rho_const = rc.rho_grad_norm <= tol::abs_floor;
  if (f_zero && !rho_const) {
    rc.pass = false;
    rc.message =
        "declared gradient one-form (symmetric covariant derivative) forces a "
        "constant scale rho, but rho has a non-zero gradient";
  } else if (!f_zero) {
    rc.pass = true;
    rc.message = "covariant derivative is not symmetric; rule not triggered";
  } else {
    rc.pass = true;
    rc.message = "gradient declaration consistent: rho is constant";
  }
  return rc;
}

}  // namespace kropina
