#include "kropina/projective.hpp"

#include <cmath>

#include "kropina/tol.hpp"

namespace kropina {

Vec<double> projective_condition(const HVectorState& h, const DiffTensor& D) {
  Vec<double> R(h.n);
  for (int i = 0; i < h.n; ++i)
    R[i] = D.F_i0[i] - (h.beta_0 / h.beta) * h.m[i];
  return R;
}

double projective_factor(const BaseGeometry<double>& base,
                         const HVectorState& h, const DiffTensor& D) {
  const double S0 = 2.0 * h.b_sq / h.beta - h.rho / base.L;
  if (std::abs(S0) <= tol::degeneracy_floor)
    throw DegenerateChange("2*b^2/beta - rho/L", S0);
  const double K =
      (2.0 * h.beta_0 * h.m_sq / h.beta - 2.0 * D.F_beta0) / S0;
  return (h.tau / (2.0 * base.L)) * (K - D.E_00);
}

HVectorSpec make_projective_instance(const BaseGeometry<double>& base,
                                     const Vec<double>& b, double rho,
                                     const SymMat<double>& E_sym) {
  const int n = base.n;
  double beta = 0;
  for (int i = 0; i < n; ++i) beta += b[i] * base.y[i];
  if (beta <= tol::beta_floor * base.L)
    throw BetaDomainError("projective instance: beta at the cone guard");
  const double tau = base.L / beta;
  Vec<double> m(n);
  for (int i = 0; i < n; ++i) m[i] = b[i] - base.l[i] / tau;
  double E00 = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) E00 += E_sym(i, j) * base.y[i] * base.y[j];

  HVectorSpec spec;
  spec.mode = HVectorSpec::Mode::pointwise;
  spec.n = n;
  spec.b = b;
  spec.rho = rho;
  spec.rho_grad = Vec<double>(n);
  spec.bcov = Mat<double>(n);
  const double f = E00 / (beta * base.L);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      spec.bcov(i, j) =
          E_sym(i, j) + f * (m[i] * base.l[j] - m[j] * base.l[i]);
  return spec;
}

double collinearity_sine(const Vec<double>& v, const Vec<double>& y) {
  const int n = v.n;
  double vv = 0, yy = 0, vy = 0;
  for (int i = 0; i < n; ++i) {
    vv += v[i] * v[i];
    yy += y[i] * y[i];
    vy += v[i] * y[i];
  }
  const double vn = std::sqrt(vv), yn = std::sqrt(yy);
  if (vn <= tol::abs_floor * (1.0 + yn)) return 0.0;
  double cperp2 = vv - (vy / yy) * vy;
  if (cperp2 < 0) cperp2 = 0;
  return std::sqrt(cperp2) / vn;
}

ProjectiveReport theorem41_check(const BaseGeometry<double>& base,
                                 const HVectorState& h, const DiffTensor& D,
                                 double tol, double nonproj_threshold) {
  const int n = base.n;
  ProjectiveReport rep;
  rep.condition_residual = projective_condition(h, D);
  rep.condition_norm = sup_norm(rep.condition_residual);
  rep.P = projective_factor(base, h, D);
  rep.collinearity = collinearity_sine(D.D00, base.y);

  rep.spray_residual = Vec<double>(n);
  double scale = 0;
  for (int i = 0; i < n; ++i) {
    const double two_p_y = 2.0 * rep.P * base.y[i];
    rep.spray_residual[i] = D.D00[i] - two_p_y;
    scale = std::max({scale, std::abs(D.D00[i]), std::abs(two_p_y)});
  }
  rep.spray_residual_norm =
      sup_norm(rep.spray_residual) / std::max(scale, 1.0);

  double gres = 0, gscale = 0;
  for (int i = 0; i < n; ++i) {
    const double predicted = -D.E_00 * h.tau * base.y[i] / base.L;
    gres = std::max(gres, std::abs(D.D00[i] - predicted));
    gscale = std::max({gscale, std::abs(D.D00[i]), std::abs(predicted)});
  }
  rep.gradient_form_residual = gres / std::max(gscale, 1.0);

  if (rep.condition_norm < tol) {
    // The sine is scale-free and blows tiny orthogonal noise out of
    // proportion when |D00| is small; the spray residual already bounds the
    // orthogonal component, so it is the gate and the sine is data.
    rep.branch = ProjectiveReport::Branch::projective;
    rep.pass = rep.spray_residual_norm < tol && rep.gradient_form_residual < tol;
  } else if (rep.condition_norm >= nonproj_threshold) {
    rep.branch = ProjectiveReport::Branch::non_projective;
    rep.pass = rep.collinearity >= nonproj_threshold;
  } else {
    rep.branch = ProjectiveReport::Branch::indeterminate;
    rep.pass = true;
  }
  return rep;
}

namespace {

struct PathState {
  Vec<double> x, y;
};

Vec<double> spray_only(const MetricSpec& metric, const Vec<double>& x,
                       const Vec<double>& y) {
  BaseGeometry<double> bg = base_objects<double>(
      metric, std::span<const double>(x.a.data(), x.n),
      std::span<const double>(y.a.data(), y.n));
  const int n = bg.n;
  Vec<double> G(n);
  for (int l = 0; l < n; ++l) {
    double s = 0;
    for (int k = 0; k < n; ++k) s += y[k] * bg.E_full.xy(k, l);
    G[l] = s - bg.E_full.dx[l];
  }
  Vec<double> out(n);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int l = 0; l < n; ++l) s += bg.g_inv(i, l) * G[l];
    out[i] = 0.5 * s;
  }
  return out;
}

PathState rk4_step(const MetricSpec& metric, const PathState& z, double dt) {
  const int n = z.x.n;
  auto deriv = [&](const PathState& s) {
    PathState d;
    d.x = s.y;
    Vec<double> G = spray_only(metric, s.x, s.y);
    d.y = Vec<double>(n);
    for (int i = 0; i < n; ++i) d.y[i] = -2.0 * G[i];
    return d;
  };
  auto advance = [&](const PathState& s, const PathState& d, double f) {
    PathState r;
    r.x = Vec<double>(n);
    r.y = Vec<double>(n);
    for (int i = 0; i < n; ++i) {
      r.x[i] = s.x[i] + f * d.x[i];
      r.y[i] = s.y[i] + f * d.y[i];
    }
    return r;
  };
  PathState k1 = deriv(z);
  PathState k2 = deriv(advance(z, k1, dt / 2));
  PathState k3 = deriv(advance(z, k2, dt / 2));
  PathState k4 = deriv(advance(z, k3, dt));
  PathState out;
  out.x = Vec<double>(n);
  out.y = Vec<double>(n);
  for (int i = 0; i < n; ++i) {
    out.x[i] = z.x[i] + dt / 6.0 * (k1.x[i] + 2 * k2.x[i] + 2 * k3.x[i] + k4.x[i]);
    out.y[i] = z.y[i] + dt / 6.0 * (k1.y[i] + 2 * k2.y[i] + 2 * k3.y[i] + k4.y[i]);
  }
  return out;
}

// Spray difference of the transformed space at one point (only the doubly
// contracted block of the difference tensor is needed: 2(*G - G) = D00).
Vec<double> d00_at(const MetricSpec& metric, const HVectorSource& source,
                   const PathState& z) {
  std::span<const double> xs(z.x.a.data(), z.x.n);
  std::span<const double> ys(z.y.a.data(), z.y.n);
  BaseGeometry<double> bg = base_objects<double>(metric, xs, ys);
  ConnectionData<double> conn = connection_from(bg);
  HVectorSpec local;
  const HVectorSpec* spec = source.field;
  if (!spec) {
    local = source.generate(bg, conn);
    spec = &local;
  }
  HVectorState h = build_state(bg, conn, *spec, xs, ys);
  StarGeometry star = star_closed_form(bg, h);
  return d00(bg, h, star);
}

}  // namespace

TrajectoryReport geodesic_compare(const MetricSpec& metric,
                                  const HVectorSource& source,
                                  std::span<const double> x0,
                                  std::span<const double> y0, int steps,
                                  double dt) {
  const int n = metric.n;
  PathState z;
  z.x = Vec<double>(n);
  z.y = Vec<double>(n);
  for (int i = 0; i < n; ++i) {
    z.x[i] = x0[i];
    z.y[i] = y0[i];
  }

  TrajectoryReport rep;
  try {
    Vec<double> D00 = d00_at(metric, source, z);
    rep.max_defect = collinearity_sine(D00, z.y);
    rep.max_d00_norm = sup_norm(D00);
  } catch (const DomainError& e) {
    throw DomainExit(std::string("initial point inadmissible: ") + e.what());
  }

  PathState cur = z;
  for (int s = 0; s < steps; ++s) {
    try {
      cur = rk4_step(metric, cur, dt);
      Vec<double> D00 = d00_at(metric, source, cur);
      rep.max_defect = std::max(rep.max_defect, collinearity_sine(D00, cur.y));
      rep.max_d00_norm = std::max(rep.max_d00_norm, sup_norm(D00));
      rep.steps_done = s + 1;
    } catch (const DomainError& e) {
      rep.domain_exit = true;
      rep.exit_reason = e.what();
      break;
    }
  }

  // Convergence check: re-run the pure integration at half the step.
  if (!rep.domain_exit && rep.steps_done == steps) {
    PathState fine = z;
    bool ok = true;
    for (int s = 0; s < 2 * steps && ok; ++s) {
      try {
        fine = rk4_step(metric, fine, dt / 2.0);
      } catch (const DomainError&) {
        ok = false;
      }
    }
    if (ok) {
      double diff = 0;
      for (int i = 0; i < n; ++i) {
        diff = std::max(diff, std::abs(fine.x[i] - cur.x[i]));
        diff = std::max(diff, std::abs(fine.y[i] - cur.y[i]));
      }
      rep.step_halving_diff = diff;
    } else {
      rep.domain_exit = true;
      rep.exit_reason = "half-step verification run left the domain";
    }
  }
  return rep;
}

}  // namespace kropina
