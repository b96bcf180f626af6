#pragma once

// Numeric guard rails used across the library.  Residual checks combine an
// absolute and a relative floor; domain guards reject configurations where a
// denominator is about to vanish (conformal factors, cone boundary, metric
// determinants).  Values here are deliberate choices, not tunables: tests pin
// behaviour against them.
namespace kropina::tol {

inline constexpr double abs_floor = 1e-12;   // residuals below this always pass
inline constexpr double rel_floor = 1e-9;    // default relative tolerance

// Degeneracy guards for the transformed metric.  All three denominators
// (2 - rho*tau), (2 b^2 tau - rho), (2 b^2/beta - rho/L) must stay away
// from zero for the change to be well defined.
inline constexpr double degeneracy_floor = 1e-10;

// One-form value must stay positive and bounded away from the cone edge,
// measured relative to the metric function.
inline constexpr double beta_floor = 1e-8;

// rho = 0 collapses the transformed metric; reject outright.
inline constexpr double rho_floor = 1e-10;

// Rank-one update denominator 1 + n_k n^k in the shortcut inverse.
inline constexpr double rank_one_floor = 1e-12;

// |det| threshold for dense symmetric inversion, relative to scale^n.
inline constexpr double det_floor = 1e-12;

// Central finite differences used only inside test oracles.
inline constexpr double fd_step_abs = 1e-5;
inline constexpr double fd_step_rel = 1e-6;

// A collinearity defect above this counts as "visibly non-projective".
inline constexpr double nonprojective_floor = 1e-3;

inline bool residual_ok(double residual, double scale,
                        double rel = rel_floor, double abs = abs_floor) {
  return residual <= abs || residual <= rel * scale;
}

}  // namespace kropina::tol
