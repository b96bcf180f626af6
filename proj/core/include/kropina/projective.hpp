#pragma once

#include <functional>
#include <string>

#include "kropina/difftensor.hpp"
#include "kropina/metric.hpp"

// Projective equivalence of the base and transformed sprays: the change is
// projective exactly when the spray difference is collinear with y, which
// reduces to a pointwise condition on the one-form data.  This module houses
// the condition, the projective factor, a generator of instances satisfying
// the condition by construction, the bidirectional check, and a geodesic-level
// confirmation along integrated base geodesics.
namespace kropina {

struct DomainExit : DomainError {
  using DomainError::DomainError;
};

// R_i = F_{i0} - (beta_0/beta) m_i.  Vanishes iff the change is projective.
Vec<double> projective_condition(const HVectorState& h,
                                 const DiffTensor& D);

// P = (tau/2L) { (2 beta_0 m^2/beta - 2 F_beta0) (2 b^2/beta - rho/L)^{-1}
//                - E_00 },  so that D^i_00 = 2 P y^i on projective instances.
double projective_factor(const BaseGeometry<double>& base,
                         const HVectorState& h, const DiffTensor& D);

// Pointwise spec whose antisymmetric part is built from the chosen symmetric
// part:  F_ij = (E_00/(beta L)) (m_i l_j - m_j l_i), which gives
// F_{i0} = (beta_0/beta) m_i exactly.  rho is held constant (zero gradient).
HVectorSpec make_projective_instance(const BaseGeometry<double>& base,
                                     const Vec<double>& b, double rho,
                                     const SymMat<double>& E_sym);

// Sine of the angle between v and y; 0 when v is negligibly small.
double collinearity_sine(const Vec<double>& v, const Vec<double>& y);

struct ProjectiveReport {
  Vec<double> condition_residual;  // R_i
  double condition_norm = 0;
  double P = 0;
  Vec<double> spray_residual;  // D^i_00 - 2 P y^i
  double spray_residual_norm = 0;  // relative to |D00|, |2Py|
  double collinearity = 0;         // sine of angle between D^i_00 and y
  double gradient_form_residual = 0;  // |D00 + E_00 tau y/L| relative
  enum class Branch { projective, non_projective, indeterminate } branch =
      Branch::indeterminate;
  bool pass = false;
};

// Bidirectional check: a condition residual below tol must give a collinear
// spray difference matching both closed forms of D00; a residual above the
// non-projectivity threshold must give a visible collinearity defect.  The
// band in between is reported indeterminate (and passes).
ProjectiveReport theorem41_check(const BaseGeometry<double>& base,
                                 const HVectorState& h, const DiffTensor& D,
                                 double tol, double nonproj_threshold);

struct TrajectoryReport {
  int steps_done = 0;
  double max_defect = 0;  // max over visited points of collinearity(D00, y)
  double max_d00_norm = 0;
  double step_halving_diff = 0;  // final-state disagreement between dt, dt/2
  bool domain_exit = false;
  std::string exit_reason;
};

// One-form source evaluated along the trajectory: either a field-mode spec
// (used as is) or a constructor invoked pointwise.
using PointSpecFn = std::function<HVectorSpec(
    const BaseGeometry<double>&, const ConnectionData<double>&)>;

struct HVectorSource {
  const HVectorSpec* field = nullptr;  // field-mode spec, or
  PointSpecFn generate;                // pointwise generator
};

// Integrates the base geodesic (dx = y, dy = -2G) with the classical
// fourth-order scheme and fixed step dt, evaluating the transformed-spray
// difference at every step.  A second run at dt/2 provides the convergence
// check.  Leaving the admissible domain ends the trajectory early and is
// recorded, except when even the initial point is inadmissible (DomainExit).
TrajectoryReport geodesic_compare(const MetricSpec& metric,
                                  const HVectorSource& source,
                                  std::span<const double> x0,
                                  std::span<const double> y0, int steps,
                                  double dt);

}  // namespace kropina
