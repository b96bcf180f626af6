#pragma once

#include <string>
#include <vector>

#include "kropina/basegeom.hpp"
#include "kropina/hvector.hpp"
#include "kropina/metric.hpp"

// The transformed metric function *L = L^2 / beta and every object derived
// from it.  Two independent routes:
//   star_closed_form — the closed-form expressions in the derived scalars
//                      (tau, rho, b^2, m_i, ...);
//   star_oracle      — direct truncated-Taylor differentiation of L^2/beta,
//                      where every y-derivative of b_i comes from the
//                      vertical differentiation rule.
// The two routes share no formula beyond *L itself; their agreement is the
// core verification of the transformation algebra.
namespace kropina {

struct DegenerateChange : DomainError {
  DegenerateChange(const std::string& which, double value)
      : DomainError("degenerate change: " + which + " = " +
                    std::to_string(value)),
        scalar_name(which),
        scalar_value(value) {}
  std::string scalar_name;
  double scalar_value;
};

struct StarGeometry {
  int n = 0;
  double star_L = 0;
  Vec<double> star_l;        // tau (l - tau m)
  Vec<double> star_Li;       // 2 tau l - tau^2 b (same covector, second route)
  SymMat<double> star_Lij;
  Sym3<double> star_Lijk;
  SymMat<double> star_g;
  SymMat<double> star_g_inv;        // structured closed-form inverse
  SymMat<double> star_g_inv_dense;  // dense inversion of star_g
  double star_g_det = 0;
  double g_inv_agreement = 0;  // sup |formula - dense|
  Sym3<double> star_C;
  Ten3<double> star_C_raised;
};

// Throws DegenerateChange when (2 - rho tau) or (2 b^2 tau - rho) is within
// the guard band; both scalars divide the closed forms below.
void guard_change(const HVectorState& h);

StarGeometry star_closed_form(const BaseGeometry<double>& base,
                              const HVectorState& h);

StarGeometry star_oracle(const BaseGeometry<double>& base,
                         const HVectorState& h);

struct FieldResidual {
  std::string field;
  double residual = 0;  // relative, against the larger field magnitude
  bool pass = false;
};

std::vector<FieldResidual> compare_star(const StarGeometry& cf,
                                        const StarGeometry& oracle,
                                        double tol_rel);

// The transformed metric as a metric function in its own right (field mode
// only): feeding it to base_objects / connection / berwald gives the direct
// route to the transformed connections.
template <class BaseField>
struct StarField {
  const BaseField* base = nullptr;
  const HVectorSpec* hspec = nullptr;

  int dim() const { return base->dim(); }

  template <class T>
  Jet<T> L_jet(std::span<const Jet<T>> xj, std::span<const Jet<T>> yj) const {
    const int n = dim();
    Jet<T> Lj = base->L_jet(xj, yj);
    Jet<T> beta = eval_expr(hspec->rho_expr, xj, yj) * Lj;
    for (int i = 0; i < n; ++i)
      beta = beta + eval_expr(hspec->c[i], xj, yj) * yj[i];
    if (val(beta.v) <= 0)
      throw BetaDomainError("star field: beta <= 0 at this (x, y)");
    return Lj * Lj * jrecip(beta);
  }
};

template <class BaseField>
StarField<BaseField> make_star_field(const BaseField& base,
                                     const HVectorSpec& spec) {
  if (spec.mode != HVectorSpec::Mode::field)
    throw ScenarioError("star field requires a field-mode h-vector");
  return StarField<BaseField>{&base, &spec};
}

}  // namespace kropina
