#pragma once

#include <span>
#include <string>
#include <vector>

#include "kropina/basegeom.hpp"
#include "kropina/expr.hpp"
#include "kropina/tensor.hpp"

// The auxiliary one-form b_i ("h-vector") driving the metric change, together
// with every scalar and tensor derived from it.  Two input modes:
//   pointwise — free data (b, b_{i|j}, rho, rho_k) at one point, for checking
//               the transformation algebra as identities;
//   field     — b_i = rho(x) l_i + c_i(x), the general solution of the
//               vertical differentiation rule, giving a globally consistent
//               object that can be integrated along curves.
namespace kropina {

struct BetaDomainError : DomainError {
  using DomainError::DomainError;
};
struct RhoZeroError : DomainError {
  using DomainError::DomainError;
};

struct HVectorSpec {
  enum class Mode { pointwise, field };
  Mode mode = Mode::pointwise;
  int n = 0;
  bool gradient = false;  // declared gradient form: symmetric b_{i|j} intended

  // pointwise data
  Vec<double> b;
  Mat<double> bcov;
  double rho = 0;
  Vec<double> rho_grad;

  // field data
  std::vector<Expr> c;
  Expr rho_expr;
};

struct HVectorState {
  int n = 0;
  Vec<double> b;
  double beta = 0;  // b_i y^i
  double tau = 0;   // L / beta
  Vec<double> m;    // m_i = b_i - l_i / tau
  double b_sq = 0;  // g^{ij} b_i b_j
  double m_sq = 0;
  Vec<double> b_up, m_up, l_up;
  Mat<double> bcov;    // b_{i|j}
  SymMat<double> E;    // symmetric part of bcov
  Mat<double> Fskew;   // antisymmetric part
  Vec<double> beta_j;  // y^i b_{i|j}
  double beta_0 = 0;   // beta_j y^j
  double rho = 0;
  Vec<double> rho_k;
  double rho_0 = 0;
};

HVectorState build_state(const BaseGeometry<double>& base,
                         const ConnectionData<double>& conn,
                         const HVectorSpec& spec, std::span<const double> x,
                         std::span<const double> y);

// Vertical derivatives of b_i by the differentiation rule:
//   d b_i/dy^j       = (rho/L) h_ij
//   d^2 b_i/dy^j dy^k = (rho/L) 2 C_ijk - (rho/L^2)(h_ij l_k + h_ik l_j + h_jk l_i)
// Both are symmetric by construction of the storage.
struct BVerticalJets {
  SymMat<double> d1;
  Sym3<double> d2;
};
BVerticalJets b_jet(const BaseGeometry<double>& base, const HVectorState& state);

// Max-norm of L C^h_ij b_h - rho h_ij.  Diagnostic only: the transformation
// algebra needs only the differentiation rule, and generic base metrics admit
// no exact solution of this contraction identity.
double hvector_axiom_residual(const BaseGeometry<double>& base,
                              const HVectorState& state);

struct RuleCheck {
  bool applicable = false;
  bool pass = true;
  double f_norm = 0;
  double rho_grad_norm = 0;
  std::string message;
};

// Declared-gradient rule: a one-form of this family with symmetric b_{i|j}
// forces rho to be constant.  Applies only when the spec declares gradient
// intent; reports a violation when ||Fskew|| is negligible but ||rho_k|| not.
RuleCheck lemma32_consistency(const HVectorSpec& spec,
                              const HVectorState& state);

// Full component jets of the field-mode b_i (value, dx, dy slots populated),
// used by covariant differentiation and by the oracle side of tests.
std::vector<Jet<double>> field_component_jets(const BaseGeometry<double>& base,
                                              const HVectorSpec& spec,
                                              std::span<const double> x,
                                              std::span<const double> y);

}  // namespace kropina
