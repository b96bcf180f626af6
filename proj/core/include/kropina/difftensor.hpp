#pragma once

#include "kropina/basegeom.hpp"
#include "kropina/hvector.hpp"
#include "kropina/kropina.hpp"

// The difference D^i_jk between the horizontal connection coefficients of the
// transformed space and those of the base space, obtained by solving the
// metricity conditions of the transformed metric in three stages:
//   1. its double y-contraction D^i_00,
//   2. the single contraction D^i_0j,
//   3. the full tensor D^i_jk.
// Each stage is a linear system of the same shape (Lemma-of-uniqueness type:
// *L_ir A^r = B_i together with *L_r A^r = B), solved in closed form and
// plug-back-verified before the next stage consumes it.
namespace kropina {

struct DiffTensor {
  int n = 0;
  Vec<double> D00;    // D^i_00
  Mat<double> D0j;    // D^i_0j
  Ten3<double> Djk;   // D^i_jk, symmetric in (j,k)

  // Stage right-hand sides, kept for inspection.
  Mat<double> Gij;
  Vec<double> Gj;
  std::vector<double> Hjik;  // [j][i][k], full cube (symmetric only in (i,k))
  SymMat<double> Hik;
  Vec<double> F_i0;   // F_ij y^j
  Vec<double> E_i0;
  double E_00 = 0;
  double F_beta0 = 0;  // F_i0 b^i

  double hjik(int j, int i, int k) const { return Hjik[(j * n + i) * n + k]; }

  // Plug-back residuals of the three stage systems (relative sup-norms).
  double stage1_mixed = 0, stage1_scalar = 0;
  double stage2_mixed = 0, stage2_scalar = 0;
  double stage3_mixed = 0, stage3_scalar = 0;

  // Residuals of the defining metricity equations and their contractions.
  double res_defining_grad = 0;     // gradient-level equation, all i,j
  double res_defining_hess = 0;     // Hessian-level equation, all i,j,k
  double res_sym_contraction = 0;   // y-contracted symmetric part
  double res_spray_mixed = 0;       // *L_ir D^r_00 system
  double res_spray_scalar = 0;      // *L_r D^r_00 scalar equation
};

// Closed-form solution of *L_ir A^r = B_i, *L_r A^r = B.  Unique under the
// degeneracy guards; the caller supplies a consistent right-hand side.
Vec<double> solve_star_system(const BaseGeometry<double>& base,
                              const HVectorState& h, const StarGeometry& star,
                              const Vec<double>& B_i, double B);

// Stage entry points.  Each returns its block; difference_tensor() runs all
// three, fills the diagnostics, and enforces the plug-backs.
Vec<double> d00(const BaseGeometry<double>& base, const HVectorState& h,
                const StarGeometry& star);
Mat<double> d0j(const BaseGeometry<double>& base, const HVectorState& h,
                const StarGeometry& star, const Vec<double>& D00);
Ten3<double> djk(const BaseGeometry<double>& base, const HVectorState& h,
                 const StarGeometry& star, const Vec<double>& D00,
                 const Mat<double>& D0j);

DiffTensor difference_tensor(const BaseGeometry<double>& base,
                             const HVectorState& h, const StarGeometry& star);

struct Theorem31Result {
  double bcov_norm = 0;
  double rho_grad_norm = 0;
  bool hypothesis_holds = false;  // parallel one-form and constant rho
  double d_norm = 0;              // sup |D^i_jk|
  bool forward_pass = true;       // hypothesis => D vanishes
  bool converse_flag = false;     // D ~ 0 while the data is not parallel
};

// Forward direction is asserted (parallel data must produce D = 0 at the
// stated tolerance); the converse is only flagged, since it additionally
// assumes the exact contraction axiom that concrete metrics satisfy only
// approximately.
Theorem31Result theorem31_check(const HVectorState& h, const DiffTensor& D,
                                double tol_abs);

struct StarConnection {
  Vec<double> G;  // *G^i = G^i + D^i_00 / 2
  Mat<double> N;  // *N^i_j = N^i_j + D^i_0j
};

StarConnection star_connections(const ConnectionData<double>& conn,
                                const DiffTensor& D);

}  // namespace kropina
