#pragma once

#include <span>
#include <string>
#include <vector>

#include "kropina/expr.hpp"
#include "kropina/jet.hpp"

namespace kropina {

// A metric function of Finsler type, evaluated through jets.  Coefficient
// tables depend on x only (enforced at construction); the expression kind
// takes the full metric function directly and is checked for positive
// homogeneity of degree one at every evaluation.
struct MetricSpec {
  enum class Kind { euclidean, riemannian, randers, expression };

  Kind kind = Kind::euclidean;
  int n = 0;
  std::string name;
  std::vector<std::vector<Expr>> a;  // symmetric coefficient table a[i][j], i<=j used
  std::vector<Expr> drift;           // randers one-form coefficients
  Expr metric_expr;                  // expression kind

  int dim() const { return n; }

  template <class T>
  Jet<T> L_jet(std::span<const Jet<T>> xj, std::span<const Jet<T>> yj) const {
    switch (kind) {
      case Kind::euclidean: {
        Jet<T> q(n);
        for (int i = 0; i < n; ++i) q = q + yj[i] * yj[i];
        if (val(q.v) <= 0) throw DomainError("metric: y = 0");
        return jsqrt(q);
      }
      case Kind::riemannian:
      case Kind::randers: {
        Jet<T> q(n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const Expr& aij = i <= j ? a[i][j] : a[j][i];
            q = q + eval_expr(aij, xj, yj) * yj[i] * yj[j];
          }
        if (val(q.v) <= 0)
          throw DomainError("metric: quadratic form not positive at this (x, y)");
        Jet<T> alpha = jsqrt(q);
        if (kind == Kind::riemannian) return alpha;
        Jet<T> beta(n);
        for (int i = 0; i < n; ++i)
          beta = beta + eval_expr(drift[i], xj, yj) * yj[i];
        return alpha + beta;
      }
      case Kind::expression:
        return eval_expr(metric_expr, xj, yj);
    }
    throw Error("metric: corrupt spec");
  }
};

// Factories validate shape and reject y-dependence in coefficient tables.
MetricSpec make_euclidean(int n);
MetricSpec make_riemannian(int n, const std::vector<std::vector<std::string>>& table);
MetricSpec make_randers(int n, const std::vector<std::vector<std::string>>& table,
                        const std::vector<std::string>& drift);
MetricSpec make_expression(int n, const std::string& metric_text);

// Built-in named metrics used by the bundled scenarios and tests.
const std::vector<MetricSpec>& metric_catalog();
const MetricSpec& find_metric(const std::string& name);

// Derivative-slot selector for plain jet evaluation of a scalar field.
enum JetSlots : unsigned {
  slot_value = 1u,
  slot_y1 = 2u,
  slot_y2 = 4u,
  slot_y3 = 8u,
  slot_x1 = 16u,
  slot_x1y1 = 32u,
  slot_x1y2 = 64u,
  slots_y_all = slot_value | slot_y1 | slot_y2 | slot_y3,
  slots_full = 127u,
};

struct JetBundle {
  Jet<double> jet;
  unsigned slots = 0;
  bool has(unsigned s) const { return (slots & s) == s; }
};

// Evaluates the field's jet at (x, y) and keeps exactly the requested slots
// (others are zeroed so accidental reliance on them shows up immediately).
template <class Field>
JetBundle eval_jet(const Field& f, std::span<const double> x,
                   std::span<const double> y, unsigned slots = slots_full) {
  std::vector<Jet<double>> xj, yj;
  seed_xy(x, y, xj, yj);
  JetBundle out;
  out.jet = f.L_jet(std::span<const Jet<double>>(xj),
                    std::span<const Jet<double>>(yj));
  out.slots = slots;
  const int n = out.jet.n;
  if (!(slots & slot_value)) out.jet.v = 0;
  if (!(slots & slot_y1)) out.jet.dy.fill(0);
  if (!(slots & slot_y2)) out.jet.dyy.fill(0);
  if (!(slots & slot_y3)) out.jet.dyyy.fill(0);
  if (!(slots & slot_x1)) out.jet.dx.fill(0);
  if (!(slots & slot_x1y1)) out.jet.dxdy.fill(0);
  if (!(slots & slot_x1y2)) out.jet.dxdyy.fill(0);
  (void)n;
  return out;
}

}  // namespace kropina
