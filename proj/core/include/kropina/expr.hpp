#pragma once

#include <span>
#include <string>
#include <vector>

#include "kropina/errors.hpp"
#include "kropina/jet.hpp"

// Prefix-notation scalar expressions over coordinates x and fibre variables y:
//   (+ e e)  (* e e)  (pow e r)  (x k)  (y k)  (const r)
// with r an integer, decimal, or p/q rational literal.  This is the input
// language for metric coefficient tables, one-forms, and scalar fields.
namespace kropina {

struct Expr {
  enum class Op { add, mul, pow, var_x, var_y, constant };
  Op op = Op::constant;
  int index = 0;      // coordinate slot for var_x / var_y
  double value = 0;   // literal for constant, exponent for pow
  bool exponent_is_int = false;
  long iexp = 0;
  std::vector<Expr> kids;
};

// Throws ParseError with the offending offset.  dim bounds the coordinate
// indices; pass 0 to skip the bound check.
Expr parse_expr(const std::string& text, int dim);

bool expr_uses_y(const Expr& e);

// Renders back to canonical prefix text (used by scenario hashing).
std::string expr_to_string(const Expr& e);

// Integer powers are evaluated by repeated multiplication, so they are exact
// and defined for any base; fractional exponents require a positive base.
template <class T>
Jet<T> eval_expr(const Expr& e, std::span<const Jet<T>> xj,
                 std::span<const Jet<T>> yj) {
  const int n = static_cast<int>(xj.size());
  switch (e.op) {
    case Expr::Op::constant:
      return jconst(T(e.value), n);
    case Expr::Op::var_x:
      return xj[e.index];
    case Expr::Op::var_y:
      return yj[e.index];
    case Expr::Op::add:
      return eval_expr(e.kids[0], xj, yj) + eval_expr(e.kids[1], xj, yj);
    case Expr::Op::mul:
      return eval_expr(e.kids[0], xj, yj) * eval_expr(e.kids[1], xj, yj);
    case Expr::Op::pow: {
      Jet<T> base = eval_expr(e.kids[0], xj, yj);
      if (e.exponent_is_int) {
        long p = e.iexp;
        if (p == 0) return jconst(T(1.0), n);
        bool neg = p < 0;
        if (neg) p = -p;
        Jet<T> acc = base;
        for (long i = 1; i < p; ++i) acc = acc * base;
        if (!neg) return acc;
        if (val(acc.v) == 0)
          throw DomainError("expression: negative power of zero");
        return jrecip(acc);
      }
      if (val(base.v) <= 0)
        throw DomainError(
            "expression: fractional power of a non-positive base");
      return jpow(base, e.value);
    }
  }
  throw Error("expression: corrupt node");
}

}  // namespace kropina
