#include "kropina/metric.hpp"

#include <mutex>

namespace kropina {
namespace {

void check_dim(int n) {
  if (n < 2 || n > kMaxDim)
    throw ScenarioError("metric dimension must be between 2 and " +
                        std::to_string(kMaxDim));
}

Expr parse_coeff(const std::string& text, int n, const char* what) {
  Expr e = parse_expr(text, n);
  if (expr_uses_y(e))
    throw ParseError(std::string(what) + " may depend on x only", 0);
  return e;
}

}  // namespace

MetricSpec make_euclidean(int n) {
  check_dim(n);
  MetricSpec m;
  m.kind = MetricSpec::Kind::euclidean;
  m.n = n;
  m.name = "euclidean-" + std::to_string(n);
  return m;
}

MetricSpec make_riemannian(int n,
                           const std::vector<std::vector<std::string>>& table) {
  check_dim(n);
  if (static_cast<int>(table.size()) != n)
    throw ScenarioError("coefficient table must be n x n");
  MetricSpec m;
  m.kind = MetricSpec::Kind::riemannian;
  m.n = n;
  m.a.resize(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(table[i].size()) != n)
      throw ScenarioError("coefficient table must be n x n");
    m.a[i].resize(n);
    for (int j = 0; j < n; ++j)
      m.a[i][j] = parse_coeff(table[i][j], n, "metric coefficient");
  }
  // Symmetry of the table is the caller's claim; verify it textually cheap:
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (expr_to_string(m.a[i][j]) != expr_to_string(m.a[j][i]))
        throw ScenarioError("coefficient table must be symmetric");
  return m;
}

MetricSpec make_randers(int n, const std::vector<std::vector<std::string>>& table,
                        const std::vector<std::string>& drift) {
  MetricSpec m = make_riemannian(n, table);
  m.kind = MetricSpec::Kind::randers;
  if (static_cast<int>(drift.size()) != n)
    throw ScenarioError("drift one-form must have n entries");
  m.drift.resize(n);
  for (int i = 0; i < n; ++i)
    m.drift[i] = parse_coeff(drift[i], n, "drift coefficient");
  return m;
}

MetricSpec make_expression(int n, const std::string& metric_text) {
  check_dim(n);
  MetricSpec m;
  m.kind = MetricSpec::Kind::expression;
  m.n = n;
  m.metric_expr = parse_expr(metric_text, n);
  return m;
}

const std::vector<MetricSpec>& metric_catalog() {
  static std::vector<MetricSpec> cat = [] {
    std::vector<MetricSpec> v;

    v.push_back(make_euclidean(3));
    v.back().name = "euclidean-3";

    // Gently curved positive-definite table: diagonal bumps plus a small
    // off-diagonal coupling.  Stays positive definite on |x| <= 1.
    std::vector<std::vector<std::string>> bump3 = {
        {"(+ (const 1) (* (x 0) (x 0)))", "(* (const 1/5) (x 2))", "(const 0)"},
        {"(* (const 1/5) (x 2))", "(const 1)", "(const 0)"},
        {"(const 0)", "(const 0)", "(+ (const 1) (* (x 1) (x 1)))"}};
    v.push_back(make_riemannian(3, bump3));
    v.back().name = "riemann-bump-3";

    v.push_back(make_randers(
        3, bump3, {"(const 1/10)", "(const 1/20)", "(const -2/25)"}));
    v.back().name = "randers-bump-3";

    // Product of a flat line (coordinate 0) with a curved surface in
    // (x1, x2): the constant one-form dx^0 is parallel here even though the
    // spray is nontrivial, which is exactly the setting where connection
    // agreement between the base and the transformed space is a strong check.
    std::vector<std::vector<std::string>> prod3 = {
        {"(const 1)", "(const 0)", "(const 0)"},
        {"(const 0)", "(+ (const 1) (* (x 2) (x 2)))", "(* (const 1/5) (x 1))"},
        {"(const 0)", "(* (const 1/5) (x 1))", "(+ (const 1) (* (x 1) (x 1)))"}};
    v.push_back(make_riemannian(3, prod3));
    v.back().name = "product-bump-3";

    v.push_back(make_euclidean(2));
    v.back().name = "euclidean-2";

    std::vector<std::vector<std::string>> bump2 = {
        {"(+ (const 1) (* (x 0) (x 0)))", "(* (const 1/10) (x 1))"},
        {"(* (const 1/10) (x 1))", "(const 1)"}};
    v.push_back(make_randers(2, bump2, {"(const 1/10)", "(* (const 1/20) (x 0))"}));
    v.back().name = "randers-bump-2";

    return v;
  }();
  return cat;
}

const MetricSpec& find_metric(const std::string& name) {
  for (const auto& m : metric_catalog())
    if (m.name == name) return m;
  throw ScenarioError("unknown catalog metric '" + name + "'");
}

}  // namespace kropina
