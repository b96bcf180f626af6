#include "kropina/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kropina/basegeom.hpp"
#include "kropina/rng.hpp"

namespace kropina {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ScenarioError("scenario field '" + field + "': " + why);
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

std::uint64_t get_seed(const json& j, const std::string& field) {
  if (!j.is_number_unsigned()) fail(field, "expected a non-negative integer seed");
  return j.get<std::uint64_t>();
}

// Coefficient entries may be plain numbers or prefix-expression strings.
std::string entry_text(const json& j, const std::string& field) {
  if (j.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "(const %.17g)", j.get<double>());
    return buf;
  }
  if (j.is_string()) return j.get<std::string>();
  fail(field, "expected a number or an expression string");
}

Expr entry_expr(const json& j, int dim, const std::string& field) {
  try {
    return parse_expr(entry_text(j, field), dim);
  } catch (const ParseError& e) {
    fail(field, e.what());
  }
}

MetricSpec parse_one_metric(const json& j) {
  if (j.is_string()) return find_metric(j.get<std::string>());
  if (!j.is_object())
    fail("metric", "expected a catalog name, an object, or an array of these");

  if (!j.contains("kind") || !j["kind"].is_string())
    fail("metric.kind", "required string");
  const std::string kind = j["kind"].get<std::string>();
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    fail("metric.dim", "required integer");
  const int n = j["dim"].get<int>();

  auto table_of = [&](const json& tj, const std::string& field) {
    if (!tj.is_array() || static_cast<int>(tj.size()) != n)
      fail(field, "expected an n x n array");
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < n; ++i) {
      const json& row = tj[i];
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        fail(field, "expected an n x n array");
      std::vector<std::string> r;
      for (int k = 0; k < n; ++k)
        r.push_back(entry_text(row[k], field));
      rows.push_back(std::move(r));
    }
    return rows;
  };

  if (kind == "euclidean") return make_euclidean(n);
  if (kind == "riemannian") {
    if (!j.contains("a")) fail("metric.a", "required for riemannian kind");
    return make_riemannian(n, table_of(j["a"], "metric.a"));
  }
  if (kind == "randers") {
    if (!j.contains("a")) fail("metric.a", "required for randers kind");
    if (!j.contains("drift") || !j["drift"].is_array() ||
        static_cast<int>(j["drift"].size()) != n)
      fail("metric.drift", "required n-vector for randers kind");
    std::vector<std::string> drift;
    for (int i = 0; i < n; ++i)
      drift.push_back(entry_text(j["drift"][i], "metric.drift"));
    return make_randers(n, table_of(j["a"], "metric.a"), drift);
  }
  if (kind == "expression") {
    if (!j.contains("expr") || !j["expr"].is_string())
      fail("metric.expr", "required string for expression kind");
    return make_expression(n, j["expr"].get<std::string>());
  }
  fail("metric.kind", "unknown kind '" + kind + "'");
}

Vec<double> parse_vec(const json& j, int n, const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    fail(field, "expected an array of length " + std::to_string(n));
  Vec<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = get_number(j[i], field);
  return v;
}

Mat<double> parse_mat(const json& j, int n, const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    fail(field, "expected an n x n array");
  Mat<double> m(n);
  for (int i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      fail(field, "expected an n x n array");
    for (int k = 0; k < n; ++k) m(i, k) = get_number(row[k], field);
  }
  return m;
}

void parse_hvector(const json& j, int n, Scenario& sc) {
  if (!j.is_object()) fail("hvector", "expected an object");

  if (j.contains("generator")) {
    if (!j["generator"].is_string()) fail("hvector.generator", "expected a string");
    const std::string g = j["generator"].get<std::string>();
    if (g == "zero-bcov")
      sc.generator.kind = GeneratorDirective::Kind::zero_bcov;
    else if (g == "random")
      sc.generator.kind = GeneratorDirective::Kind::random;
    else if (g == "projective-constructed")
      sc.generator.kind = GeneratorDirective::Kind::projective;
    else
      fail("hvector.generator", "unknown generator '" + g + "'");
    if (j.contains("seed")) sc.generator.seed = get_seed(j["seed"], "hvector.seed");
    return;
  }

  HVectorSpec& h = sc.hvector;
  h.n = n;
  if (j.contains("gradient")) {
    if (!j["gradient"].is_boolean()) fail("hvector.gradient", "expected a bool");
    h.gradient = j["gradient"].get<bool>();
  }

  const std::string mode =
      j.contains("mode") && j["mode"].is_string() ? j["mode"].get<std::string>()
                                                  : "pointwise";
  if (mode == "pointwise") {
    h.mode = HVectorSpec::Mode::pointwise;
    if (!j.contains("b")) fail("hvector.b", "required in pointwise mode");
    h.b = parse_vec(j["b"], n, "hvector.b");
    if (!j.contains("rho")) fail("hvector.rho", "required in pointwise mode");
    h.rho = get_number(j["rho"], "hvector.rho");
    h.bcov = j.contains("bcov") ? parse_mat(j["bcov"], n, "hvector.bcov")
                                : Mat<double>(n);
    h.rho_grad = j.contains("rho_grad")
                     ? parse_vec(j["rho_grad"], n, "hvector.rho_grad")
                     : Vec<double>(n);
  } else if (mode == "field") {
    h.mode = HVectorSpec::Mode::field;
    if (!j.contains("rho")) fail("hvector.rho", "required in field mode");
    h.rho_expr = entry_expr(j["rho"], n, "hvector.rho");
    if (!j.contains("c") || !j["c"].is_array() ||
        static_cast<int>(j["c"].size()) != n)
      fail("hvector.c", "required n-vector in field mode");
    h.c.clear();
    for (int i = 0; i < n; ++i)
      h.c.push_back(entry_expr(j["c"][i], n, "hvector.c"));
    for (const Expr& e : h.c)
      if (expr_uses_y(e)) fail("hvector.c", "components must not depend on y");
    if (expr_uses_y(h.rho_expr))
      fail("hvector.rho", "must not depend on y");
  } else {
    fail("hvector.mode", "unknown mode '" + mode + "'");
  }
}

const std::vector<std::string>& canonical_checks() {
  static const std::vector<std::string> ids = {
      "star-closed-forms", "inverse-metric", "difference-tensor",
      "theorem31",         "theorem32",      "lemma32",
      "projective",        "geodesic"};
  return ids;
}

}  // namespace

const std::vector<std::string>& check_catalog() { return canonical_checks(); }

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw ScenarioError("scenario: top level must be an object");

  Scenario sc;
  sc.source_text = json_text;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail("name", "expected a string");
    sc.name = j["name"].get<std::string>();
  }

  if (!j.contains("metric")) fail("metric", "required");
  const json& mj = j["metric"];
  if (mj.is_array()) {
    if (mj.empty()) fail("metric", "array must not be empty");
    for (const json& one : mj) sc.metrics.push_back(parse_one_metric(one));
  } else {
    sc.metrics.push_back(parse_one_metric(mj));
  }
  const int n = sc.metrics.front().n;
  for (const MetricSpec& m : sc.metrics)
    if (m.n != n) fail("metric", "all metrics must share one dimension");

  if (!j.contains("hvector")) fail("hvector", "required");
  parse_hvector(j["hvector"], n, sc);

  const bool has_points = j.contains("points");
  const bool has_sampler = j.contains("sampler");
  if (has_points == has_sampler)
    fail("points", "exactly one of 'points' and 'sampler' is required");

  if (has_points) {
    const json& pts = j["points"];
    if (!pts.is_array() || pts.empty()) fail("points", "expected a non-empty array");
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const json& p = pts[k];
      const std::string field = "points[" + std::to_string(k) + "]";
      if (!p.is_object() || !p.contains("x") || !p.contains("y"))
        fail(field, "expected {x, y}");
      PointSpec ps;
      ps.x = parse_vec(p["x"], n, field + ".x");
      ps.y = parse_vec(p["y"], n, field + ".y");
      sc.points.push_back(std::move(ps));
    }
  } else {
    const json& s = j["sampler"];
    if (!s.is_object()) fail("sampler", "expected an object");
    sc.has_sampler = true;
    if (!s.contains("count") || !s["count"].is_number_integer())
      fail("sampler.count", "required integer");
    sc.sampler.count = s["count"].get<int>();
    if (sc.sampler.count <= 0) fail("sampler.count", "must be positive");
    if (s.contains("seed")) sc.sampler.seed = get_seed(s["seed"], "sampler.seed");
    if (s.contains("cone_margin"))
      sc.sampler.cone_margin = get_number(s["cone_margin"], "sampler.cone_margin");
    if (s.contains("box")) {
      const json& b = s["box"];
      auto read_pair = [&](const json& pj) {
        if (!pj.is_array() || pj.size() != 2)
          fail("sampler.box", "expected [lo, hi] pairs");
        std::array<double, 2> p{get_number(pj[0], "sampler.box"),
                                get_number(pj[1], "sampler.box")};
        if (!(p[0] < p[1])) fail("sampler.box", "lo must be < hi");
        return p;
      };
      if (b.is_array() && b.size() == 2 && b[0].is_number()) {
        sc.sampler.box.assign(n, read_pair(b));
      } else if (b.is_array() && static_cast<int>(b.size()) == n) {
        for (int i = 0; i < n; ++i) sc.sampler.box.push_back(read_pair(b[i]));
      } else {
        fail("sampler.box", "expected [lo, hi] or one pair per coordinate");
      }
    } else {
      sc.sampler.box.assign(n, {-0.5, 0.5});
    }
  }

  if (!j.contains("checks") || !j["checks"].is_array() || j["checks"].empty())
    fail("checks", "required non-empty array");
  for (const json& c : j["checks"]) {
    if (!c.is_string()) fail("checks", "entries must be strings");
    std::string id = c.get<std::string>();
    if (id == "theorem41") id = "projective";
    const auto& ids = canonical_checks();
    if (std::find(ids.begin(), ids.end(), id) == ids.end())
      fail("checks", "unknown check '" + id + "'");
    if (std::find(sc.checks.begin(), sc.checks.end(), id) == sc.checks.end())
      sc.checks.push_back(id);
  }

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) fail("tolerances", "expected an object");
    if (t.contains("tol_rel"))
      sc.tolerances.tol_rel = get_number(t["tol_rel"], "tolerances.tol_rel");
    if (t.contains("tol_abs"))
      sc.tolerances.tol_abs = get_number(t["tol_abs"], "tolerances.tol_abs");
    if (t.contains("nonproj_threshold"))
      sc.tolerances.nonproj_threshold =
          get_number(t["nonproj_threshold"], "tolerances.nonproj_threshold");
  }

  if (j.contains("geodesic")) {
    const json& g = j["geodesic"];
    if (!g.is_object()) fail("geodesic", "expected an object");
    if (g.contains("steps")) {
      if (!g["steps"].is_number_integer()) fail("geodesic.steps", "expected integer");
      sc.geodesic.steps = g["steps"].get<int>();
    }
    if (g.contains("dt")) sc.geodesic.dt = get_number(g["dt"], "geodesic.dt");
    if (g.contains("defect_tol"))
      sc.geodesic.defect_tol = get_number(g["defect_tol"], "geodesic.defect_tol");
  }

  const bool needs_field =
      std::find(sc.checks.begin(), sc.checks.end(), "theorem32") != sc.checks.end();
  if (needs_field && (sc.generator.kind != GeneratorDirective::Kind::none ||
                      sc.hvector.mode != HVectorSpec::Mode::field))
    fail("checks", "theorem32 needs a field-mode hvector");
  const bool needs_source =
      std::find(sc.checks.begin(), sc.checks.end(), "geodesic") != sc.checks.end();
  if (needs_source && sc.generator.kind == GeneratorDirective::Kind::random)
    fail("checks", "geodesic needs a field-mode hvector or a constructive generator");

  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

ResolvedPoints resolve_points(const Scenario& sc, const MetricSpec& metric) {
  const int n = metric.n;
  ResolvedPoints out;

  // Admissibility of one (x, y) against the metric domain and, when the
  // one-form is fully specified, against the cone margin.
  auto admissible = [&](const PointSpec& p, std::string* why) {
    double L;
    try {
      std::vector<Jet<double>> xj, yj;
      seed_xy(std::span<const double>(p.x.a.data(), n),
              std::span<const double>(p.y.a.data(), n), xj, yj);
      Jet<double> Lj = metric.L_jet(std::span<const Jet<double>>(xj),
                                       std::span<const Jet<double>>(yj));
      L = Lj.v;
    } catch (const DomainError& e) {
      if (why) *why = e.what();
      return false;
    }
    if (L <= 0) {
      if (why) *why = "L <= 0";
      return false;
    }
    if (sc.generator.kind != GeneratorDirective::Kind::none) return true;

    double beta = 0, b_norm = 0;
    if (sc.hvector.mode == HVectorSpec::Mode::pointwise) {
      for (int i = 0; i < n; ++i) {
        beta += sc.hvector.b[i] * p.y[i];
        b_norm = std::max(b_norm, std::abs(sc.hvector.b[i]));
      }
    } else {
      std::vector<Jet<double>> xj, yj;
      seed_xy(std::span<const double>(p.x.a.data(), n),
              std::span<const double>(p.y.a.data(), n), xj, yj);
      auto xs = std::span<const Jet<double>>(xj);
      auto ys = std::span<const Jet<double>>(yj);
      const double rho = eval_expr(sc.hvector.rho_expr, xs, ys).v;
      beta = rho * L;
      b_norm = std::abs(rho);
      for (int i = 0; i < n; ++i) {
        const double ci = eval_expr(sc.hvector.c[i], xs, ys).v;
        beta += ci * p.y[i];
        b_norm = std::max(b_norm, std::abs(ci));
      }
    }
    const double margin = sc.has_sampler ? sc.sampler.cone_margin : 0.0;
    if (beta <= std::max(margin * L * b_norm, tol::beta_floor * L)) {
      if (why) *why = "beta at or below the cone margin";
      return false;
    }
    return true;
  };

  if (!sc.points.empty()) {
    for (std::size_t k = 0; k < sc.points.size(); ++k) {
      std::string why;
      if (!admissible(sc.points[k], &why))
        throw ScenarioError("point " + std::to_string(k) +
                            " violates domain guards: " + why);
    }
    out.points = sc.points;
    return out;
  }

  Rng rng(sc.sampler.seed);
  const int want = sc.sampler.count;
  const int max_attempts = 2 * want + 16;  // >50% rejection aborts
  int attempts = 0;
  while (static_cast<int>(out.points.size()) < want && attempts < max_attempts) {
    ++attempts;
    PointSpec p;
    p.x = Vec<double>(n);
    for (int i = 0; i < n; ++i)
      p.x[i] = rng.uniform(sc.sampler.box[i][0], sc.sampler.box[i][1]);
    p.y = rng.sphere_dir(n);
    if (admissible(p, nullptr)) {
      out.points.push_back(std::move(p));
    } else {
      ++out.rejected;
    }
  }
  if (static_cast<int>(out.points.size()) < want)
    throw ScenarioError(
        "sampler rejected more than half of its draws (" +
        std::to_string(out.rejected) + "/" + std::to_string(attempts) +
        "); widen the box, relax cone_margin, or fix the one-form");
  return out;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace kropina
