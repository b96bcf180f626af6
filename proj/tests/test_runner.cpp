#include <doctest.h>

#include <string>

#include "helpers.hpp"
#include "kropina/report.hpp"
#include "kropina/runner.hpp"

using namespace kropina;
using kropina::testing::admissible_point;

namespace {

const char* kSmall = R"js({
  "name": "runner-small",
  "metric": "randers-bump-3",
  "hvector": {"generator": "random", "seed": 5},
  "sampler": {"count": 3, "seed": 8},
  "checks": ["star-closed-forms", "inverse-metric", "difference-tensor"]
})js";

std::string strip_wall_time(std::string text) {
  auto at = text.find("\"wall_time_s\"");
  if (at == std::string::npos) return text;
  auto end = text.find('\n', at);
  text.erase(at, end - at);
  return text;
}

}  // namespace

TEST_CASE("two runs of the same scenario are identical") {
  Scenario sc = parse_scenario(kSmall);
  RunResult a = run_scenario(sc);
  RunResult b = run_scenario(sc);
  CHECK(a.exit_code == 0);
  REQUIRE(a.report.records.size() == b.report.records.size());
  for (size_t i = 0; i < a.report.records.size(); ++i) {
    const CheckRecord& ra = a.report.records[i];
    const CheckRecord& rb = b.report.records[i];
    CHECK(ra.check_id == rb.check_id);
    CHECK(ra.point_index == rb.point_index);
    CHECK(ra.residual_name == rb.residual_name);
    CHECK(ra.value == rb.value);  // bitwise: no tolerance
    CHECK(ra.pass == rb.pass);
  }
  CHECK(strip_wall_time(render_report(a.report)) ==
        strip_wall_time(render_report(b.report)));
}

TEST_CASE("worker fan-out changes nothing") {
  Scenario sc = parse_scenario(kSmall);
  RunOptions serial;
  RunOptions wide;
  wide.jobs = 4;
  RunResult a = run_scenario(sc, serial);
  RunResult b = run_scenario(sc, wide);
  REQUIRE(a.report.records.size() == b.report.records.size());
  for (size_t i = 0; i < a.report.records.size(); ++i) {
    CHECK(a.report.records[i].value == b.report.records[i].value);
    CHECK(a.report.records[i].point_index == b.report.records[i].point_index);
  }
}

TEST_CASE("records come out sorted by point index") {
  Scenario sc = parse_scenario(kSmall);
  RunResult r = run_scenario(sc);
  int last = -1;
  for (const CheckRecord& rec : r.report.records) {
    CHECK(rec.point_index >= last);
    last = rec.point_index;
  }
  CHECK(r.report.points_total == 3);
  CHECK(last == 2);
}

TEST_CASE("tolerance override forces a failing exit") {
  Scenario sc = parse_scenario(kSmall);
  RunOptions strict;
  strict.has_tol_rel = true;
  strict.tol_rel = 1e-30;  // below roundoff: every nonzero residual fails
  strict.has_tol_abs = true;
  strict.tol_abs = 1e-30;
  RunResult r = run_scenario(sc, strict);
  CHECK(r.exit_code == 1);
  CHECK(r.report.failed() > 0);
  CHECK(!r.report.all_pass());
}

TEST_CASE("seed override reaches sampler, generator, and report") {
  Scenario sc = parse_scenario(kSmall);
  RunOptions opt;
  opt.has_seed = true;
  opt.seed = 99;
  RunResult a = run_scenario(sc, opt);
  RunResult b = run_scenario(sc, opt);
  CHECK(a.report.seed == 99);
  REQUIRE(a.report.records.size() == b.report.records.size());
  for (size_t i = 0; i < a.report.records.size(); ++i)
    CHECK(a.report.records[i].value == b.report.records[i].value);

  RunResult base = run_scenario(sc);
  CHECK(base.report.seed == 8);
  bool any_differs = false;
  for (size_t i = 0;
       i < std::min(base.report.records.size(), a.report.records.size()); ++i)
    any_differs |= base.report.records[i].value != a.report.records[i].value;
  CHECK(any_differs);  // different seed, different points, different residuals
}

TEST_CASE("per-point streams do not depend on evaluation order") {
  CHECK(point_seed(7, 0) != point_seed(7, 1));
  CHECK(point_seed(7, 3) == point_seed(7, 3));
  CHECK(point_seed(7, 3) != point_seed(8, 3));
}

TEST_CASE("generator directives instantiate reproducibly per point") {
  Scenario sc = parse_scenario(kSmall);
  Rng rng(7);
  auto p = admissible_point(sc.metrics[0], rng, false);
  HVectorSpec s1 = instantiate_hvector(sc, 2, p.base);
  HVectorSpec s2 = instantiate_hvector(sc, 2, p.base);
  REQUIRE(s1.n == s2.n);
  for (int i = 0; i < s1.n; ++i) {
    CHECK(s1.b[i] == s2.b[i]);
    for (int j = 0; j < s1.n; ++j) CHECK(s1.bcov(i, j) == s2.bcov(i, j));
  }
  HVectorSpec other = instantiate_hvector(sc, 1, p.base);
  bool differs = false;
  for (int i = 0; i < s1.n; ++i) differs |= other.b[i] != s1.b[i];
  CHECK(differs);
}

TEST_CASE("the parallel generator really produces parallel data") {
  Scenario sc = parse_scenario(R"js({
    "metric": "riemann-bump-3",
    "hvector": {"generator": "zero-bcov", "seed": 21},
    "sampler": {"count": 2, "seed": 4},
    "checks": ["theorem31"]
  })js");
  Rng rng(9);
  auto p = admissible_point(sc.metrics[0], rng, false);
  HVectorSpec spec = instantiate_hvector(sc, 0, p.base);
  CHECK(sup_norm(spec.bcov) == 0.0);
  CHECK(sup_norm(spec.rho_grad) == 0.0);
  CHECK(spec.rho != 0.0);
}

TEST_CASE("summary aggregates only gated residuals") {
  Scenario sc = parse_scenario(kSmall);
  RunResult r = run_scenario(sc);
  auto maxima = r.report.max_residuals();
  REQUIRE(maxima.count("star-closed-forms") == 1);
  // Diagnostics carry threshold 0 and would otherwise swamp the maxima.
  CHECK(maxima["star-closed-forms"] < 1e-9);
  CHECK(maxima["inverse-metric"] < 1e-9);
  CHECK(maxima["difference-tensor"] < 1e-8);
}

TEST_CASE("reports render with fixed key order and 17 significant digits") {
  Scenario sc = parse_scenario(kSmall);
  RunResult r = run_scenario(sc);
  std::string text = render_report(r.report);
  CHECK(text.find("\"scenario\"") != std::string::npos);
  CHECK(text.find("\"scenario_hash\"") < text.find("\"seed\""));
  CHECK(text.find("\"records\"") < text.find("\"summary\""));
  // wall time is the very last member so that diffs ignore exactly one line
  CHECK(text.rfind("\"wall_time_s\"") > text.rfind("\"max_residuals\""));
  CHECK(format_g17(0.1) == "0.10000000000000001");
  CHECK(format_g17(1.0) == "1");
}
