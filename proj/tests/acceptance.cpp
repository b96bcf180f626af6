// Acceptance gate: one self-contained run per release criterion, each printing
// a single PASS/FAIL line.  Tolerances are pinned here on purpose; loosening
// them is a release decision, not a test fix.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kropina/difftensor.hpp"
#include "kropina/kropina.hpp"
#include "kropina/metric.hpp"
#include "kropina/projective.hpp"
#include "kropina/report.hpp"
#include "kropina/rng.hpp"
#include "kropina/runner.hpp"

using namespace kropina;

namespace {

constexpr double kTolClosedForm = 1e-8;     // criterion 1
constexpr double kTolInverse = 1e-9;        // criterion 2
constexpr double kTolRaised = 1e-8;         // criterion 3
constexpr double kTolRankOne = 1e-10;       // criterion 4
constexpr double kTolSolve = 1e-9;          // criterion 5
constexpr double kTolDefining = 1e-8;       // criterion 6
constexpr double kTolParallel = 1e-9;       // criterion 7
constexpr double kTolBerwald = 1e-9;        // criterion 8
constexpr double kTolSpray = 1e-9;          // criterion 9 (constructed)
constexpr double kNonProj = 1e-3;           // criterion 9 (generic)
constexpr double kTolGeodesic = 1e-6;       // criterion 9 (trajectory)
constexpr double kTolEuler = 1e-10;         // criterion 10
constexpr double kTimeBudgetS = 5.0;        // criterion 1 runtime

int g_failures = 0;

void report(int idx, bool pass, const char* what, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("[%2d] %s  %-46s %s\n", idx, pass ? "PASS" : "FAIL", what,
              detail.c_str());
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::span<const double> sp(const Vec<double>& v) {
  return {v.a.data(), static_cast<size_t>(v.n)};
}

// ---------------------------------------------------------------------------
// The shared grid: 3 catalog metrics x 20 points x 5 one-form specs.

struct GridInstance {
  const MetricSpec* metric;
  Vec<double> x, y;
  BaseGeometry<double> base;
  ConnectionData<double> conn;
  HVectorSpec spec;
  HVectorState state;
  StarGeometry cf, oracle;
  int spec_kind;  // 0 parallel, 1 generic, 2 constructed, 3 generic-alt, 4 symmetric
};

Vec<double> draw_point(const MetricSpec& m, Rng& rng, BaseGeometry<double>& bg,
                       Vec<double>& x) {
  const int n = m.dim();
  for (int attempt = 0; attempt < 64; ++attempt) {
    x = Vec<double>(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-0.4, 0.4);
    Vec<double> y = rng.sphere_dir(n);
    try {
      bg = base_objects<double>(m, sp(x), sp(y));
      return y;
    } catch (const DomainError&) {
    }
  }
  throw DomainError("acceptance grid: no admissible point in 64 draws");
}

std::vector<GridInstance> build_grid() {
  const char* names[3] = {"riemann-bump-3", "randers-bump-3", "randers-bump-2"};
  std::vector<GridInstance> grid;
  grid.reserve(3 * 20 * 5);
  Rng rng(20240601);
  for (const char* name : names) {
    const MetricSpec& m = find_metric(name);
    for (int p = 0; p < 20; ++p) {
      GridInstance proto;
      proto.metric = &m;
      proto.y = draw_point(m, rng, proto.base, proto.x);
      proto.conn = connection_from(proto.base);
      for (int kind = 0; kind < 5; ++kind) {
        GridInstance gi = proto;
        gi.spec_kind = kind;
        switch (kind) {
          case 0:
            gi.spec = random_parallel_spec(rng, gi.base);
            break;
          case 1:
          case 3:
            gi.spec = random_generic_spec(rng, gi.base);
            break;
          case 2:
            gi.spec = random_projective_spec(rng, gi.base);
            break;
          case 4: {  // symmetric covariant derivative, non-constant rho
            gi.spec = random_generic_spec(rng, gi.base);
            for (int i = 0; i < gi.spec.n; ++i)
              for (int j = i + 1; j < gi.spec.n; ++j) {
                const double s =
                    0.5 * (gi.spec.bcov(i, j) + gi.spec.bcov(j, i));
                gi.spec.bcov(i, j) = s;
                gi.spec.bcov(j, i) = s;
              }
            break;
          }
        }
        gi.state = build_state(gi.base, gi.conn, gi.spec, sp(gi.x), sp(gi.y));
        gi.cf = star_closed_form(gi.base, gi.state);
        gi.oracle = star_oracle(gi.base, gi.state);
        grid.push_back(std::move(gi));
      }
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------

void criterion_1(const std::vector<GridInstance>& grid, double build_s) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (const GridInstance& gi : grid)
    for (const FieldResidual& r : compare_star(gi.cf, gi.oracle, kTolClosedForm)) {
      if (r.field == "star_g_inv" || r.field == "star_C_raised") continue;
      worst = std::max(worst, r.residual);
    }
  const double secs =
      build_s + std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  report(1, worst < kTolClosedForm && secs < kTimeBudgetS,
         "closed forms vs direct differentiation",
         fmt("max rel %.2e over 300 instances, %.2f s", worst, secs));
}

void criterion_2(const std::vector<GridInstance>& grid) {
  double worst_id = 0, worst_agree = 0;
  for (const GridInstance& gi : grid) {
    const int n = gi.cf.n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int r = 0; r < n; ++r)
          s += gi.cf.star_g_inv(i, r) * gi.cf.star_g(r, j);
        worst_id = std::max(worst_id, std::abs(s - (i == j ? 1.0 : 0.0)));
      }
    worst_agree = std::max(worst_agree, gi.cf.g_inv_agreement);
  }
  report(2, worst_id < kTolInverse && worst_agree < kTolInverse,
         "inverse of the transformed tensor",
         fmt("identity %.2e, formula-vs-dense %.2e", worst_id, worst_agree));
}

void criterion_3(const std::vector<GridInstance>& grid) {
  double worst = 0;
  for (const GridInstance& gi : grid) {
    const int n = gi.cf.n;
    // dual-route agreement of the raised tensor
    for (const FieldResidual& r : compare_star(gi.cf, gi.oracle, kTolRaised))
      if (r.field == "star_C_raised") worst = std::max(worst, r.residual);
    // lowering the raised tensor restores the covariant one
    double scale = std::max(1.0, sup_norm(gi.cf.star_C));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
          double low = 0;
          for (int r = 0; r < n; ++r)
            low += gi.cf.star_g(i, r) * gi.cf.star_C_raised(r, j, k);
          worst = std::max(worst, std::abs(low - gi.cf.star_C(i, j, k)) / scale);
        }
  }
  report(3, worst < kTolRaised, "raised Cartan tensor of the transform",
         fmt("max rel %.2e", worst));
}

void criterion_4() {
  Rng rng(404);
  double worst = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + rep % 3;
    Mat<double> f(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f(i, j) = rng.uniform(-1.0, 1.0);
    SymMat<double> m(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double acc = i == j ? 0.5 * n : 0.0;
        for (int k = 0; k < n; ++k) acc += f(k, i) * f(k, j);
        m.at(i, j) = acc;
      }
    Vec<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
    SymMat<double> l(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) l.at(i, j) = m(i, j) + v[i] * v[j];

    auto mres = invert_sym(m);
    auto fast = matsumoto_invert(mres.inv, v, mres.det);
    auto dense = invert_sym(l);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(fast.inv(i, j) - dense.inv(i, j)));
    worst = std::max(worst,
                     std::abs(fast.det - dense.det) / std::abs(dense.det));
  }
  report(4, worst < kTolRankOne, "rank-one-update inverse and determinant",
         fmt("max dev %.2e over 100 instances", worst));
}

void criterion_5(const std::vector<GridInstance>& grid) {
  Rng rng(505);
  double worst_rt = 0, worst_pb = 0;
  int used = 0;
  for (const GridInstance& gi : grid) {
    if (gi.spec_kind != 1) continue;  // one generic instance per grid point
    const int n = gi.cf.n;
    Vec<double> A_true(n);
    for (int i = 0; i < n; ++i) A_true[i] = rng.uniform(-1.0, 1.0);
    Vec<double> B_i(n);
    double B = 0;
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int r = 0; r < n; ++r) s += gi.cf.star_Lij(i, r) * A_true[r];
      B_i[i] = s;
      B += gi.cf.star_l[i] * A_true[i];
    }
    Vec<double> A = solve_star_system(gi.base, gi.state, gi.cf, B_i, B);
    for (int i = 0; i < n; ++i)
      worst_rt = std::max(worst_rt, std::abs(A[i] - A_true[i]));
    // plug the solution back into both systems
    double scale = std::max(1.0, sup_norm(B_i));
    for (int i = 0; i < n; ++i) {
      double s = -B_i[i];
      for (int r = 0; r < n; ++r) s += gi.cf.star_Lij(i, r) * A[r];
      worst_pb = std::max(worst_pb, std::abs(s) / scale);
    }
    double t = -B;
    for (int r = 0; r < n; ++r) t += gi.cf.star_l[r] * A[r];
    worst_pb = std::max(worst_pb, std::abs(t) / std::max(1.0, std::abs(B)));
    ++used;
  }
  report(5, worst_rt < kTolSolve && worst_pb < kTolSolve && used >= 50,
         "constrained solve round-trip and plug-back",
         fmt("recover %.2e, plug-back %.2e", worst_rt, worst_pb));
}

void criterion_6() {
  Rng rng(606);
  double worst_def = 0, worst_con = 0;
  const MetricSpec& m3 = find_metric("randers-bump-3");
  const MetricSpec& m2 = find_metric("randers-bump-2");
  for (int rep = 0; rep < 50; ++rep) {
    const MetricSpec& m = rep % 2 ? m2 : m3;
    GridInstance gi;
    gi.y = draw_point(m, rng, gi.base, gi.x);
    gi.conn = connection_from(gi.base);
    gi.spec = random_generic_spec(rng, gi.base);
    gi.state = build_state(gi.base, gi.conn, gi.spec, sp(gi.x), sp(gi.y));
    gi.cf = star_closed_form(gi.base, gi.state);
    DiffTensor D = difference_tensor(gi.base, gi.state, gi.cf);
    worst_def = std::max({worst_def, D.res_defining_grad, D.res_defining_hess,
                          D.res_sym_contraction});
    const int n = D.n;
    const double sup_d =
        std::max({sup_norm(D.D00), sup_norm(D.D0j), sup_norm(D.Djk), 1.0});
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += D.D0j(i, j) * gi.y[j];
      worst_con = std::max(worst_con, std::abs(s - D.D00[i]) / sup_d);
      for (int j = 0; j < n; ++j) {
        double t = 0;
        for (int k = 0; k < n; ++k) t += D.Djk(i, j, k) * gi.y[k];
        worst_con = std::max(worst_con, std::abs(t - D.D0j(i, j)) / sup_d);
      }
    }
  }
  report(6, worst_def < kTolDefining && worst_con < kTolDefining,
         "difference tensor defining equations",
         fmt("defining %.2e, contractions %.2e over 50", worst_def, worst_con));
}

void criterion_7(const std::vector<GridInstance>& grid) {
  double worst = 0;
  double smallest_generic = 1e300;
  int converse_candidates = 0;
  for (const GridInstance& gi : grid) {
    if (gi.spec_kind == 0) {
      DiffTensor D = difference_tensor(gi.base, gi.state, gi.cf);
      Theorem31Result t = theorem31_check(gi.state, D, kTolParallel);
      if (!t.hypothesis_holds || !t.forward_pass) worst = 1.0;
      worst = std::max(worst, t.d_norm);
    } else if (gi.spec_kind == 1) {
      DiffTensor D = difference_tensor(gi.base, gi.state, gi.cf);
      Theorem31Result t = theorem31_check(gi.state, D, kTolParallel);
      smallest_generic = std::min(smallest_generic, t.d_norm);
      if (t.converse_flag) ++converse_candidates;
    }
  }
  report(7, worst < kTolParallel, "parallel one-form leaves the connection",
         fmt("max |D| %.2e; converse diagnostic: min generic |D| %.2e",
             worst, smallest_generic));
}

void criterion_8() {
  double worst = 0;
  Rng rng(808);
  for (const char* name : {"euclidean-3", "product-bump-3"}) {
    const MetricSpec& m = find_metric(name);
    HVectorSpec spec;
    spec.mode = HVectorSpec::Mode::field;
    spec.n = 3;
    spec.gradient = true;
    spec.rho_expr = parse_expr("(const 0.7)", 3);
    const char* c0 = name[0] == 'e' ? "(const 0.35)" : "(const 0.4)";
    spec.c.push_back(parse_expr(c0, 3));
    spec.c.push_back(parse_expr("(const 0)", 3));
    spec.c.push_back(parse_expr("(const 0)", 3));
    auto sf = make_star_field(m, spec);
    for (int rep = 0; rep < 5; ++rep) {
      GridInstance gi;
      gi.y = draw_point(m, rng, gi.base, gi.x);
      gi.conn = connection_from(gi.base);
      // the hypothesis: this one-form is parallel on this base
      HVectorState st = build_state(gi.base, gi.conn, spec, sp(gi.x), sp(gi.y));
      if (sup_norm(st.bcov) > 1e-12) {
        worst = 1.0;
        continue;
      }
      Ten3<double> gb = berwald(m, sp(gi.x), sp(gi.y));
      Ten3<double> gs = berwald(sf, sp(gi.x), sp(gi.y));
      const double scale = std::max(1.0, sup_norm(gb));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = j; k < 3; ++k)
            worst = std::max(worst,
                             std::abs(gs(i, j, k) - gb(i, j, k)) / scale);
    }
  }
  report(8, worst < kTolBerwald, "Berwald coefficients under a parallel field",
         fmt("max rel dev %.2e", worst));
}

void criterion_9() {
  Rng rng(909);
  const MetricSpec& m = find_metric("randers-bump-3");

  double worst_spray = 0, worst_grad = 0;
  for (int rep = 0; rep < 50; ++rep) {
    GridInstance gi;
    gi.y = draw_point(m, rng, gi.base, gi.x);
    gi.conn = connection_from(gi.base);
    gi.spec = random_projective_spec(rng, gi.base);
    gi.state = build_state(gi.base, gi.conn, gi.spec, sp(gi.x), sp(gi.y));
    gi.cf = star_closed_form(gi.base, gi.state);
    DiffTensor D = difference_tensor(gi.base, gi.state, gi.cf);
    ProjectiveReport pr =
        theorem41_check(gi.base, gi.state, D, kTolSpray, kNonProj);
    if (pr.branch != ProjectiveReport::Branch::projective) worst_spray = 1.0;
    worst_spray = std::max(worst_spray, pr.spray_residual_norm);
    worst_grad = std::max(worst_grad, pr.gradient_form_residual);
  }

  double min_defect = 1e300;
  int indeterminate = 0;
  for (int rep = 0; rep < 100; ++rep) {
    GridInstance gi;
    gi.y = draw_point(m, rng, gi.base, gi.x);
    gi.conn = connection_from(gi.base);
    gi.spec = random_generic_spec(rng, gi.base);
    gi.state = build_state(gi.base, gi.conn, gi.spec, sp(gi.x), sp(gi.y));
    gi.cf = star_closed_form(gi.base, gi.state);
    DiffTensor D = difference_tensor(gi.base, gi.state, gi.cf);
    ProjectiveReport pr =
        theorem41_check(gi.base, gi.state, D, kTolSpray, kNonProj);
    if (pr.branch == ProjectiveReport::Branch::indeterminate) ++indeterminate;
    if (pr.branch == ProjectiveReport::Branch::non_projective)
      min_defect = std::min(min_defect, pr.collinearity);
    else
      min_defect = 0;
  }

  double max_defect = 0;
  bool trajectories_ok = true;
  {
    HVectorSource src;
    src.generate = [](const BaseGeometry<double>& base,
                      const ConnectionData<double>&) {
      Rng r(4242);
      return random_projective_spec(r, base);
    };
    Rng prng(910);
    for (int rep = 0; rep < 3; ++rep) {
      GridInstance gi;
      gi.y = draw_point(m, prng, gi.base, gi.x);
      TrajectoryReport tr = geodesic_compare(m, src, sp(gi.x), sp(gi.y),
                                             200, 1e-3);
      trajectories_ok = trajectories_ok && !tr.domain_exit &&
                        tr.steps_done == 200;
      max_defect = std::max(max_defect, tr.max_defect);
    }
  }

  const bool pass = worst_spray < kTolSpray && worst_grad < kTolSpray &&
                    min_defect >= kNonProj && indeterminate == 0 &&
                    trajectories_ok && max_defect < kTolGeodesic;
  report(9, pass, "projective change characterization",
         fmt("spray %.2e, min defect %.2e, geodesic %.2e", worst_spray,
             min_defect, max_defect));
}

void criterion_10() {
  Rng rng(1010);
  const MetricSpec& m = find_metric("randers-bump-3");
  double worst = 0;
  for (int rep = 0; rep < 10; ++rep) {
    GridInstance gi;
    gi.y = draw_point(m, rng, gi.base, gi.x);
    gi.conn = connection_from(gi.base);
    gi.spec = rep % 2 ? random_projective_spec(rng, gi.base)
                      : random_generic_spec(rng, gi.base);
    gi.state = build_state(gi.base, gi.conn, gi.spec, sp(gi.x), sp(gi.y));
    gi.cf = star_closed_form(gi.base, gi.state);
    DiffTensor D = difference_tensor(gi.base, gi.state, gi.cf);

    Vec<double> y2 = gi.y;
    for (int i = 0; i < 3; ++i) y2[i] *= 2.0;
    auto base2 = base_objects<double>(m, sp(gi.x), sp(y2));
    auto conn2 = connection_from(base2);
    auto st2 = build_state(base2, conn2, gi.spec, sp(gi.x), sp(y2));
    auto cf2 = star_closed_form(base2, st2);
    DiffTensor D2 = difference_tensor(base2, st2, cf2);

    auto rel = [](double got, double expect) {
      return std::abs(got - expect) / std::max(1.0, std::abs(expect));
    };
    worst = std::max(worst, rel(base2.L, 2.0 * gi.base.L));          // deg 1
    worst = std::max(worst, rel(cf2.star_L, 2.0 * gi.cf.star_L));    // deg 1
    for (int i = 0; i < 3; ++i) {
      worst = std::max(worst, rel(st2.b[i], gi.state.b[i]));         // deg 0
      worst = std::max(worst, rel(st2.m[i], gi.state.m[i]));         // deg 0
    }
    worst = std::max(worst, rel(projective_factor(base2, st2, D2),
                                2.0 * projective_factor(gi.base, gi.state, D)));
    Vec<double> R1 = projective_condition(gi.state, D);
    Vec<double> R2 = projective_condition(st2, D2);
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst, rel(R2[i], 2.0 * R1[i]));              // deg 1

    // structural identities
    double my = 0, e00 = 0;
    for (int i = 0; i < 3; ++i) {
      my += gi.state.m[i] * gi.y[i];
      for (int j = 0; j < 3; ++j)
        e00 += gi.state.E(i, j) * gi.y[i] * gi.y[j];
    }
    worst = std::max(worst, std::abs(my));
    worst = std::max(
        worst, std::abs(gi.state.m_sq -
                        (gi.state.b_sq -
                         1.0 / (gi.state.tau * gi.state.tau))));
    worst = std::max(worst, std::abs(gi.state.beta_0 - e00) /
                                std::max(1.0, std::abs(e00)));
  }
  report(10, worst < kTolEuler, "homogeneity degrees and angular identities",
         fmt("max rel dev %.2e", worst));
}

void criterion_11(const std::string& scenario_dir) {
  bool pass = true;
  std::string detail;
  for (const char* name : {"theorem31.scn", "star-forms.scn"}) {
    std::ifstream in(scenario_dir + "/" + name);
    if (!in) {
      pass = false;
      detail = "cannot open " + scenario_dir + "/" + name;
      break;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    Scenario sc = parse_scenario(ss.str());
    RunResult a = run_scenario(sc);
    RunResult b = run_scenario(sc);
    std::string ra = render_report(a.report);
    std::string rb = render_report(b.report);
    auto records_of = [](const std::string& text) {
      auto from = text.find("\"records\"");
      auto to = text.find("\"summary\"");
      return text.substr(from, to - from);
    };
    if (a.exit_code != 0 || b.exit_code != 0) pass = false;
    if (records_of(ra) != records_of(rb)) pass = false;
    detail += std::string(name) + " ";
  }
  report(11, pass, "byte-identical residual sections", detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string scenario_dir = argc > 1 ? argv[1] : "scenarios";

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<GridInstance> grid = build_grid();
  const double build_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  criterion_1(grid, build_s);
  criterion_2(grid);
  criterion_3(grid);
  criterion_4();
  criterion_5(grid);
  criterion_6();
  criterion_7(grid);
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11(scenario_dir);

  if (g_failures == 0) {
    std::printf("acceptance: all 11 criteria pass\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}
