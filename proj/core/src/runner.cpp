#include "kropina/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "kropina/difftensor.hpp"
#include "kropina/kropina.hpp"
#include "kropina/projective.hpp"
#include "kropina/version.hpp"

namespace kropina {

std::uint64_t point_seed(std::uint64_t scenario_seed, int point_index) {
  Rng r(scenario_seed ^
        (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(point_index + 1)));
  return r.next_u64();
}

namespace {

std::string fmt_vec(const Vec<double>& v) {
  std::string s = "[";
  for (int i = 0; i < v.n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v[i]);
    s += buf;
    if (i + 1 < v.n) s += ", ";
  }
  return s + "]";
}

struct RawDraw {
  Vec<double> b;
  double rho = 0;
  SymMat<double> E;
};

// One-form data at a point: b bounded away from the cone edge, rho bounded
// away from zero, and all three change denominators away from their guards.
// Near-degenerate draws are discarded and retried.
RawDraw draw_raw(Rng& rng, const BaseGeometry<double>& base, bool with_E) {
  const int n = base.n;
  for (int attempt = 0; attempt < 64; ++attempt) {
    RawDraw d;
    d.b = Vec<double>(n);
    for (int i = 0; i < n; ++i) d.b[i] = rng.uniform(-1.0, 1.0);
    d.rho = rng.uniform(0.3, 0.9);

    double beta = 0;
    for (int i = 0; i < n; ++i) beta += d.b[i] * base.y[i];
    if (beta < 0) {
      for (int i = 0; i < n; ++i) d.b[i] = -d.b[i];
      beta = -beta;
    }
    double b_norm = 0;
    for (int i = 0; i < n; ++i) b_norm = std::max(b_norm, std::abs(d.b[i]));
    if (b_norm < 0.1) continue;
    const double floor = 0.25 * base.L * b_norm;
    if (beta < floor) {
      const double t = (floor - beta) / base.L + 0.05 * b_norm;
      for (int i = 0; i < n; ++i) d.b[i] += t * base.l[i];
      beta += t * base.L;
    }

    const double tau = base.L / beta;
    double b_sq = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b_sq += base.g_inv(i, j) * d.b[i] * d.b[j];
    // Stay well clear of the degeneracy guards: conditioning of the staged
    // solves scales like inverse powers of these, so marginal draws trade
    // residual headroom for nothing.
    if (std::abs(2.0 - d.rho * tau) < 0.15) continue;
    if (std::abs(2.0 * b_sq * tau - d.rho) < 0.15) continue;
    if (std::abs(2.0 * b_sq / beta - d.rho / base.L) < 0.15) continue;

    if (with_E) {
      d.E = SymMat<double>(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) d.E.at(i, j) = rng.uniform(-0.4, 0.4);
    }
    return d;
  }
  throw ScenarioError("one-form generator: no admissible draw in 64 attempts");
}

HVectorSpec parallel_spec_from(const RawDraw& d, int n) {
  HVectorSpec spec;
  spec.mode = HVectorSpec::Mode::pointwise;
  spec.n = n;
  spec.b = d.b;
  spec.rho = d.rho;
  spec.bcov = Mat<double>(n);
  spec.rho_grad = Vec<double>(n);
  return spec;
}

}  // namespace

HVectorSpec random_parallel_spec(Rng& rng, const BaseGeometry<double>& base) {
  return parallel_spec_from(draw_raw(rng, base, false), base.n);
}

HVectorSpec random_generic_spec(Rng& rng, const BaseGeometry<double>& base) {
  const int n = base.n;
  HVectorSpec spec = parallel_spec_from(draw_raw(rng, base, false), n);
  for (int i = 0; i < n; ++i) {
    spec.rho_grad[i] = rng.uniform(-0.3, 0.3);
    for (int j = 0; j < n; ++j) spec.bcov(i, j) = rng.uniform(-0.4, 0.4);
  }
  return spec;
}

HVectorSpec random_projective_spec(Rng& rng, const BaseGeometry<double>& base) {
  RawDraw d = draw_raw(rng, base, true);
  return make_projective_instance(base, d.b, d.rho, d.E);
}

HVectorSpec instantiate_hvector(const Scenario& sc, int point_index,
                                const BaseGeometry<double>& base) {
  switch (sc.generator.kind) {
    case GeneratorDirective::Kind::none:
      return sc.hvector;
    case GeneratorDirective::Kind::zero_bcov: {
      Rng rng(point_seed(sc.generator.seed, point_index));
      return random_parallel_spec(rng, base);
    }
    case GeneratorDirective::Kind::random: {
      Rng rng(point_seed(sc.generator.seed, point_index));
      return random_generic_spec(rng, base);
    }
    case GeneratorDirective::Kind::projective: {
      Rng rng(point_seed(sc.generator.seed, point_index));
      return random_projective_spec(rng, base);
    }
  }
  throw ScenarioError("corrupt generator directive");
}

namespace {

bool wants(const Scenario& sc, const char* id) {
  return std::find(sc.checks.begin(), sc.checks.end(), id) != sc.checks.end();
}

void push(std::vector<CheckRecord>& out, const char* check, int k,
          const char* residual, double value, double threshold, bool pass) {
  out.push_back(CheckRecord{check, k, residual, value, threshold, pass});
}

// Diagnostics carry threshold 0 and always pass; they are data, not gates.
void push_info(std::vector<CheckRecord>& out, const char* check, int k,
               const char* residual, double value) {
  push(out, check, k, residual, value, 0.0, true);
}

void check_star_forms(const BaseGeometry<double>& bg, const HVectorState& h,
                      const StarGeometry& star, double tol_rel, int k,
                      std::vector<CheckRecord>& out) {
  StarGeometry oracle = star_oracle(bg, h);
  for (const FieldResidual& fr : compare_star(star, oracle, tol_rel))
    push(out, "star-closed-forms", k, fr.field.c_str(), fr.residual, tol_rel,
         fr.pass);
}

void check_inverse_metric(const StarGeometry& star, double tol_rel, int k,
                          std::vector<CheckRecord>& out) {
  const int n = star.n;
  double ident = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int r = 0; r < n; ++r) s += star.star_g_inv(i, r) * star.star_g(r, j);
      ident = std::max(ident, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  push(out, "inverse-metric", k, "identity-residual", ident, tol_rel,
       ident < tol_rel);
  const double scale = std::max(sup_norm(star.star_g_inv_dense), 1.0);
  const double agree = star.g_inv_agreement / scale;
  push(out, "inverse-metric", k, "formula-vs-dense", agree, tol_rel,
       agree < tol_rel);
}

void check_difference_tensor(const BaseGeometry<double>& bg,
                             const DiffTensor& D, double tol_rel, int k,
                             std::vector<CheckRecord>& out) {
  const int n = D.n;
  auto gate = [&](const char* name, double v) {
    push(out, "difference-tensor", k, name, v, tol_rel, v < tol_rel);
  };
  gate("stage1-mixed", D.stage1_mixed);
  gate("stage1-scalar", D.stage1_scalar);
  gate("stage2-mixed", D.stage2_mixed);
  gate("stage2-scalar", D.stage2_scalar);
  gate("stage3-mixed", D.stage3_mixed);
  gate("stage3-scalar", D.stage3_scalar);
  gate("defining-gradient", D.res_defining_grad);
  gate("defining-hessian", D.res_defining_hess);
  gate("symmetric-contraction", D.res_sym_contraction);

  double c1 = 0;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += D.D0j(i, j) * bg.y[j];
    c1 = std::max(c1, std::abs(s - D.D00[i]));
  }
  c1 /= std::max(sup_norm(D.D00), 1.0);
  gate("contraction-d0j", c1);

  double c2 = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int r = 0; r < n; ++r) s += D.Djk(i, j, r) * bg.y[r];
      c2 = std::max(c2, std::abs(s - D.D0j(i, j)));
    }
  c2 /= std::max(sup_norm(D.D0j), 1.0);
  gate("contraction-djk", c2);
}

void check_theorem31(const HVectorState& h, const DiffTensor& D,
                     double tol_abs, int k, std::vector<CheckRecord>& out) {
  Theorem31Result r = theorem31_check(h, D, tol_abs);
  push_info(out, "theorem31", k, "bcov-norm", r.bcov_norm);
  push_info(out, "theorem31", k, "rho-grad-norm", r.rho_grad_norm);
  push(out, "theorem31", k, "max-difference", r.d_norm,
       r.hypothesis_holds ? tol_abs : 0.0,
       r.hypothesis_holds ? r.forward_pass : true);
  push_info(out, "theorem31", k, "converse-flag", r.converse_flag ? 1.0 : 0.0);
}

void check_projective(const BaseGeometry<double>& bg, const HVectorState& h,
                      const DiffTensor& D, const Tolerances& tol, int k,
                      std::vector<CheckRecord>& out) {
  ProjectiveReport r =
      theorem41_check(bg, h, D, tol.tol_abs, tol.nonproj_threshold);
  push_info(out, "projective", k, "condition-norm", r.condition_norm);
  switch (r.branch) {
    case ProjectiveReport::Branch::projective:
      push(out, "projective", k, "spray-residual", r.spray_residual_norm,
           tol.tol_abs, r.spray_residual_norm < tol.tol_abs);
      push(out, "projective", k, "gradient-form", r.gradient_form_residual,
           tol.tol_abs, r.gradient_form_residual < tol.tol_abs);
      push_info(out, "projective", k, "collinearity", r.collinearity);
      break;
    case ProjectiveReport::Branch::non_projective:
      push(out, "projective", k, "collinearity-defect", r.collinearity,
           tol.nonproj_threshold, r.pass);
      break;
    case ProjectiveReport::Branch::indeterminate:
      push(out, "projective", k, "indeterminate-band", r.condition_norm, 0.0,
           true);
      break;
  }
}

void check_lemma32(const HVectorSpec& spec, const HVectorState& h, int k,
                   std::vector<CheckRecord>& out) {
  RuleCheck rc = lemma32_consistency(spec, h);
  push_info(out, "lemma32", k, "skew-norm", rc.f_norm);
  push(out, "lemma32", k, "gradient-rule", rc.rho_grad_norm,
       rc.applicable ? tol::rho_floor : 0.0, rc.pass);
}

void check_theorem32(const Scenario& sc, const MetricSpec& metric,
                     const PointSpec& p, const BaseGeometry<double>& bg,
                     const HVectorState& h, double tol_abs, int k,
                     std::vector<CheckRecord>& out) {
  std::span<const double> xs(p.x.a.data(), p.x.n);
  std::span<const double> ys(p.y.a.data(), p.y.n);
  Ten3<double> base_b = berwald(metric, xs, ys);
  StarField<MetricSpec> sf = make_star_field(metric, sc.hvector);
  Ten3<double> star_b = berwald(sf, xs, ys);
  double diff = 0;
  const int n = bg.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int r = j; r < n; ++r)
        diff = std::max(diff, std::abs(star_b(i, j, r) - base_b(i, j, r)));

  const bool hyp = sup_norm(h.bcov) < 1e-10 && sup_norm(h.rho_k) < 1e-10;
  push_info(out, "theorem32", k, "bcov-norm", sup_norm(h.bcov));
  push(out, "theorem32", k, "berwald-agreement", diff,
       hyp ? tol_abs : 0.0, hyp ? diff < tol_abs : true);
}

void check_geodesic(const Scenario& sc, const MetricSpec& metric,
                    const PointSpec& p, int k,
                    std::vector<CheckRecord>& out) {
  HVectorSource source;
  RawDraw raw;
  switch (sc.generator.kind) {
    case GeneratorDirective::Kind::none:
      if (sc.hvector.mode == HVectorSpec::Mode::field) {
        source.field = &sc.hvector;
      } else {
        // A single pointwise spec is a constant-component field.
        const HVectorSpec spec = sc.hvector;
        source.generate = [spec](const BaseGeometry<double>&,
                                 const ConnectionData<double>&) { return spec; };
      }
      break;
    case GeneratorDirective::Kind::zero_bcov: {
      std::span<const double> xs(p.x.a.data(), p.x.n);
      std::span<const double> ys(p.y.a.data(), p.y.n);
      BaseGeometry<double> bg = base_objects<double>(metric, xs, ys);
      Rng rng(point_seed(sc.generator.seed, k));
      raw = draw_raw(rng, bg, false);
      const int n = bg.n;
      source.generate = [raw, n](const BaseGeometry<double>&,
                                 const ConnectionData<double>&) {
        return parallel_spec_from(raw, n);
      };
      break;
    }
    case GeneratorDirective::Kind::projective: {
      std::span<const double> xs(p.x.a.data(), p.x.n);
      std::span<const double> ys(p.y.a.data(), p.y.n);
      BaseGeometry<double> bg = base_objects<double>(metric, xs, ys);
      Rng rng(point_seed(sc.generator.seed, k));
      raw = draw_raw(rng, bg, true);
      source.generate = [raw](const BaseGeometry<double>& b2,
                              const ConnectionData<double>&) {
        return make_projective_instance(b2, raw.b, raw.rho, raw.E);
      };
      break;
    }
    case GeneratorDirective::Kind::random:
      throw ScenarioError("geodesic check cannot use the random generator");
  }

  std::span<const double> xs(p.x.a.data(), p.x.n);
  std::span<const double> ys(p.y.a.data(), p.y.n);
  TrajectoryReport tr = geodesic_compare(metric, source, xs, ys,
                                         sc.geodesic.steps, sc.geodesic.dt);
  push(out, "geodesic", k, "max-defect", tr.max_defect, sc.geodesic.defect_tol,
       tr.max_defect < sc.geodesic.defect_tol);
  push_info(out, "geodesic", k, "max-d00-norm", tr.max_d00_norm);
  push(out, "geodesic", k, "steps-done", tr.steps_done, 0.0,
       !tr.domain_exit && tr.steps_done == sc.geodesic.steps);
  push(out, "geodesic", k, "step-halving", tr.step_halving_diff, 1e-6,
       tr.step_halving_diff < 1e-6);
}

std::vector<CheckRecord> eval_point(const Scenario& sc,
                                    const MetricSpec& metric,
                                    const Tolerances& tol, int k,
                                    const PointSpec& p) {
  std::vector<CheckRecord> out;
  std::span<const double> xs(p.x.a.data(), p.x.n);
  std::span<const double> ys(p.y.a.data(), p.y.n);

  BaseGeometry<double> bg = base_objects<double>(metric, xs, ys);
  ConnectionData<double> conn = connection_from(bg);
  HVectorSpec spec = instantiate_hvector(sc, k, bg);
  HVectorState h = build_state(bg, conn, spec, xs, ys);

  const bool need_star = wants(sc, "star-closed-forms") ||
                         wants(sc, "inverse-metric") ||
                         wants(sc, "difference-tensor") ||
                         wants(sc, "theorem31") || wants(sc, "projective");
  StarGeometry star;
  if (need_star) star = star_closed_form(bg, h);

  const bool need_d = wants(sc, "difference-tensor") ||
                      wants(sc, "theorem31") || wants(sc, "projective");
  DiffTensor D;
  if (need_d) D = difference_tensor(bg, h, star);

  if (wants(sc, "star-closed-forms"))
    check_star_forms(bg, h, star, tol.tol_rel, k, out);
  if (wants(sc, "inverse-metric"))
    check_inverse_metric(star, tol.tol_rel, k, out);
  if (wants(sc, "difference-tensor"))
    check_difference_tensor(bg, D, tol.tol_rel, k, out);
  if (wants(sc, "theorem31")) check_theorem31(h, D, tol.tol_abs, k, out);
  if (wants(sc, "theorem32"))
    check_theorem32(sc, metric, p, bg, h, tol.tol_abs, k, out);
  if (wants(sc, "lemma32")) check_lemma32(spec, h, k, out);
  if (wants(sc, "projective")) check_projective(bg, h, D, tol, k, out);
  if (wants(sc, "geodesic")) check_geodesic(sc, metric, p, k, out);
  return out;
}

}  // namespace

RunResult run_scenario(const Scenario& sc_in, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();

  Scenario sc = sc_in;
  if (opt.has_seed) {
    sc.sampler.seed = opt.seed;
    sc.generator.seed = opt.seed;
  }
  Tolerances tol = sc.tolerances;
  if (opt.has_tol_rel) tol.tol_rel = opt.tol_rel;
  if (opt.has_tol_abs) tol.tol_abs = opt.tol_abs;

  // One evaluation unit per (metric, resolved point); global indices make
  // records unambiguous when several metrics share the scenario.
  struct Unit {
    const MetricSpec* metric;
    PointSpec point;
  };
  std::vector<Unit> units;
  int rejected = 0;
  for (const MetricSpec& m : sc.metrics) {
    ResolvedPoints pts = resolve_points(sc, m);
    rejected += pts.rejected;
    for (PointSpec& p : pts.points) units.push_back(Unit{&m, std::move(p)});
  }
  const int npts = static_cast<int>(units.size());

  std::vector<std::vector<CheckRecord>> per_point(npts);
  const int jobs = std::max(1, opt.jobs);
  auto work = [&](int k) {
    try {
      per_point[k] = eval_point(sc, *units[k].metric, tol, k, units[k].point);
    } catch (const ScenarioError&) {
      throw;
    } catch (const DomainError& e) {
      throw ScenarioError("point " + std::to_string(k) +
                          " (x=" + fmt_vec(units[k].point.x) +
                          ", y=" + fmt_vec(units[k].point.y) + "): " + e.what());
    }
  };

  if (jobs == 1 || npts <= 1) {
    for (int k = 0; k < npts; ++k) work(k);
  } else {
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
      for (;;) {
        const int k = next.fetch_add(1);
        if (k >= npts) return;
        try {
          work(k);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const int nw = std::min(jobs, npts);
    pool.reserve(nw);
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  RunResult res;
  Report& rep = res.report;
  rep.scenario_name = sc.name.empty() ? "unnamed" : sc.name;
  rep.scenario_hash = fnv1a(sc.source_text);
  rep.seed = sc.has_sampler ? sc.sampler.seed : sc.generator.seed;
  rep.tool_version = version_string();
  rep.points_total = npts;
  rep.points_rejected = rejected;
  for (int k = 0; k < npts; ++k)
    rep.records.insert(rep.records.end(), per_point[k].begin(),
                       per_point[k].end());
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  res.exit_code = rep.all_pass() ? 0 : 1;
  return res;
}

}  // namespace kropina
