#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "kropina/difftensor.hpp"
#include "kropina/metric.hpp"

using namespace kropina;
using kropina::testing::admissible_point;
using kropina::testing::generic_instance;
using kropina::testing::parallel_instance;
using kropina::testing::sp;

TEST_CASE("worked example: spray difference at a hand-checked point") {
  const MetricSpec& m = find_metric("euclidean-2");
  const double x[2] = {0, 0};
  const double y[2] = {1, 0};
  auto bg = base_objects<double>(m, std::span<const double>(x, 2),
                                 std::span<const double>(y, 2));
  auto cd = connection_from(bg);

  HVectorSpec spec;
  spec.mode = HVectorSpec::Mode::pointwise;
  spec.n = 2;
  spec.b = Vec<double>(2);
  spec.b[0] = 1.0;
  spec.b[1] = 0.2;
  spec.bcov = Mat<double>(2);
  spec.bcov(0, 0) = 1.0;
  spec.rho = 0.5;
  spec.rho_grad = Vec<double>(2);

  auto st = build_state(bg, cd, spec, std::span<const double>(x, 2),
                        std::span<const double>(y, 2));
  StarGeometry star = star_closed_form(bg, st);
  DiffTensor D = difference_tensor(bg, st, star);

  CHECK(D.D00[0] == doctest::Approx(-0.9493670886075949).epsilon(1e-13));
  CHECK(D.D00[1] == doctest::Approx(0.25316455696202533).epsilon(1e-13));
}

TEST_CASE("stage plug-backs and defining equations on generic data") {
  Rng rng(41);
  for (const char* name : {"riemann-bump-3", "randers-bump-3", "randers-bump-2"}) {
    const MetricSpec& m = find_metric(name);
    for (int rep = 0; rep < 6; ++rep) {
      auto inst = generic_instance(m, rng);
      StarGeometry star = star_closed_form(inst.pt.base, inst.state);
      DiffTensor D = difference_tensor(inst.pt.base, inst.state, star);
      const int n = D.n;

      CHECK(D.stage1_mixed < 1e-9);
      CHECK(D.stage1_scalar < 1e-9);
      CHECK(D.stage2_mixed < 1e-9);
      CHECK(D.stage2_scalar < 1e-9);
      CHECK(D.stage3_mixed < 1e-9);
      CHECK(D.stage3_scalar < 1e-9);
      CHECK(D.res_defining_grad < 1e-8);
      CHECK(D.res_defining_hess < 1e-8);
      CHECK(D.res_sym_contraction < 1e-8);
      CHECK(D.res_spray_mixed < 1e-9);
      CHECK(D.res_spray_scalar < 1e-9);

      // The three blocks contract into each other along y.
      double sup_d = std::max({sup_norm(D.D00), sup_norm(D.D0j),
                               sup_norm(D.Djk), 1.0});
      for (int i = 0; i < n; ++i) {
        double s = 0;
        for (int j = 0; j < n; ++j) s += D.D0j(i, j) * inst.pt.y[j];
        CHECK(std::abs(s - D.D00[i]) < 1e-10 * sup_d);
        for (int j = 0; j < n; ++j) {
          double t = 0;
          for (int k = 0; k < n; ++k) t += D.Djk(i, j, k) * inst.pt.y[k];
          CHECK(std::abs(t - D.D0j(i, j)) < 1e-10 * sup_d);
        }
      }
    }
  }
}

TEST_CASE("the constrained linear solve against a dense least-squares oracle") {
  // Stack the n singular rows with the scalar row and solve by normal
  // equations; the closed form must reproduce both that solution and the
  // synthetic truth that generated the right-hand side.
  Rng rng(42);
  const MetricSpec& m = find_metric("randers-bump-3");
  for (int rep = 0; rep < 10; ++rep) {
    auto inst = generic_instance(m, rng);
    StarGeometry star = star_closed_form(inst.pt.base, inst.state);
    const int n = star.n;

    Vec<double> A_true(n);
    for (int i = 0; i < n; ++i) A_true[i] = rng.uniform(-1.0, 1.0);
    Vec<double> B_i(n);
    double B = 0;
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int r = 0; r < n; ++r) s += star.star_Lij(i, r) * A_true[r];
      B_i[i] = s;
      B += star.star_l[i] * A_true[i];
    }

    Vec<double> A = solve_star_system(inst.pt.base, inst.state, star, B_i, B);
    for (int i = 0; i < n; ++i) CHECK(std::abs(A[i] - A_true[i]) < 1e-9);

    SymMat<double> mtm(n);
    Vec<double> rhs(n);
    for (int i = 0; i < n; ++i) {
      double r = 0;
      for (int q = 0; q < n; ++q) r += star.star_Lij(q, i) * B_i[q];
      rhs[i] = r + star.star_l[i] * B;
      for (int j = i; j < n; ++j) {
        double s = star.star_l[i] * star.star_l[j];
        for (int q = 0; q < n; ++q)
          s += star.star_Lij(q, i) * star.star_Lij(q, j);
        mtm.at(i, j) = s;
      }
    }
    auto inv = invert_sym(mtm);
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += inv.inv(i, j) * rhs[j];
      CHECK(std::abs(s - A[i]) < 1e-8);
    }
  }
}

TEST_CASE("the solve is pinned: perturbing the solution breaks the system") {
  Rng rng(43);
  auto inst = generic_instance(find_metric("riemann-bump-3"), rng);
  StarGeometry star = star_closed_form(inst.pt.base, inst.state);
  const int n = star.n;

  Vec<double> A_true(n);
  for (int i = 0; i < n; ++i) A_true[i] = rng.uniform(-1.0, 1.0);
  Vec<double> B_i(n);
  double B = 0;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int r = 0; r < n; ++r) s += star.star_Lij(i, r) * A_true[r];
    B_i[i] = s;
    B += star.star_l[i] * A_true[i];
  }
  Vec<double> A = solve_star_system(inst.pt.base, inst.state, star, B_i, B);

  auto residual = [&](const Vec<double>& cand) {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
      double s = -B_i[i];
      for (int r = 0; r < n; ++r) s += star.star_Lij(i, r) * cand[r];
      worst = std::max(worst, std::abs(s));
    }
    double t = -B;
    for (int r = 0; r < n; ++r) t += star.star_l[r] * cand[r];
    return std::max(worst, std::abs(t));
  };

  CHECK(residual(A) < 1e-10);
  for (int dir = 0; dir < n; ++dir) {
    Vec<double> pert = A;
    pert[dir] += 1e-4;
    CHECK(residual(pert) > 1e-6);  // every direction is pinned down
  }
}

TEST_CASE("linearity in the derivative data") {
  // D is linear in (bcov, rho_k) at fixed (b, rho): doubling the data
  // doubles every block.
  Rng rng(44);
  auto inst = generic_instance(find_metric("randers-bump-2"), rng);
  StarGeometry star = star_closed_form(inst.pt.base, inst.state);
  DiffTensor D1 = difference_tensor(inst.pt.base, inst.state, star);

  HVectorSpec doubled = inst.spec;
  for (int i = 0; i < doubled.n; ++i) {
    doubled.rho_grad[i] *= 2.0;
    for (int j = 0; j < doubled.n; ++j) doubled.bcov(i, j) *= 2.0;
  }
  HVectorState st2 = build_state(inst.pt.base, inst.pt.conn, doubled,
                                 sp(inst.pt.x), sp(inst.pt.y));
  StarGeometry star2 = star_closed_form(inst.pt.base, st2);
  DiffTensor D2 = difference_tensor(inst.pt.base, st2, star2);

  const int n = D1.n;
  const double scale = std::max(1.0, sup_norm(D1.Djk));
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(D2.D00[i] - 2.0 * D1.D00[i]) < 1e-9 * scale);
    for (int j = 0; j < n; ++j) {
      CHECK(std::abs(D2.D0j(i, j) - 2.0 * D1.D0j(i, j)) < 1e-9 * scale);
      for (int k = j; k < n; ++k)
        CHECK(std::abs(D2.Djk(i, j, k) - 2.0 * D1.Djk(i, j, k)) < 1e-9 * scale);
    }
  }
}

TEST_CASE("staged solution equals the direct connection difference") {
  // Field mode gives the transformed metric as an honest metric function, so
  // its spray and nonlinear connection can be computed with the generic
  // machinery and subtracted from the base ones: that difference must equal
  // the staged D^i_00 and D^i_0j (an entirely independent derivation).
  Rng rng(45);
  for (const char* name : {"riemann-bump-3", "product-bump-3"}) {
    const MetricSpec& m = find_metric(name);
    auto p = admissible_point(m, rng);

    HVectorSpec spec;
    spec.mode = HVectorSpec::Mode::field;
    spec.n = 3;
    spec.rho_expr = parse_expr("(+ (const 0.7) (* (const 0.1) (x 1)))", 3);
    spec.c.push_back(parse_expr("(const 0.45)", 3));
    spec.c.push_back(parse_expr("(* (const 0.15) (x 2))", 3));
    spec.c.push_back(parse_expr("(const -0.08)", 3));

    HVectorState st = build_state(p.base, p.conn, spec, sp(p.x), sp(p.y));
    StarGeometry star = star_closed_form(p.base, st);
    DiffTensor D = difference_tensor(p.base, st, star);
    StarConnection sconn = star_connections(p.conn, D);

    auto sf = make_star_field(m, spec);
    auto star_bg = base_objects<double>(sf, sp(p.x), sp(p.y));
    auto star_cd = connection_from(star_bg);

    const double scale =
        std::max({sup_norm(star_cd.G), sup_norm(star_cd.N), 1.0});
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(star_cd.G[i] - sconn.G[i]) < 1e-9 * scale);
      CHECK(std::abs(star_cd.G[i] - (p.conn.G[i] + 0.5 * D.D00[i])) <
            1e-9 * scale);
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(star_cd.N(i, j) - sconn.N(i, j)) < 1e-8 * scale);
    }
  }
}

TEST_CASE("parallel one-form with constant rho kills the difference tensor") {
  Rng rng(46);
  for (const char* name : {"euclidean-3", "riemann-bump-3", "randers-bump-3"}) {
    const MetricSpec& m = find_metric(name);
    for (int rep = 0; rep < 4; ++rep) {
      auto inst = parallel_instance(m, rng);
      StarGeometry star = star_closed_form(inst.pt.base, inst.state);
      DiffTensor D = difference_tensor(inst.pt.base, inst.state, star);
      Theorem31Result t = theorem31_check(inst.state, D, 1e-9);
      CHECK(t.hypothesis_holds);
      CHECK(t.forward_pass);
      CHECK(t.d_norm < 1e-9);
    }
  }
}

TEST_CASE("generic data does not satisfy the parallel hypothesis") {
  Rng rng(47);
  auto inst = generic_instance(find_metric("randers-bump-3"), rng);
  StarGeometry star = star_closed_form(inst.pt.base, inst.state);
  DiffTensor D = difference_tensor(inst.pt.base, inst.state, star);
  Theorem31Result t = theorem31_check(inst.state, D, 1e-9);
  CHECK(!t.hypothesis_holds);
  CHECK(t.d_norm > 1e-6);  // generic data genuinely moves the connection
  CHECK(!t.converse_flag);
}

TEST_CASE("star_connections shifts spray and nonlinear connection") {
  Rng rng(48);
  auto inst = generic_instance(find_metric("randers-bump-2"), rng);
  StarGeometry star = star_closed_form(inst.pt.base, inst.state);
  DiffTensor D = difference_tensor(inst.pt.base, inst.state, star);
  StarConnection sc = star_connections(inst.pt.conn, D);
  for (int i = 0; i < 2; ++i) {
    CHECK(sc.G[i] ==
          doctest::Approx(inst.pt.conn.G[i] + 0.5 * D.D00[i]).epsilon(1e-13));
    for (int j = 0; j < 2; ++j)
      CHECK(sc.N(i, j) ==
            doctest::Approx(inst.pt.conn.N(i, j) + D.D0j(i, j)).epsilon(1e-13));
  }
}
