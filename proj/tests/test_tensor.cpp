#include <doctest.h>

#include <cmath>

#include "kropina/rng.hpp"
#include "kropina/tensor.hpp"

using namespace kropina;

TEST_CASE("packed symmetric storage aliases (i,j) and (j,i)") {
  for (int n = 2; n <= kMaxDim; ++n) {
    SymMat<double> m(n);
    int counter = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m.at(i, j) = ++counter;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(m(i, j) == m(j, i));

    // Every packed slot is hit exactly once by the i <= j enumeration.
    CHECK(counter == sym2_count(n));

    Sym3<double> t(n);
    counter = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k) t.at(i, j, k) = ++counter;
    CHECK(counter == sym3_count(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          CHECK(t(i, j, k) == t(j, i, k));
          CHECK(t(i, j, k) == t(i, k, j));
          CHECK(t(i, j, k) == t(k, j, i));
        }
  }
}

TEST_CASE("Ten3 is symmetric in the trailing pair only") {
  Ten3<double> a(3);
  a.at(0, 1, 2) = 5.0;
  CHECK(a(0, 2, 1) == 5.0);
  a.at(1, 0, 0) = 7.0;
  CHECK(a(0, 1, 0) == 0.0);  // free first index: no aliasing across it
}

namespace {

SymMat<double> random_spd(Rng& rng, int n) {
  Mat<double> m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  SymMat<double> s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j <= n - 1; ++j) {
      double acc = i == j ? 0.5 * n : 0.0;  // diagonal shift keeps it SPD
      for (int k = 0; k < n; ++k) acc += m(k, i) * m(k, j);
      s.at(i, j) = acc;
    }
  return s;
}

}  // namespace

TEST_CASE("invert_sym: inverse times matrix is the identity") {
  Rng rng(101);
  for (int n = 2; n <= 4; ++n)
    for (int rep = 0; rep < 20; ++rep) {
      SymMat<double> a = random_spd(rng, n);
      auto res = invert_sym(a);
      CHECK(res.det > 0);
      double worst = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0;
          for (int k = 0; k < n; ++k) s += res.inv(i, k) * a(k, j);
          worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
      CHECK(worst < 1e-12);
    }
}

TEST_CASE("invert_sym rejects singular input") {
  SymMat<double> z(3);
  CHECK_THROWS_AS(invert_sym(z), SingularMatrix);

  SymMat<double> r(2);  // rank one
  r.at(0, 0) = 1.0;
  r.at(0, 1) = 1.0;
  r.at(1, 1) = 1.0;
  CHECK_THROWS_AS(invert_sym(r), SingularMatrix);
}

TEST_CASE("invert_sym scale invariance of the singularity guard") {
  // Uniform scaling must not flip a well-conditioned matrix to "singular".
  SymMat<double> a(3);
  a.at(0, 0) = a.at(1, 1) = a.at(2, 2) = 1.0;
  a.at(0, 1) = 0.3;
  for (double scale : {1e-6, 1.0, 1e6}) {
    SymMat<double> b(3);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) b.at(i, j) = scale * a(i, j);
    CHECK_NOTHROW(invert_sym(b));
  }
}

TEST_CASE("rank-one update inverse matches dense inversion") {
  // 100 random instances per dimension; both the inverse and the determinant
  // must agree with the dense route.
  Rng rng(202);
  for (int n = 2; n <= 4; ++n) {
    for (int rep = 0; rep < 100; ++rep) {
      SymMat<double> m = random_spd(rng, n);
      auto mres = invert_sym(m);
      Vec<double> v(n);
      for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);

      SymMat<double> l(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) l.at(i, j) = m(i, j) + v[i] * v[j];

      auto fast = matsumoto_invert(mres.inv, v, mres.det);
      auto dense = invert_sym(l);

      double worst = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          worst = std::max(worst, std::abs(fast.inv(i, j) - dense.inv(i, j)));
      CHECK(worst < 1e-10);
      CHECK(std::abs(fast.det - dense.det) < 1e-10 * std::abs(dense.det));
    }
  }
}

TEST_CASE("rank-one update detects a singular denominator") {
  // Indefinite core: 1 + v^T m^{-1} v = 0 is reachable and must be refused.
  SymMat<double> m(2);
  m.at(0, 0) = 1.0;
  m.at(1, 1) = -1.0;
  auto mres = invert_sym(m);
  Vec<double> v(2);
  v[1] = 1.0;
  CHECK_THROWS_AS(matsumoto_invert(mres.inv, v, mres.det), DomainError);
}

TEST_CASE("sup_norm over each tensor shape") {
  Vec<double> v(3);
  v[1] = -2.5;
  CHECK(sup_norm(v) == 2.5);
  Mat<double> m(2);
  m(1, 0) = -3.0;
  CHECK(sup_norm(m) == 3.0);
  SymMat<double> s(2);
  s.at(0, 1) = 4.0;
  CHECK(sup_norm(s) == 4.0);
  Sym3<double> t(2);
  t.at(0, 1, 1) = -5.0;
  CHECK(sup_norm(t) == 5.0);
  Ten3<double> w(2);
  w.at(1, 0, 1) = 6.0;
  CHECK(sup_norm(w) == 6.0);
}
