#include <algorithm>
#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "polarint/generate.hpp"
#include "polarint/polarize.hpp"

using namespace polarint;

namespace {

PolyVectorField<Rational> cubic_3yyz() {
  // (3 y^2 z, 0, 0), coordinates (y, z, w)
  return PolyVectorField<Rational>(3, {{Monomial<Rational>{Rational(3), {2, 1, 0}}}, {}, {}});
}

PolyVectorField<Rational> cubic_6yzw() {
  return PolyVectorField<Rational>(3, {{Monomial<Rational>{Rational(6), {1, 1, 1}}}, {}, {}});
}

Vec<Rational> e3(int i) {
  Vec<Rational> v(3, Rational(0));
  v[i] = 1;
  return v;
}

}  // namespace

TEST_CASE("polarization of the worked cubics", "[polarize]") {
  SECTION("3 y^2 z stores symmetric coefficient 1 at [2,1,0]") {
    auto F = polarize(cubic_3yyz());
    REQUIRE(F.order() == 3);
    const auto& cm = F.coefficients()[0];
    REQUIRE(cm.size() == 1);
    CHECK(cm.at({2, 1, 0}) == Rational(1));
    // y1 y2 z3 + y2 y3 z1 + y3 y1 z2: two arguments feed y, one feeds z.
    CHECK(eval_form(F, {e3(0), e3(0), e3(1)}) == Vec<Rational>{Rational(1), Rational(0), Rational(0)});
    // With three distinct unit vectors no assignment supplies y twice.
    CHECK(eval_form(F, {e3(0), e3(1), e3(2)}) == Vec<Rational>(3, Rational(0)));
  }

  SECTION("6 y z w is the full six-term permutation sum") {
    auto F = polarize(cubic_6yzw());
    CHECK(F.coefficients()[0].at({1, 1, 1}) == Rational(1));
    CHECK(eval_form(F, {e3(0), e3(1), e3(2)})[0] == Rational(1));
    Vec<Rational> x = {Rational(2), Rational(3), Rational(5)};
    CHECK(eval_form(F, {x, x, x})[0] == Rational(6 * 2 * 3 * 5));
  }

  SECTION("x^3 polarizes to the triple product") {
    PolyVectorField<Rational> f(1, {{Monomial<Rational>{Rational(1), {3}}}});
    auto F = polarize(f);
    CHECK(eval_form(F, {Vec<Rational>{Rational(2)}, Vec<Rational>{Rational(3)},
                        Vec<Rational>{Rational(5)}})[0] == Rational(30));
  }

  SECTION("non-homogeneous input is rejected") {
    PolyVectorField<Rational> f(1, {{Monomial<Rational>{Rational(1), {2}},
                                     Monomial<Rational>{Rational(1), {1}}}});
    CHECK_THROWS_AS(polarize(f), field_error);
  }
}

TEST_CASE("eval_form basics", "[polarize]") {
  auto F = polarize(cubic_6yzw());
  SECTION("zero argument annihilates") {
    Vec<Rational> z(3, Rational(0));
    Vec<Rational> x = {Rational(1), Rational(2), Rational(3)};
    CHECK(eval_form(F, {z, x, x}) == Vec<Rational>(3, Rational(0)));
  }
  SECTION("wrong arity throws") {
    Vec<Rational> x = {Rational(1), Rational(2), Rational(3)};
    CHECK_THROWS_AS(eval_form(F, {x, x}), field_error);
    CHECK_THROWS_AS(eval_form(F, {x, x, Vec<Rational>{Rational(1)}}), field_error);
  }
}

TEST_CASE("polarization identity and argument symmetry", "[polarize]") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    int n = int(rng.int_in(1, 4));
    int deg = int(rng.int_in(1, 5));
    auto f = rand_homogeneous_field<Rational>(rng, n, deg);
    auto F = polarize(f);
    auto x = rand_point<Rational>(rng, n);
    std::vector<Vec<Rational>> same(deg, x);
    CHECK(eval_form(F, same) == f.evaluate(x));
  }

  SECTION("full permutation symmetry for order <= 4") {
    Rng rng2(22);
    for (int trial = 0; trial < 10; ++trial) {
      int n = int(rng2.int_in(2, 3));
      int deg = int(rng2.int_in(2, 4));
      auto f = rand_homogeneous_field<Rational>(rng2, n, deg);
      auto F = polarize(f);
      auto args = rand_window_points<Rational>(rng2, n, deg);
      auto base = eval_form(F, args);
      std::vector<int> perm(deg);
      for (int i = 0; i < deg; ++i) perm[i] = i;
      do {
        std::vector<Vec<Rational>> permuted;
        for (int i : perm) permuted.push_back(args[i]);
        CHECK(eval_form(F, permuted) == base);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }

  SECTION("multilinearity in one slot, exactly") {
    Rng rng3(23);
    for (int trial = 0; trial < 10; ++trial) {
      int n = int(rng3.int_in(1, 3));
      int deg = int(rng3.int_in(2, 4));
      auto f = rand_homogeneous_field<Rational>(rng3, n, deg);
      auto F = polarize(f);
      auto args = rand_window_points<Rational>(rng3, n, deg);
      auto u = rand_point<Rational>(rng3, n);
      auto v = rand_point<Rational>(rng3, n);
      Rational alpha = rand_scalar<Rational>(rng3), beta = rand_scalar<Rational>(rng3);
      auto with = [&](const Vec<Rational>& slot0) {
        auto a = args;
        a[0] = slot0;
        return eval_form(F, a);
      };
      Vec<Rational> mixed = with(vec_add(vec_scale(alpha, u), vec_scale(beta, v)));
      Vec<Rational> split = vec_add(vec_scale(alpha, with(u)), vec_scale(beta, with(v)));
      CHECK(mixed == split);
    }
  }
}

TEST_CASE("inclusion-exclusion oracle equivalence", "[polarize]") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    int n = int(rng.int_in(1, 4));
    int deg = int(rng.int_in(1, 5));
    auto f = rand_homogeneous_field<Rational>(rng, n, deg);
    auto F = polarize(f);
    auto args = rand_window_points<Rational>(rng, n, deg);
    CHECK(eval_form(F, args) == eval_form_subsets(f, args));
  }

  SECTION("the literal seven-point cubic identity") {
    Rng rng2(32);
    auto f = rand_homogeneous_field<Rational>(rng2, 3, 3);
    auto x0 = rand_point<Rational>(rng2, 3);
    auto x1 = rand_point<Rational>(rng2, 3);
    auto x2 = rand_point<Rational>(rng2, 3);
    auto lit = oracles::cubic_polarization_literal(f, x0, x1, x2);
    CHECK(eval_form(polarize(f), {x0, x1, x2}) == lit);
    CHECK(eval_form_subsets(f, {x0, x1, x2}) == lit);
  }

  SECTION("quadratic case is the three-point difference") {
    Rng rng3(33);
    auto f = rand_homogeneous_field<Rational>(rng3, 2, 2);
    auto x0 = rand_point<Rational>(rng3, 2);
    auto x1 = rand_point<Rational>(rng3, 2);
    Rational half = from_ratio<Rational>(1, 2);
    Vec<Rational> lit = vec_scale(
        half, vec_sub(vec_sub(f.evaluate(vec_add(x0, x1)), f.evaluate(x0)), f.evaluate(x1)));
    CHECK(eval_form(polarize(f), {x0, x1}) == lit);
  }

  SECTION("equal arguments reproduce the field") {
    Rng rng4(34);
    auto f = rand_homogeneous_field<Rational>(rng4, 2, 4);
    auto x = rand_point<Rational>(rng4, 2);
    CHECK(eval_form_subsets(f, {x, x, x, x}) == f.evaluate(x));
  }
}

TEST_CASE("contract_to_matrix", "[polarize]") {
  SECTION("x^3 with two fixed slots") {
    PolyVectorField<Rational> f(1, {{Monomial<Rational>{Rational(1), {3}}}});
    auto F = polarize(f);
    auto M = contract_to_matrix(F, {Vec<Rational>{Rational(2)}, Vec<Rational>{Rational(5)}});
    CHECK(M(0, 0) == Rational(10));
  }

  SECTION("columns equal eval_form with basis vectors") {
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
      int n = int(rng.int_in(2, 4));
      int deg = int(rng.int_in(2, 4));
      auto f = rand_homogeneous_field<Rational>(rng, n, deg);
      auto F = polarize(f);
      auto args = rand_window_points<Rational>(rng, n, deg - 1);
      auto M = contract_to_matrix(F, args);
      for (int c = 0; c < n; ++c) {
        auto full = args;
        full.push_back(unit_vec<Rational>(n, c));
        auto col = eval_form(F, full);
        for (int r = 0; r < n; ++r) CHECK(M(r, c) == col[r]);
      }
    }
  }

  SECTION("zero argument gives the zero matrix") {
    auto F = polarize(cubic_6yzw());
    auto M = contract_to_matrix(F, {Vec<Rational>(3, Rational(0)),
                                    Vec<Rational>{Rational(1), Rational(2), Rational(3)}});
    CHECK(M == Mat<Rational>(3, 3));
  }
}

TEST_CASE("contract_to_bilinear", "[polarize]") {
  SECTION("H = q^4, two slots fixed at (1,0)") {
    ScalarPoly<Rational> H(2, {Monomial<Rational>{Rational(1), {4, 0}}});
    auto F = polarize(H);
    Vec<Rational> x = {Rational(1), Rational(0)};
    auto B = contract_to_bilinear(F, {x, x});
    CHECK(B(0, 0) == Rational(24));
    CHECK(B(0, 1) == Rational(0));
    CHECK(B(1, 0) == Rational(0));
    CHECK(B(1, 1) == Rational(0));
  }

  SECTION("equal arguments give k! times the Hessian") {
    Rng rng(43);
    for (int trial = 0; trial < 5; ++trial) {
      int n = int(rng.int_in(2, 3));
      int k = int(rng.int_in(1, 3));
      auto H = rand_homogeneous_scalar<Rational>(rng, n, k + 2);
      std::vector<Monomial<double>> ms;
      for (const auto& m : H.monomials) ms.push_back({to_double(m.coeff), m.exponents});
      ScalarPoly<double> Hd(n, ms);
      auto F = polarize(H);
      auto xr = rand_point<Rational>(rng, n);
      std::vector<Vec<Rational>> slots(k, xr);
      auto B = contract_to_bilinear(F, slots);
      Vec<double> xd(n);
      for (int i = 0; i < n; ++i) xd[i] = to_double(xr[i]);
      auto hess = oracles::fd_hessian(Hd, xd);
      long kfact = 1;
      for (int i = 2; i <= k; ++i) kfact *= i;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          CHECK(to_double(B(i, j)) ==
                Catch::Approx(double(kfact) * hess(i, j)).margin(1e-4).epsilon(1e-5));
    }
  }

  SECTION("result is symmetric") {
    Rng rng(44);
    auto H = rand_homogeneous_scalar<Rational>(rng, 3, 4);
    auto F = polarize(H);
    auto args = rand_window_points<Rational>(rng, 3, 2);
    auto B = contract_to_bilinear(F, args);
    CHECK(B == B.transposed());
  }

  SECTION("zero polynomial gives the zero matrix") {
    auto F = polarize(ScalarPoly<Rational>(2, {}), 4);
    auto B = contract_to_bilinear(F, {Vec<Rational>{Rational(1), Rational(2)},
                                      Vec<Rational>{Rational(3), Rational(4)}});
    CHECK(B == Mat<Rational>(2, 2));
  }
}
