#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "polarint/analysis.hpp"
#include "polarint/generate.hpp"
#include "polarint/hamiltonian.hpp"
#include "polarint/polarmap.hpp"

using namespace polarint;

namespace {

template <typename S>
PolyVectorField<S> scalar_power_field(int degree) {
  return PolyVectorField<S>(1, {{Monomial<S>{S(1), {degree}}}});
}

Rational rat(long n, long d = 1) { return from_ratio<Rational>(n, d); }

}  // namespace

TEST_CASE("kahan_step on the scalar Riccati-type examples", "[polarmap]") {
  SECTION("xdot = x^2, x = 1, h = 1/2 maps to 2") {
    auto f = scalar_power_field<Rational>(2);
    auto r = kahan_step(f, Vec<Rational>{rat(1)}, rat(1, 2));
    REQUIRE_FALSE(r.singular);
    CHECK(r.new_point[0] == rat(2));
  }

  SECTION("zero field is the identity") {
    auto r = kahan_step(PolyVectorField<Rational>::zero(2), {rat(3), rat(-4)}, rat(1, 7));
    REQUIRE_FALSE(r.singular);
    CHECK(r.new_point == Vec<Rational>{rat(3), rat(-4)});
  }

  SECTION("2d coupled quadratic (xy, -xy) from (1,1), h = 1") {
    PolyVectorField<Rational> f(2, {{Monomial<Rational>{rat(1), {1, 1}}},
                                    {Monomial<Rational>{rat(-1), {1, 1}}}});
    auto r = kahan_step(f, {rat(1), rat(1)}, rat(1));
    REQUIRE_FALSE(r.singular);
    CHECK(r.new_point == Vec<Rational>{rat(2), rat(0)});
  }

  SECTION("singular system is reported") {
    auto f = scalar_power_field<Rational>(2);
    auto r = kahan_step(f, Vec<Rational>{rat(1)}, rat(1));  // 1 - h x = 0
    CHECK(r.singular);
  }

  SECTION("degree > 2 is rejected") {
    CHECK_THROWS_AS(kahan_step(scalar_power_field<Rational>(3), Vec<Rational>{rat(1)}, rat(1, 2)),
                    field_error);
  }
}

TEST_CASE("polar_step", "[polarmap]") {
  SECTION("xdot = x^3, k = 2, unit window, h = 1/4 maps to 2") {
    auto F = polarize(scalar_power_field<Rational>(3));
    auto w = PolarWindow<Rational>::from_points({{rat(1)}, {rat(1)}}, rat(1, 4));
    auto r = polar_step(F, w);
    REQUIRE_FALSE(r.singular);
    CHECK(r.new_point[0] == rat(2));
  }

  SECTION("zero field returns x_0") {
    auto F = polarize(PolyVectorField<Rational>::zero(2), 3);
    auto w = PolarWindow<Rational>::from_points({{rat(1), rat(2)}, {rat(3), rat(4)}}, rat(1, 2));
    auto r = polar_step(F, w);
    REQUIRE_FALSE(r.singular);
    CHECK(r.new_point == Vec<Rational>{rat(1), rat(2)});
  }

  SECTION("k = 1 equals the Kahan map on homogeneous quadratics, exactly") {
    Rng rng(51);
    for (int trial = 0; trial < 25; ++trial) {
      int n = int(rng.int_in(1, 4));
      auto f = rand_homogeneous_field<Rational>(rng, n, 2);
      auto x = rand_point<Rational>(rng, n);
      Rational h = rat(1, rng.int_in(3, 9));
      auto via_polar = polar_step(polarize(f), PolarWindow<Rational>::from_points({x}, h));
      auto via_kahan = kahan_step(f, x, h);
      REQUIRE(via_polar.singular == via_kahan.singular);
      if (!via_polar.singular) CHECK(via_polar.new_point == via_kahan.new_point);
    }
  }

  SECTION("the indeterminacy locus is flagged, not perturbed") {
    auto F = polarize(scalar_power_field<Rational>(3));
    auto w = PolarWindow<Rational>::from_points({{rat(1)}, {rat(1)}}, rat(1, 2));
    CHECK(polar_step(F, w).singular);
  }
}

TEST_CASE("inverse_polar_step", "[polarmap]") {
  auto F = polarize(scalar_power_field<Rational>(3));

  SECTION("recovers x_0 = 1 from (x_1, x_2) = (1, 2)") {
    auto w = PolarWindow<Rational>::from_points({{rat(1)}, {rat(2)}}, rat(1, 4));
    auto r = inverse_polar_step(F, w);
    REQUIRE_FALSE(r.singular);
    CHECK(r.new_point[0] == rat(1));
  }

  SECTION("zero field returns x_k") {
    auto Fz = polarize(PolyVectorField<Rational>::zero(1), 3);
    auto w = PolarWindow<Rational>::from_points({{rat(5)}, {rat(7)}}, rat(1, 3));
    CHECK(inverse_polar_step(Fz, w).new_point[0] == rat(7));
  }

  SECTION("roundtrip identity on random rational windows") {
    Rng rng(52);
    int checked = 0;
    for (int trial = 0; trial < 80 && checked < 50; ++trial) {
      int n = int(rng.int_in(1, 3));
      int deg = int(rng.int_in(2, 4));
      auto f = rand_homogeneous_field<Rational>(rng, n, deg);
      auto Fr = polarize(f);
      auto pts = rand_window_points<Rational>(rng, n, deg - 1);
      Rational h = rat(1, rng.int_in(8, 32));
      auto w = PolarWindow<Rational>::from_points(pts, h);
      auto fwd = polar_step(Fr, w);
      if (fwd.singular) continue;
      std::vector<Vec<Rational>> shifted(pts.begin() + 1, pts.end());
      shifted.push_back(fwd.new_point);
      auto back = inverse_polar_step(Fr, PolarWindow<Rational>::from_points(shifted, h));
      if (back.singular) continue;
      CHECK(back.new_point == pts.front());
      ++checked;
    }
    CHECK(checked == 50);
  }
}

TEST_CASE("bootstrap_window", "[polarmap]") {
  SECTION("k = 1 takes no reference steps") {
    auto f = scalar_power_field<double>(2);
    auto w = bootstrap_window(f, Vec<double>{1.0}, 1, 0.25);
    CHECK(w.points.size() == 1);
    CHECK(w.points[0][0] == 1.0);
  }

  SECTION("exact-provided windows pass through verbatim") {
    auto w = PolarWindow<Rational>::from_points({{rat(1)}, {rat(31, 30)}}, rat(1, 10));
    CHECK(w.points[1][0] == rat(31, 30));
    CHECK(w.k == 2);
  }

  SECTION("xdot = x^3 reference start matches the closed-form flow") {
    auto f = scalar_power_field<double>(3);
    BootstrapConfig cfg;
    cfg.substeps = 100;
    auto w = bootstrap_window(f, Vec<double>{1.0}, 2, 0.01, cfg);
    double exact = oracles::power_flow(1.0, 0.01, 2);  // (1 - 0.02)^(-1/2)
    CHECK(std::fabs(w.points[1][0] - exact) < 1e-10);
  }

  SECTION("reference overflow is reported") {
    auto f = scalar_power_field<double>(3);
    BootstrapConfig cfg;
    cfg.substeps = 1;
    CHECK_THROWS_AS(bootstrap_window(f, Vec<double>{10.0}, 3, 100.0, cfg), field_error);
  }
}

TEST_CASE("integrate and the scalar invariant", "[polarmap]") {
  SECTION("steps = 0 returns the window") {
    auto F = polarize(scalar_power_field<Rational>(3));
    auto w = PolarWindow<Rational>::from_points({{rat(1)}, {rat(1)}}, rat(1, 4));
    auto traj = integrate(F, w, 0);
    CHECK(traj.points.size() == 2);
  }

  SECTION("I_n = I_0 - n h k for xdot = x^{k+1}") {
    for (int k = 1; k <= 3; ++k) {
      auto F = polarize(scalar_power_field<Rational>(k + 1));
      std::vector<Vec<Rational>> pts;
      for (int m = 0; m < k; ++m) pts.push_back({rat(1) + rat(m, 7)});
      Rational h = rat(1, 64);
      auto traj = integrate(F, PolarWindow<Rational>::from_points(pts, h), 20);
      REQUIRE_FALSE(traj.singular_at.has_value());
      REQUIRE(traj.points.size() == size_t(k + 20));
      Rational I0(1);
      for (int m = 0; m < k; ++m) I0 /= traj.points[m][0];
      for (size_t n = 0; n + k <= traj.points.size(); ++n) {
        Rational In(1);
        for (int m = 0; m < k; ++m) In /= traj.points[n + m][0];
        CHECK(In == I0 - Rational(long(n)) * h * Rational(k));
      }
    }
  }

  SECTION("zero field gives a constant trajectory") {
    auto F = polarize(PolyVectorField<Rational>::zero(1), 2);
    auto w = PolarWindow<Rational>::from_points({{rat(3)}}, rat(1, 2));
    auto traj = integrate(F, w, 5);
    for (const auto& p : traj.points) CHECK(p[0] == rat(3));
  }

  SECTION("singular stop records the failing index") {
    auto F = polarize(scalar_power_field<Rational>(3));
    auto w = PolarWindow<Rational>::from_points({{rat(1)}, {rat(1)}}, rat(1, 2));
    auto traj = integrate(F, w, 5);
    REQUIRE(traj.singular_at.has_value());
    CHECK(*traj.singular_at == 2);
    CHECK(traj.points.size() == 2);
  }
}

TEST_CASE("suspended_step", "[polarmap]") {
  SECTION("xdot = x^2 + x + 1 from x = 1, h = 1/2 maps to 7") {
    PolyVectorField<Rational> f(1, {{Monomial<Rational>{rat(1), {2}}, Monomial<Rational>{rat(1), {1}},
                                     Monomial<Rational>{rat(1), {0}}}});
    auto w = PolarWindow<Rational>::from_points({{rat(1)}}, rat(1, 2));
    auto r = suspended_step(f, w);
    REQUIRE_FALSE(r.singular);
    CHECK(r.new_point[0] == rat(7));
    auto k = kahan_step(f, {rat(1)}, rat(1, 2));
    CHECK(r.new_point == k.new_point);
  }

  SECTION("equals kahan_step on random nonhomogeneous quadratics, exactly") {
    Rng rng(61);
    int checked = 0;
    for (int trial = 0; trial < 40 && checked < 20; ++trial) {
      int n = int(rng.int_in(1, 3));
      auto f = rand_nonhomogeneous_quadratic<Rational>(rng, n);
      auto x = rand_point<Rational>(rng, n);
      Rational h = rat(1, rng.int_in(4, 16));
      auto w = PolarWindow<Rational>::from_points({x}, h);
      auto via_susp = suspended_step(f, w);
      auto via_kahan = kahan_step(f, x, h);
      REQUIRE(via_susp.singular == via_kahan.singular);
      if (via_susp.singular) continue;
      CHECK(via_susp.new_point == via_kahan.new_point);
      ++checked;
    }
    CHECK(checked == 20);
  }

  SECTION("already homogeneous fields agree with polar_step") {
    Rng rng(62);
    auto f = rand_homogeneous_field<Rational>(rng, 2, 3);
    auto pts = rand_window_points<Rational>(rng, 2, 2);
    auto w = PolarWindow<Rational>::from_points(pts, rat(1, 8));
    auto direct = polar_step(polarize(f), w);
    auto susp = suspended_step(f, w);
    REQUIRE(direct.singular == susp.singular);
    if (!direct.singular) CHECK(direct.new_point == susp.new_point);
  }

  SECTION("zero field is the identity") {
    auto w = PolarWindow<Rational>::from_points({{rat(2), rat(3)}}, rat(1, 2));
    auto r = suspended_step(PolyVectorField<Rational>::zero(2), w);
    CHECK(r.new_point == Vec<Rational>{rat(2), rat(3)});
  }

  SECTION("extension marker fires beyond the quadratic case") {
    PolyVectorField<Rational> fq(1, {{Monomial<Rational>{rat(1), {2}}, Monomial<Rational>{rat(1), {0}}}});
    CHECK_FALSE(suspension_is_extension(fq, 1));
    PolyVectorField<Rational> fc(1, {{Monomial<Rational>{rat(1), {3}}, Monomial<Rational>{rat(1), {0}}}});
    CHECK(suspension_is_extension(fc, 2));
  }
}

TEST_CASE("self-adjointness of the polar map", "[polarmap]") {
  SECTION("xdot = x^3: forward to 2, reverse with -h returns 1") {
    auto F = polarize(scalar_power_field<Rational>(3));
    auto w = PolarWindow<Rational>::from_points({{rat(1)}, {rat(1)}}, rat(1, 4));
    auto fwd = polar_step(F, w);
    REQUIRE_FALSE(fwd.singular);
    CHECK(fwd.new_point[0] == rat(2));
    auto back = polar_step(
        F, PolarWindow<Rational>::from_points({{rat(2)}, {rat(1)}}, rat(-1, 4)));
    REQUIRE_FALSE(back.singular);
    CHECK(back.new_point[0] == rat(1));
  }

  SECTION("random rational windows, reversed stepping is exact") {
    Rng rng(71);
    int checked = 0;
    for (int trial = 0; trial < 80 && checked < 50; ++trial) {
      int n = int(rng.int_in(1, 3));
      int deg = int(rng.int_in(2, 5));
      auto f = rand_homogeneous_field<Rational>(rng, n, deg);
      auto F = polarize(f);
      auto w = PolarWindow<Rational>::from_points(rand_window_points<Rational>(rng, n, deg - 1),
                                                  rat(1, rng.int_in(8, 32)));
      auto rep = check_self_adjoint(F, w);
      if (rep.singular) continue;
      CHECK(rep.ok);
      ++checked;
    }
    CHECK(checked == 50);
  }
}

TEST_CASE("consistency order of one polar step", "[polarmap]") {
  // Per-unit-step error of one step from exact window data is O(h^2): the
  // one-step error is O(h^3) and dividing by the k h span leaves ratio ~4
  // under h-halving.
  auto f = scalar_power_field<double>(3);
  auto F = polarize(f);
  auto err_per_unit = [&](double h) {
    double x0 = 1.0;
    double x1 = oracles::power_flow(x0, h, 2);
    auto w = PolarWindow<double>::from_points({{x0}, {x1}}, h);
    auto r = polar_step(F, w);
    REQUIRE_FALSE(r.singular);
    double exact = oracles::power_flow(x0, 2.0 * h, 2);
    return std::fabs(r.new_point[0] - exact) / (2.0 * h);
  };
  double e1 = err_per_unit(1.0 / 64);
  double e2 = err_per_unit(1.0 / 128);
  double ratio = e1 / e2;
  CHECK(ratio > 3.2);
  CHECK(ratio < 4.8);
}

TEST_CASE("leapfrog control fails the conservation the polar map passes", "[polarmap]") {
  // Quartic benchmark in double mode; light version of the acceptance run.
  ScalarPoly<double> H(2, {Monomial<double>{1.0, {4, 0}},
                           Monomial<double>{6.0 * 0.25, {2, 2}},
                           Monomial<double>{1.0, {0, 4}}});
  auto spec = HamiltonianSpec<double>::make(H, standard_symplectic<double>(2));
  auto f = hamiltonian_field(spec);
  auto F = polarize(f);
  double h = 0.05;
  auto w = bootstrap_window(f, Vec<double>{1.0, 0.6}, 2, h);

  auto polar_traj = integrate(F, w, 200);
  REQUIRE_FALSE(polar_traj.singular_at.has_value());
  auto polar_drift = drift_series(k_integral_series(spec, polar_traj.points), 2);

  std::vector<Vec<double>> lf = {w.points[0], w.points[1]};
  for (int s = 0; s < 200; ++s)
    lf.push_back(detail::leapfrog_step(f, lf[lf.size() - 2], lf.back(), h));
  auto lf_drift = drift_series(k_integral_series(spec, lf), 2);

  CHECK(polar_drift.max_rel <= 1e-11);
  CHECK(lf_drift.max_rel >= 1e-3);
}
