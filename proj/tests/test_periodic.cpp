#include <doctest.h>

#include <cmath>

#include "hardcore/errors.hpp"
#include "hardcore/periodic.hpp"
#include "hardcore/ti_solver.hpp"

using namespace hardcore;

TEST_CASE("gamma and its fixed point") {
  CHECK(gamma_map(0.0, 3.0, 4) == 3.0);
  CHECK(gamma_map(1.0, 1.0, 1) == doctest::Approx(2.0 / 3.0));
  const double x = gamma_fixed_point(5.0, 6);
  CHECK(x == doctest::Approx(0.665376218413112).epsilon(1e-13));
  CHECK(gamma_fixed_point(2.0, 6) == doctest::Approx(0.421283548684995).epsilon(1e-13));
  const double h = 1e-6;
  CHECK(gamma_derivative(x, 5.0, 6) ==
        doctest::Approx((gamma_map(x + h, 5.0, 6) - gamma_map(x - h, 5.0, 6)) / (2 * h)).epsilon(1e-7));
  CHECK_THROWS_AS(gamma_fixed_point(-1.0, 6), InvalidInput);
  CHECK_THROWS_AS(gamma_fixed_point(1.0, 0), InvalidInput);
}

TEST_CASE("Kesten quadratic") {
  CHECK(kesten_quadratic(gamma_fixed_point(5.0, 6), 6) == doctest::Approx(-0.110677631179869).epsilon(1e-12));
  CHECK(kesten_condition(5.0, 6));
  CHECK_FALSE(kesten_condition(2.0, 6));
  CHECK_FALSE(kesten_condition(20.0, 6));
  for (int k = 1; k <= 5; ++k) CHECK_FALSE(kesten_condition(3.0, k));
}

TEST_CASE("period-doubling window") {
  const auto w = period_doubling_window(6);
  REQUIRE(w.has_value());
  CHECK(w->x_low == doctest::Approx(0.5));
  CHECK(w->x_high == doctest::Approx(1.0));
  CHECK(std::abs(w->lambda_low - 2048.0 / 729.0) <= 1e-12);
  CHECK(std::abs(w->lambda_high - 729.0 / 64.0) <= 1e-12);
  CHECK(w->contains(5.0));
  CHECK_FALSE(w->contains(2.0));
  for (int k = 1; k <= 5; ++k) CHECK_FALSE(period_doubling_window(k).has_value());
  const auto w7 = period_doubling_window(7);
  REQUIRE(w7.has_value());
  CHECK(w7->lambda_low < w7->lambda_high);
  CHECK_THROWS_AS(period_doubling_window(0), InvalidInput);
}

TEST_CASE("two-cycle of gamma at k = 6, lam = 5") {
  const auto pts = gamma2_fixed_points(5.0, 6);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0] == doctest::Approx(0.365932490193423).epsilon(1e-12));
  CHECK(pts[1] == doctest::Approx(0.665376218413112).epsilon(1e-12));
  CHECK(pts[2] == doctest::Approx(1.20354195156781).epsilon(1e-12));
  const auto pairs = solve_period2_symmetric(5.0, 6);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].second == doctest::Approx(pairs[2].first).epsilon(1e-12));
  CHECK(pairs[1].first == doctest::Approx(pairs[1].second).epsilon(1e-12));
}

TEST_CASE("one fixed point of gamma o gamma outside the window") {
  for (int k = 2; k <= 5; ++k) {
    for (double lambda : {0.1, 1.0, 3.0, 10.0, 100.0}) CHECK(gamma2_fixed_points(lambda, k).size() == 1);
  }
  CHECK(gamma2_fixed_points(2.5, 6).size() == 1);
  CHECK(gamma2_fixed_points(12.0, 6).size() == 1);
}

TEST_CASE("Kesten sign agrees with numerically differentiated gamma") {
  for (int k = 2; k <= 8; ++k) {
    for (int i = 0; i < 40; ++i) {
      const double lambda = 0.5 * std::pow(1.15, i);
      const double x = gamma_fixed_point(lambda, k);
      const double h = 1e-6 * x;
      const double slope = (gamma_map(x + h, lambda, k) - gamma_map(x - h, lambda, k)) / (2 * h);
      if (std::abs(slope + 1.0) < 1e-6) continue;
      CHECK((kesten_quadratic(x, k) < 0) == (slope + 1.0 < 0));
      CHECK((gamma2_fixed_points(lambda, k).size() == 3) == kesten_condition(lambda, k));
    }
  }
}

TEST_CASE("full period-two system of the hinge") {
  const auto sols = solve_period2_full(5.0, 6);
  int diagonal = 0;
  int alternating = 0;
  for (const auto& s : sols) {
    CHECK(s.residual <= 1e-10);
    (s.kind == Period2Kind::Diagonal ? diagonal : alternating)++;
  }
  CHECK(diagonal == 3);  // the three TI solutions
  CHECK(alternating == 2);

  const auto quiet = solve_period2_full(4.0, 2);
  CHECK(quiet.size() == 3);
  for (const auto& s : quiet) CHECK(s.kind == Period2Kind::Diagonal);
  CHECK(to_string(Period2Kind::Alternating) == "alternating");
}

TEST_CASE("period-two system for another graph contains its TI solutions") {
  const auto g = builtin(Builtin::Wand);
  const auto lam = ActivityVector::uniform(2, 3.0);
  const auto sols = solve_period2_full(g, lam, 2);
  for (const auto& ti : count_ti_solutions(g, lam, 2)) {
    bool found = false;
    for (const auto& s : sols) found = found || (same_point(s.z, ti.z, 1e-7) && same_point(s.t, ti.z, 1e-7));
    CHECK(found);
  }
  CHECK(period2_system(g, lam, 2).dimension() == 4);
}
