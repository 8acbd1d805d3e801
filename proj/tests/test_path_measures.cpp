#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hardcore/bounds.hpp"
#include "hardcore/errors.hpp"
#include "hardcore/path_measures.hpp"
#include "hardcore/ti_solver.hpp"

using namespace hardcore;

namespace {

double max_log_gap(const PathField& a, const PathField& b) {
  double gap = 0.0;
  for (std::size_t v = 0; v < a.field.size(); ++v) {
    const auto ha = a.log_at(v);
    const auto hb = b.log_at(v);
    gap = std::max({gap, std::abs(ha[0] - hb[0]), std::abs(ha[1] - hb[1])});
  }
  return gap;
}

}  // namespace

TEST_CASE("contraction window") {
  const auto w = contraction_window();
  CHECK(w.lower == 2.25);
  CHECK(w.upper == doctest::Approx(2.47213595499958).epsilon(1e-12));
  CHECK(z_minus_hinge_k2(w.upper) == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-10));
  CHECK(w.contains(2.35));
  CHECK_FALSE(w.contains(2.25));
  CHECK_FALSE(w.contains(2.5));
}

TEST_CASE("boundary corners") {
  const double zm = z_minus_hinge_k2(2.35);
  const double l = std::log(zm);
  CHECK(side_boundary(Side::T1, zm) == LogPair{l, -l});
  CHECK(side_boundary(Side::OnPath, zm) == LogPair{l, -l});
  CHECK(side_boundary(Side::T2, zm) == LogPair{-l, l});

  const TreeShape shape(2, 4);
  const auto at0 = build_boundary(0.0, 2.35, shape);
  REQUIRE(at0.size() == shape.generation_size(4));
  CHECK(at0.front() == side_boundary(Side::OnPath, zm));  // the path itself
  CHECK(std::all_of(at0.begin() + 1, at0.end(), [&](const LogPair& h) { return h == LogPair{-l, l}; }));

  const auto at1 = build_boundary(1.0, 2.35, shape);
  CHECK(std::all_of(at1.begin(), at1.end(), [&](const LogPair& h) { return h == LogPair{l, -l}; }));

  const auto half = build_boundary(0.5, 2.35, shape);
  int t1 = 0, t2 = 0;
  for (const auto& h : half) {
    CHECK(std::abs(std::abs(h[0]) + l) < 1e-15);
    (h[0] < 0 ? t1 : t2)++;
  }
  CHECK(t1 > 0);
  CHECK(t2 > 0);
}

TEST_CASE("boundary and solver reject bad input") {
  CHECK_THROWS_AS(build_boundary(0.5, 2.0, TreeShape(2, 3)), InvalidInput);
  CHECK_THROWS_AS(build_boundary(0.5, 2.6, TreeShape(2, 3)), InvalidInput);
  CHECK_THROWS_AS(build_boundary(0.5, 2.35, TreeShape(3, 3)), InvalidInput);
  CHECK_THROWS_AS(build_boundary(1.5, 2.35, TreeShape(2, 3)), InvalidInput);
  CHECK_THROWS_AS(solve_path_field(0.5, 2.35, -1), InvalidInput);
  CHECK_THROWS_AS(solve_path_field(0.5, 2.35, 4, 3), InvalidInput);
  CHECK_THROWS_AS(solve_path_field(0.5, 2.35, 4, std::nullopt, 0.0), InvalidInput);
  CHECK_THROWS_AS(solve_path_field(-0.1, 2.35, 4), InvalidInput);
  CHECK_THROWS_AS(solve_path_field(0.5, 2.25, 4), InvalidInput);
  CHECK_THROWS_AS(default_depth_limit(4, 2.35, 1.0), InvalidInput);
}

TEST_CASE("default depth limit") {
  CHECK(default_depth_limit(4, 2.35, 1e-9) == 184);
  CHECK(default_depth_limit(0, 2.35, 1e-9) == 180);
  CHECK(default_depth_limit(4, 2.35, 1e-3) < default_depth_limit(4, 2.35, 1e-9));
}

TEST_CASE("shared subtrees reproduce a full inward sweep bit for bit") {
  const int n = 3, N = 8;
  const double t = 0.37, lambda = 2.35;
  const auto pf = solve_path_field(t, lambda, n, N);
  const TreeShape deep(2, N);
  const auto logs = build_boundary(t, lambda, deep);
  std::vector<double> boundary;
  for (const auto& h : logs) {
    boundary.push_back(std::exp(h[0]));
    boundary.push_back(std::exp(h[1]));
  }
  const auto full = inward_sweep(builtin(Builtin::Hinge), ActivityVector::uniform(2, lambda), deep, boundary);
  for (std::size_t v = 0; v < pf.field.size(); ++v) {
    CHECK(pf.field.at(v)[0] == full.at(v)[0]);
    CHECK(pf.field.at(v)[1] == full.at(v)[1]);
  }
  CHECK(pf.history.size() == static_cast<std::size_t>(N - n));
  CHECK_FALSE(solve_path_field(t, lambda, n, n).converged);
}

TEST_CASE("endpoints reproduce the asymmetric TI solutions") {
  const auto asym = solve_hinge_asymmetric_k2(2.35);
  REQUIRE(asym.size() == 2);
  for (double t : {0.0, 1.0}) {
    const auto pf = solve_path_field(t, 2.35, 5);
    REQUIRE(pf.converged);
    // t = 0 leaves every off-path vertex in T2, whose corner has z1 > z2.
    const auto& target = t == 0.0 ? asym[0] : asym[1];
    REQUIRE(target.kind == (t == 0.0 ? SolutionKind::AsymmetricPlus : SolutionKind::AsymmetricMinus));
    for (std::size_t v = 1; v < pf.field.size(); ++v) {
      CHECK(std::abs(pf.field.at(v)[0] - target.z1()) <= 1e-8);
      CHECK(std::abs(pf.field.at(v)[1] - target.z2()) <= 1e-8);
    }
  }
}

TEST_CASE("convergence is geometric with ratio below the Lipschitz bound") {
  const double L = lipschitz_constant(z_minus_hinge_k2(2.35));
  for (double t : {0.0, 0.3, 0.5, 0.77, 1.0}) {
    const auto pf = solve_path_field(t, 2.35, 4);
    CHECK(pf.converged);
    CHECK(pf.sup_change <= 1e-9);
    const auto ratios = pf.contraction_ratios();
    // At t = 1 the boundary is one corner everywhere and nothing moves.
    if (t == 1.0) {
      CHECK(ratios.empty());
      CHECK(*std::max_element(pf.history.begin(), pf.history.end()) < 1e-14);
    } else if (t == 0.0 || t == 0.5) {
      CHECK(ratios.size() >= 5);
    }
    for (double r : ratios) CHECK(r <= L + 1e-9);
  }
}

TEST_CASE("fields stay in the box and the CSV carries split tags") {
  const auto pf = solve_path_field(0.5, 2.35, 3);
  const auto box = lipschitz_box(pf.z_minus);
  for (std::size_t v = 1; v < pf.field.size(); ++v) CHECK(box.contains(pf.log_at(v), 1e-12));
  const auto csv = pf.to_csv();
  CHECK(csv.rfind("vertex_address,h1,h2,split_tag\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(pf.field.size()) + 1);
  CHECK(csv.find(",on_path\n") != std::string::npos);
  // The vertex 1 lies on the path of t = 1/2, halfway between the corners.
  const auto h = pf.log_at(2);
  CHECK(std::abs(h[0]) < 1e-6);
  CHECK(std::abs(h[1]) < 1e-6);
}

TEST_CASE("distinguish") {
  CHECK_FALSE(distinguish(0.3, 0.3, 2.35, 4).has_value());
  const auto w = distinguish(0.0, 1.0, 2.35, 4);
  REQUIRE(w.has_value());
  CHECK(w->generation() <= 1);
  CHECK_THROWS_AS(distinguish(solve_path_field(0.3, 2.35, 3), solve_path_field(0.3, 2.35, 4), 1e-9), InvalidInput);
}

TEST_CASE("paths splitting at generation 10 are told apart at depth 12") {
  const double t2 = std::ldexp(1.0, -10);
  const auto deep = distinguish(0.0, t2, 2.35, 12);
  REQUIRE(deep.has_value());
  // Influence of the deep split is damped but not below tol by generation 4,
  // so even the shallow ball sees it.
  const auto a = solve_path_field(0.0, 2.35, 4);
  const auto b = solve_path_field(t2, 2.35, 4);
  CHECK(distinguish(a, b, 1e-9).has_value());
  CHECK(max_log_gap(a, b) < 0.1);
}

TEST_CASE("random pairs differing before depth 8 are distinguishable at depth 12") {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int pairs = 0;
  while (pairs < 10) {
    const double t1 = unit(rng), t2 = unit(rng);
    if (PathCode(t1, 2).digits(8) == PathCode(t2, 2).digits(8)) continue;
    ++pairs;
    const auto a = solve_path_field(t1, 2.35, 12);
    const auto b = solve_path_field(t2, 2.35, 12);
    CHECK(distinguish(a, b, 1e-9).has_value());
    CHECK(max_log_gap(a, b) > 1e-6);
  }
}
