#include <doctest.h>

#include <cmath>
#include <random>

#include "hardcore/errors.hpp"
#include "hardcore/recursion.hpp"

using namespace hardcore;

namespace {

// Reference: z_j = lam_j/lam_0 prod_y (a_j0 + sum_i a_ji z_iy) / (a_00 + sum_i a_0i z_iy), written out directly.
std::vector<double> direct_step(const ConstraintGraph& g, const ActivityVector& lam,
                                const std::vector<std::vector<double>>& children) {
  std::vector<double> out;
  for (int j = 1; j <= g.q(); ++j) {
    double value = lam[j] / lam[0];
    for (const auto& z : children) {
      double num = g.adj(j, 0);
      double den = g.adj(0, 0);
      for (int i = 1; i <= g.q(); ++i) {
        num += g.adj(j, i) * z[static_cast<std::size_t>(i - 1)];
        den += g.adj(0, i) * z[static_cast<std::size_t>(i - 1)];
      }
      value *= num / den;
    }
    out.push_back(value);
  }
  return out;
}

}  // namespace

TEST_CASE("one recursion step by hand") {
  // hinge, lam = 2: z1 = 2 * (2/4) * (1.5/2), z2 = 2 * (3/4) * (1.5/2)
  const auto z = step(builtin(Builtin::Hinge), ActivityVector::uniform(2, 2.0), {{1.0, 2.0}, {0.5, 0.5}});
  CHECK(z[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(z[1] == doctest::Approx(1.125).epsilon(1e-15));
  // pipe: numerator of state 2 is z1 only, denominator 1 + z1
  const auto p = step(builtin(Builtin::Pipe), ActivityVector::uniform(2, 1.0), {{1.0, 3.0}});
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("step errors") {
  const auto g = builtin(Builtin::Hinge);
  const auto lam = ActivityVector::uniform(2, 1.0);
  CHECK_THROWS_AS(step(g, lam, {{1.0}}), InvalidInput);
  CHECK_THROWS_AS(step(g, lam, {{1.0, 0.0}}), InvalidInput);
  CHECK_THROWS_AS(step(g, ActivityVector::uniform(3, 1.0), {{1.0, 1.0}}), InvalidInput);
}

TEST_CASE("large fan-in uses log space without changing the value") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (auto which : {Builtin::Hinge, Builtin::Wand, Builtin::Pipe, Builtin::Wrench}) {
    const auto g = builtin(which);
    const ActivityVector lam({1.0, 1.7, 0.6});
    std::vector<std::vector<double>> children;
    for (int c = 0; c < 25; ++c) children.push_back({u(rng), u(rng)});
    const auto got = step(g, lam, children);
    const auto want = direct_step(g, lam, children);
    CHECK(got[0] == doctest::Approx(want[0]).epsilon(1e-12));
    CHECK(got[1] == doctest::Approx(want[1]).epsilon(1e-12));
  }
}

TEST_CASE("inward sweep applies step at every internal vertex") {
  const auto g = builtin(Builtin::Wand);
  const ActivityVector lam({1.0, 2.0, 0.5});
  const TreeShape s(2, 3);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  std::vector<double> boundary(s.generation_size(3) * 2);
  for (double& b : boundary) b = u(rng);
  const auto f = inward_sweep(g, lam, s, boundary);
  for (std::size_t v = 0; v < s.generation_offset(3); ++v) {
    std::vector<std::vector<double>> kids;
    for (int c = 0; c < s.child_count(v); ++c) {
      const auto z = f.at(s.first_child(v) + static_cast<std::size_t>(c));
      kids.emplace_back(z.begin(), z.end());
    }
    const auto want = direct_step(g, lam, kids);
    CHECK(f.at(v)[0] == doctest::Approx(want[0]).epsilon(1e-14));
    CHECK(f.at(v)[1] == doctest::Approx(want[1]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(inward_sweep(g, lam, s, std::vector<double>(3, 1.0)), InvalidInput);
  boundary[0] = -1.0;
  CHECK_THROWS_AS(inward_sweep(g, lam, s, boundary), InvalidInput);
}

TEST_CASE("threaded sweep is bitwise identical") {
  const auto g = builtin(Builtin::Hinge);
  const auto lam = ActivityVector::uniform(2, 2.35);
  const TreeShape s(2, 10);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  std::vector<double> boundary(s.generation_size(10) * 2);
  for (double& b : boundary) b = u(rng);
  const auto one = inward_sweep(g, lam, s, boundary);
  const auto four = inward_sweep(g, lam, s, boundary, {4});
  CHECK(std::equal(one.values().begin(), one.values().end(), four.values().begin()));
}

TEST_CASE("field csv") {
  Field f(TreeShape(1, 1), 2);
  f.at(0)[0] = 0.5;
  f.at(0)[1] = 1.0 / 3.0;
  const auto csv = f.to_csv();
  CHECK(csv.rfind("vertex_address,z1,z2\nε,0.5,0.333333333333333\n", 0) == 0);
  CHECK(f.generation(1).size() == 4);
}

TEST_CASE("log map matches the hinge recursion") {
  // h_x = ln lam + sum_y F(h_y) is the log of the hinge step.
  const double lambda = 2.35;
  const LogPair a{0.3, -0.2};
  const LogPair b{-0.1, 0.25};
  const auto z = step(builtin(Builtin::Hinge), ActivityVector::uniform(2, lambda),
                      {{std::exp(a[0]), std::exp(a[1])}, {std::exp(b[0]), std::exp(b[1])}});
  const auto fa = log_field_map(a);
  const auto fb = log_field_map(b);
  CHECK(std::log(z[0]) == doctest::Approx(std::log(lambda) + fa[0] + fb[0]).epsilon(1e-14));
  CHECK(std::log(z[1]) == doctest::Approx(std::log(lambda) + fa[1] + fb[1]).epsilon(1e-14));
  // stable for large arguments
  const auto big = log_field_map({800.0, -800.0});
  CHECK(std::isfinite(big[0]));
  CHECK(big[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Jacobian matches finite differences") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const LogPair h{u(rng), u(rng)};
    const auto J = log_field_jacobian(h);
    const double eps = 1e-6;
    for (int c = 0; c < 2; ++c) {
      LogPair hp = h;
      LogPair hm = h;
      hp[static_cast<std::size_t>(c)] += eps;
      hm[static_cast<std::size_t>(c)] -= eps;
      const auto fp = log_field_map(hp);
      const auto fm = log_field_map(hm);
      for (int r = 0; r < 2; ++r) {
        const double fd = (fp[static_cast<std::size_t>(r)] - fm[static_cast<std::size_t>(r)]) / (2 * eps);
        CHECK(J[static_cast<std::size_t>(2 * r + c)] == doctest::Approx(fd).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("injectivity determinant is negative") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const LogPair l{u(rng), u(rng)};
    const double d = injectivity_determinant(l);
    CHECK(d < 0.0);
    CHECK(d == doctest::Approx(-(1.0 + std::exp(l[0]) + std::exp(l[1]))));
  }
}

TEST_CASE("Lipschitz constant and partial bounds on the box") {
  const double zm = 0.722609738218011;  // lower hinge branch at lam = 2.35
  CHECK(lipschitz_constant(zm) == doctest::Approx(0.890958060982930).epsilon(1e-13));
  const auto box = lipschitz_box(zm);
  CHECK(box.lower == doctest::Approx(std::log(zm)));
  CHECK(box.upper == doctest::Approx(-std::log(zm)));
  CHECK(box.contains({0.0, 0.0}));
  CHECK_FALSE(box.contains({box.upper + 1e-6, 0.0}));

  const double L = lipschitz_constant(zm);
  const auto pb = partial_derivative_bounds(zm);
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(box.lower, box.upper);
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const LogPair h{u(rng), u(rng)};
    const LogPair l{u(rng), u(rng)};
    const auto fh = log_field_map(h);
    const auto fl = log_field_map(l);
    const double num = std::max(std::abs(fh[0] - fl[0]), std::abs(fh[1] - fl[1]));
    const double den = std::max(std::abs(h[0] - l[0]), std::abs(h[1] - l[1]));
    if (den > 0) worst_ratio = std::max(worst_ratio, num / den);
    const auto J = log_field_jacobian(h);
    CHECK(std::abs(J[0]) <= pb.diagonal + 1e-12);
    CHECK(std::abs(J[1]) <= pb.off_diagonal + 1e-12);
    CHECK(std::abs(J[0]) + std::abs(J[1]) <= L + 1e-12);
  }
  CHECK(worst_ratio <= L + 1e-9);
  CHECK_THROWS_AS(lipschitz_constant(1.2), InvalidInput);
  CHECK_THROWS_AS(lipschitz_box(0.0), InvalidInput);
}
