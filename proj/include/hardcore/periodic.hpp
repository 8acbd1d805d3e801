#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "hardcore/constraint_graph.hpp"
#include "hardcore/ratio_system.hpp"

namespace hardcore {

// gamma(x) = lam ((1+x)/(1+2x))^k: the hinge recursion restricted to z1 = z2.
// Strictly decreasing on (0, inf) from lam to lam 2^-k.
double gamma_map(double x, double lambda, int k);
double gamma_derivative(double x, double lambda, int k);

// Unique x* = gamma(x*), by bisection.
double gamma_fixed_point(double lambda, int k);

// 2x^2 + (3-k)x + 1; negative at x* exactly when gamma'(x*) < -1.
double kesten_quadratic(double x, int k);

// gamma'(x*) < -1, which forces a two-cycle of gamma around x*. The quadratic
// and derivative forms are both evaluated; disagreement outside a 1e-9 dead
// band raises NumericalFailure.
bool kesten_condition(double lambda, int k);

// Range of x* on which the quadratic is negative, and the activities that
// produce it (lam = x ((1+2x)/(1+x))^k at each end). Empty for k < 6.
struct PeriodDoublingWindow {
  double x_low;
  double x_high;
  double lambda_low;
  double lambda_high;
  bool contains(double lambda) const { return lambda > lambda_low && lambda < lambda_high; }
};
std::optional<PeriodDoublingWindow> period_doubling_window(int k);

// Sorted fixed points of gamma o gamma, located by sign changes on a log grid
// over the range of gamma and polished by bisection. Always contains x*.
std::vector<double> gamma2_fixed_points(double lambda, int k);

// Solutions (z, t) of z = gamma(t), t = gamma(z): the diagonal (x*, x*) and,
// when present, the swapped pair (x0, x1), (x1, x0). Sorted by z.
std::vector<std::pair<double, double>> solve_period2_symmetric(double lambda, int k);

enum class Period2Kind { Diagonal, Alternating };
std::string_view to_string(Period2Kind kind);

// Fields z on even generations and t on odd ones.
struct Period2Solution {
  std::vector<double> z;
  std::vector<double> t;
  Period2Kind kind = Period2Kind::Diagonal;
  double residual = 0.0;
};

// Period-two system z = G(t), t = G(z) for an arbitrary graph, with
// unknowns ordered (z_1..z_q, t_1..t_q).
RatioSystem period2_system(const ConstraintGraph& g, const ActivityVector& lam, int k);
std::vector<Period2Solution> solve_period2_full(const ConstraintGraph& g, const ActivityVector& lam, int k);

// Hinge with activities (1, lam, lam). Additionally checks that every TI
// solution and every symmetric two-cycle was recovered; raises
// NumericalFailure otherwise.
std::vector<Period2Solution> solve_period2_full(double lambda, int k);

}  // namespace hardcore
