#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "hardcore/constraint_graph.hpp"
#include "hardcore/ratio_system.hpp"

namespace hardcore {

enum class SolutionKind { Symmetric, AsymmetricPlus, AsymmetricMinus };

std::string_view to_string(SolutionKind kind);

// A constant solution z of the recursion. For three-state graphs z = (z1, z2);
// AsymmetricPlus has z1 > z2, AsymmetricMinus is its swap.
struct TISolution {
  std::vector<double> z;
  SolutionKind kind = SolutionKind::Symmetric;
  double residual = 0.0;

  double z1() const { return z.at(0); }
  double z2() const { return z.at(1); }
};

using SolutionSet = std::vector<TISolution>;

// Residual of (z1, z2) in the TI system of graph g with activities (1, lam, lam).
double ti_residual(const ConstraintGraph& g, double lambda, int k, double z1, double z2);

// Unique root of z = lam ((1+z)/(1+2z))^k, by bisection on [0, lam].
TISolution solve_hinge_symmetric(double lambda, int k);
// Unique root of z = lam ((1+z)/(2z))^k.
TISolution solve_wand_symmetric(double lambda, int k);

// Closed-form data of the two asymmetric branches at k = 2.
struct ClosedFormK2 {
  double a;          // 2 / (sqrt(lam) + sqrt(lam + c))
  double discriminant;  // 1 - 4a^2
  double upper;      // ((1 + sqrt(disc)) / 2a)^2
  double lower;      // ((1 - sqrt(disc)) / 2a)^2, computed as 1 / upper
};
// c = 4 for the hinge, c = 8 for the wand. Empty when the discriminant is <= 0.
std::optional<ClosedFormK2> closed_form_k2(double lambda, double c);

// k = 2 asymmetric solutions, empty for lam <= 9/4 (hinge) or lam <= 1 (wand).
std::vector<TISolution> solve_hinge_asymmetric_k2(double lambda);
std::vector<TISolution> solve_wand_asymmetric_k2(double lambda);
// 1 + z1 + z2 on the asymmetric hinge branch at k = 2.
double hinge_asymmetric_sum_k2(double lambda);

// Unique pipe solution: root x = z2 of x / lam = f(x), then z1 from
// u = (z2 / lam)^(1/k), z1 = u / (1 - u).
TISolution solve_pipe(double lambda, int k);

// f(x) = (r / (1 + r))^k with r = (x (1+x)^k)^(1/(k+1)), and its derivative.
double pipe_f(double x, int k);
double pipe_f_prime(double x, int k);

struct PipeCertificate {
  bool f_increasing = false;   // f' > 0 over the log grid
  int reduced_roots = 0;        // roots of (k+1)x = 1/r(x) + k
  int pipe_roots = 0;           // roots of x / lam = f(x) with x > 0
  bool endpoints = false;       // f(0+) = 0 and f(+inf) = 1
  bool passed() const { return f_increasing && reduced_roots == 1 && pipe_roots == 1 && endpoints; }
};
PipeCertificate pipe_uniqueness_certificate(double lambda, int k);

struct CountOptions {
  int points_per_axis = 64;
  double grid_lo = 1e-4;
  double grid_hi = 1e4;
  MultiStartOptions multistart;
};

// Every TI solution found by multi-start Newton from a log grid. Throws
// NumericalFailure if nothing converges.
SolutionSet count_ti_solutions(const ConstraintGraph& g, const ActivityVector& lam, int k,
                               const CountOptions& options = {});

// Bisects on `count(lambda) > 1` between lo (single solution) and hi
// (several) until the bracket is narrower than tol.
template <class CountFn>
double bisect_transition(CountFn&& count, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (count(mid) > 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Activity where the TI solution count first exceeds one (hinge or wand).
// k = 2 returns the exact value; other k scan upward to lam = 1e6 and then
// bisect on the count. Empty when no transition is found.
std::optional<double> critical_lambda(Builtin model, int k, double tol = 1e-9);

// Critical activity of the two-state hard-core model, (1/(k-1)) (k/(k-1))^k.
double two_state_critical_lambda(int k);

}  // namespace hardcore
