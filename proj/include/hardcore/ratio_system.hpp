#pragma once

#include <optional>
#include <vector>

#include "hardcore/constraint_graph.hpp"

namespace hardcore {

// c + sum_m coeffs[m] * z_m with nonnegative coefficients.
struct AffineForm {
  double constant = 0.0;
  std::vector<double> coeffs;

  double operator()(const std::vector<double>& z) const;
};

// z_target = scale * (numerator(z) / denominator(z))^power
struct RatioEquation {
  int target = 0;
  double scale = 1.0;
  AffineForm numerator;
  AffineForm denominator;
  double power = 1.0;
};

// Square system of ratio equations. Every fixed-point system in this library
// (translation-invariant, envelope, period two) has this shape, so one Newton
// solver with an analytic Jacobian serves all of them. Newton runs on u = ln z
// which keeps iterates positive.
class RatioSystem {
 public:
  RatioSystem(int dimension, std::vector<RatioEquation> equations);

  int dimension() const noexcept { return dim_; }
  const std::vector<RatioEquation>& equations() const noexcept { return eqs_; }

  // Right-hand sides G(z).
  std::vector<double> map(const std::vector<double>& z) const;
  // max_e |z_e - G_e(z)| / max(1, z_e)
  double defect(const std::vector<double>& z) const;

  // Residual u_e - ln G_e(e^u) and its Jacobian (row-major).
  std::vector<double> log_residual(const std::vector<double>& u) const;
  std::vector<double> log_jacobian(const std::vector<double>& u) const;

 private:
  int dim_;
  std::vector<RatioEquation> eqs_;
};

// Translation-invariant form of the general recursion: z = G(z) for graph g,
// activities lam and k children per vertex.
RatioSystem translation_invariant_system(const ConstraintGraph& g, const ActivityVector& lam, int k);

struct NewtonOptions {
  int max_iterations = 200;
  int max_halvings = 30;
  double accept_defect = 1e-10;
  // Iterates with |ln z| beyond this are treated as divergent.
  double log_bound = 60.0;
};

struct NewtonResult {
  std::vector<double> z;
  double defect = 0.0;
  int iterations = 0;
};

// Damped Newton; the step is halved until the residual drops below the worst
// of the last five accepted residuals. Empty when the
// iteration diverges or the final defect exceeds accept_defect.
std::optional<NewtonResult> newton_polish(const RatioSystem& system, const std::vector<double>& seed,
                                          const NewtonOptions& options = {});

struct MultiStartOptions {
  NewtonOptions newton;
  double dedup_tolerance = 1e-7;
  // Roots whose log-Jacobian has reciprocal condition number below
  // degenerate_rcond absorb every other root within degenerate_radius.
  double degenerate_rcond = 1e-6;
  double degenerate_radius = 1e-4;
};

// Smallest over largest singular value of the log-Jacobian at z.
double log_jacobian_rcond(const RatioSystem& system, const std::vector<double>& z);

// Polishes every seed and keeps one representative per root, compared by
// |a - b| <= tol * max(1, |a|) componentwise. Output is sorted
// lexicographically so results do not depend on seed order.
std::vector<NewtonResult> multistart(const RatioSystem& system, const std::vector<std::vector<double>>& seeds,
                                     const MultiStartOptions& options = {});

bool same_point(const std::vector<double>& a, const std::vector<double>& b, double tol);

// points_per_axis^dimension log-spaced seeds over [lo, hi]^dimension.
std::vector<std::vector<double>> log_grid(int dimension, int points_per_axis, double lo, double hi);

}  // namespace hardcore
