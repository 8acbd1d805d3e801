#include "hardcore/ti_solver.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "hardcore/errors.hpp"

namespace hardcore {

namespace {

void require_positive(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be finite and > 0");
}

void require_order(int k) {
  if (k < 1) throw InvalidInput("k must be >= 1");
}

// Bisection to full double precision on a bracket with a sign change.
template <class F>
double bracketed_root(F f, double lo, double hi) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw NumericalFailure("root bracket has no sign change");
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 1);
  std::uintmax_t max_iter = 2000;
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol, max_iter);
  return 0.5 * (a + b);
}

SolutionKind classify(const std::vector<double>& z, double tol) {
  if (z.size() < 2 || same_point({z[0]}, {z[1]}, tol)) {
    bool all_equal = true;
    for (std::size_t i = 1; i < z.size(); ++i) all_equal = all_equal && same_point({z[0]}, {z[i]}, tol);
    if (all_equal) return SolutionKind::Symmetric;
  }
  return z[0] > z[1] ? SolutionKind::AsymmetricPlus : SolutionKind::AsymmetricMinus;
}

std::vector<TISolution> asymmetric_pair(const ConstraintGraph& g, double lambda, double c) {
  std::vector<TISolution> out;
  const auto cf = closed_form_k2(lambda, c);
  if (!cf) return out;
  const double r1 = ti_residual(g, lambda, 2, cf->upper, cf->lower);
  const double r2 = ti_residual(g, lambda, 2, cf->lower, cf->upper);
  if (r1 > 1e-10 || r2 > 1e-10) {
    throw NumericalFailure("closed-form asymmetric solution fails the " + g.name() + " system");
  }
  out.push_back({{cf->upper, cf->lower}, SolutionKind::AsymmetricPlus, r1});
  out.push_back({{cf->lower, cf->upper}, SolutionKind::AsymmetricMinus, r2});
  return out;
}

// A symmetric root of a system that maps the diagonal into itself is re-solved
// as the scalar equation s = G_1(s, ..., s). At a bifurcation the full
// Jacobian is singular but the diagonal direction is not, so this recovers
// full precision where multi-dimensional Newton stalls near 1e-5.
std::vector<double> diagonal_polish(const RatioSystem& system, const std::vector<double>& z) {
  const std::size_t q = z.size();
  double s = 0.0;
  for (double v : z) s += v / static_cast<double>(q);
  auto diag = [&](double x) { return std::vector<double>(q, x); };
  const auto image = system.map(diag(s));
  for (double v : image) {
    if (std::abs(v - image[0]) > 1e-13 * std::max(1.0, image[0])) return z;
  }
  auto f = [&](double log_x) { return log_x - std::log(system.map(diag(std::exp(log_x)))[0]); };
  double lo = std::log(s) - 0.01;
  double hi = std::log(s) + 0.01;
  if ((f(lo) > 0) == (f(hi) > 0)) return z;
  const double root = std::exp(bracketed_root(f, lo, hi));
  const auto polished = diag(root);
  return system.defect(polished) <= system.defect(z) ? polished : z;
}

}  // namespace

std::string_view to_string(SolutionKind kind) {
  switch (kind) {
    case SolutionKind::Symmetric: return "symmetric";
    case SolutionKind::AsymmetricPlus: return "asymmetric_plus";
    case SolutionKind::AsymmetricMinus: return "asymmetric_minus";
  }
  return "?";
}

double ti_residual(const ConstraintGraph& g, double lambda, int k, double z1, double z2) {
  if (g.q() != 2) throw InvalidInput("ti_residual expects a three-state graph");
  const auto system = translation_invariant_system(g, ActivityVector::uniform(2, lambda), k);
  return system.defect({z1, z2});
}

TISolution solve_hinge_symmetric(double lambda, int k) {
  require_positive(lambda);
  require_order(k);
  auto g = [&](double z) { return z - lambda * std::pow((1.0 + z) / (1.0 + 2.0 * z), k); };
  const double z = bracketed_root(g, 0.0, lambda);
  const double residual = std::abs(g(z)) / std::max(1.0, z);
  return {{z, z}, SolutionKind::Symmetric, residual};
}

TISolution solve_wand_symmetric(double lambda, int k) {
  require_positive(lambda);
  require_order(k);
  auto g = [&](double z) { return z - lambda * std::pow((1.0 + z) / (2.0 * z), k); };
  const double z = bracketed_root(g, std::min(0.5, 0.5 * lambda), std::max(1.0, lambda));
  const double residual = std::abs(g(z)) / std::max(1.0, z);
  return {{z, z}, SolutionKind::Symmetric, residual};
}

std::optional<ClosedFormK2> closed_form_k2(double lambda, double c) {
  require_positive(lambda);
  ClosedFormK2 cf{};
  cf.a = 2.0 / (std::sqrt(lambda) + std::sqrt(lambda + c));
  cf.discriminant = 1.0 - 4.0 * cf.a * cf.a;
  if (!(cf.discriminant > 0.0)) return std::nullopt;
  const double root = std::sqrt(cf.discriminant);
  const double hi = (1.0 + root) / (2.0 * cf.a);
  cf.upper = hi * hi;
  // (1 - sqrt(d)) / 2a = 2a / (1 + sqrt(d)), so the two branches are reciprocal.
  const double lo = 2.0 * cf.a / (1.0 + root);
  cf.lower = lo * lo;
  return cf;
}

std::vector<TISolution> solve_hinge_asymmetric_k2(double lambda) {
  require_positive(lambda);
  if (lambda <= 2.25) return {};
  auto out = asymmetric_pair(builtin(Builtin::Hinge), lambda, 4.0);
  const double sum = hinge_asymmetric_sum_k2(lambda);
  for (const auto& s : out) {
    if (std::abs(1.0 + s.z1() + s.z2() - sum) > 1e-10 * sum) {
      throw NumericalFailure("asymmetric hinge solution violates the sum identity");
    }
  }
  return out;
}

std::vector<TISolution> solve_wand_asymmetric_k2(double lambda) {
  require_positive(lambda);
  if (lambda <= 1.0) return {};
  return asymmetric_pair(builtin(Builtin::Wand), lambda, 8.0);
}

double hinge_asymmetric_sum_k2(double lambda) {
  require_positive(lambda);
  return 0.5 * (lambda + std::sqrt(lambda * lambda + 4.0 * lambda));
}

namespace {

double pipe_log_r(double x, int k) { return (std::log(x) + k * std::log1p(x)) / (k + 1); }

}  // namespace

double pipe_f(double x, int k) {
  require_order(k);
  if (x == 0.0) return 0.0;
  if (!(x > 0.0)) throw InvalidInput("pipe f is defined for x >= 0");
  const double log_r = pipe_log_r(x, k);
  const double r = std::exp(log_r);
  return std::exp(k * (log_r - std::log1p(r)));
}

double pipe_f_prime(double x, int k) {
  require_order(k);
  if (!(x > 0.0)) throw InvalidInput("pipe f' is defined for x > 0");
  const double log_r = pipe_log_r(x, k);
  const double r = std::exp(log_r);
  const double log_value = std::log(static_cast<double>(k) / (k + 1)) + std::log((k + 1) * x + 1.0) - std::log(x) -
                           std::log1p(x) + k * log_r - (k + 1) * std::log1p(r);
  return std::exp(log_value);
}

TISolution solve_pipe(double lambda, int k) {
  require_positive(lambda);
  require_order(k);
  // phi(x) = ln f(x) - ln(x / lam): +inf at 0+, negative at x = lam because f < 1.
  auto phi = [&](double log_x) { return std::log(pipe_f(std::exp(log_x), k)) - log_x + std::log(lambda); };
  const double hi = std::log(lambda);
  double lo = hi - std::log(10.0);
  while (phi(lo) <= 0.0) {
    lo -= std::log(10.0);
    if (lo < -700.0) throw NumericalFailure("pipe root bracket not found");
  }
  const double x = std::exp(bracketed_root(phi, lo, hi));
  const double u = std::pow(x / lambda, 1.0 / k);
  if (!(u < 1.0)) throw NumericalFailure("pipe recovery produced u >= 1");
  std::vector<double> z{u / (1.0 - u), x};

  const auto g = builtin(Builtin::Pipe);
  const auto system = translation_invariant_system(g, ActivityVector::uniform(2, lambda), k);
  double residual = system.defect(z);
  if (residual > 1e-12) {
    if (auto polished = newton_polish(system, z)) {
      z = polished->z;
      residual = polished->defect;
    }
  }
  if (residual > 1e-10) throw NumericalFailure("pipe solution fails its fixed-point system");
  return {z, classify(z, 1e-7), residual};
}

PipeCertificate pipe_uniqueness_certificate(double lambda, int k) {
  require_positive(lambda);
  require_order(k);
  PipeCertificate cert;
  auto count_sign_changes = [](auto fn, double log_lo, double log_hi, int points) {
    int roots = 0;
    double prev = fn(log_lo);
    for (int i = 1; i < points; ++i) {
      const double cur = fn(log_lo + (log_hi - log_lo) * i / (points - 1));
      if (cur == 0.0 || (prev != 0.0 && (cur > 0) != (prev > 0))) ++roots;
      prev = cur;
    }
    return roots;
  };

  cert.f_increasing = true;
  for (int i = 0; i < 481; ++i) {
    const double x = std::pow(10.0, -12.0 + 24.0 * i / 480.0);
    if (!(pipe_f_prime(x, k) > 0.0)) cert.f_increasing = false;
  }

  // (k+1) x = 1 / r(x) + k
  auto reduced = [&](double log_x) {
    const double x = std::exp(log_x);
    return (k + 1) * x - std::exp(-pipe_log_r(x, k)) - k;
  };
  cert.reduced_roots = count_sign_changes(reduced, std::log(1e-12), std::log(1e12), 2001);

  // x / lam = f(x) on (0, 10 lam]; below x_lo the x^(k/(k+1)) growth of f dominates.
  auto pipe_eq = [&](double log_x) { return std::log(pipe_f(std::exp(log_x), k)) - log_x + std::log(lambda); };
  const double log_lo = (k + 1) * std::log(std::min(lambda, 1.0)) + std::log(1e-12);
  cert.pipe_roots = count_sign_changes(pipe_eq, log_lo, std::log(10.0 * lambda), 4001);

  cert.endpoints = pipe_f(1e-40, k) < 1e-10 && 1.0 - pipe_f(1e40, k) < 1e-10 && pipe_f(0.0, k) == 0.0;
  return cert;
}

SolutionSet count_ti_solutions(const ConstraintGraph& g, const ActivityVector& lam, int k,
                               const CountOptions& options) {
  require_order(k);
  const auto system = translation_invariant_system(g, lam, k);
  int points = options.points_per_axis;
  if (g.q() > 2) points = std::max(3, static_cast<int>(std::pow(static_cast<double>(points * points), 1.0 / g.q())));
  const auto seeds = log_grid(g.q(), points, options.grid_lo, options.grid_hi);
  const auto roots = multistart(system, seeds, options.multistart);
  if (roots.empty()) throw NumericalFailure("no translation-invariant solution converged");
  SolutionSet out;
  out.reserve(roots.size());
  for (const auto& r : roots) {
    // Roots within the degenerate radius of a diagonal root are that root,
    // approached along the flat direction of a bifurcation.
    const auto diagonal = diagonal_polish(system, r.z);
    if (diagonal != r.z && same_point(diagonal, r.z, options.multistart.degenerate_radius)) {
      const bool seen = std::any_of(out.begin(), out.end(), [&](const TISolution& s) {
        return same_point(s.z, diagonal, options.multistart.dedup_tolerance);
      });
      if (!seen) out.push_back({diagonal, SolutionKind::Symmetric, system.defect(diagonal)});
      continue;
    }
    out.push_back({r.z, classify(r.z, options.multistart.dedup_tolerance), r.defect});
  }
  std::sort(out.begin(), out.end(), [](const TISolution& a, const TISolution& b) { return a.z < b.z; });
  return out;
}

double two_state_critical_lambda(int k) {
  if (k < 2) throw InvalidInput("two-state critical activity needs k >= 2");
  return std::pow(static_cast<double>(k) / (k - 1), k) / (k - 1);
}

std::optional<double> critical_lambda(Builtin model, int k, double tol) {
  require_order(k);
  if (model != Builtin::Hinge && model != Builtin::Wand) throw InvalidInput("critical_lambda supports hinge and wand");
  if (k == 2) return model == Builtin::Hinge ? 2.25 : 1.0;
  const auto g = builtin(model);
  // The branches split off the symmetric point, so a coarse seed grid sees them.
  CountOptions options;
  options.points_per_axis = 24;
  auto count = [&](double lambda) {
    return static_cast<int>(count_ti_solutions(g, ActivityVector::uniform(2, lambda), k, options).size());
  };
  double prev = 1e-3;
  if (count(prev) > 1) return std::nullopt;
  for (double lambda = prev * 1.25; lambda <= 1e6; lambda *= 1.25) {
    if (count(lambda) > 1) return bisect_transition(count, prev, lambda, tol * lambda);
    prev = lambda;
  }
  return std::nullopt;
}

}  // namespace hardcore
