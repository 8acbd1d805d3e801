#include "hardcore/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "hardcore/errors.hpp"
#include "hardcore/ti_solver.hpp"

namespace hardcore {

namespace {

void require(double lambda, int k) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be finite and > 0");
  if (k < 1) throw InvalidInput("k must be >= 1");
}

template <class F>
double bisect_full(F f, double lo, double hi) {
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 1);
  std::uintmax_t max_iter = 2000;
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol, max_iter);
  return 0.5 * (a + b);
}

// Roots of f on [lo, hi] from sign changes over `points` log-spaced nodes.
template <class F>
std::vector<double> sign_change_roots(F f, double lo, double hi, int points) {
  std::vector<double> roots;
  double x_prev = lo;
  double f_prev = f(lo);
  for (int i = 1; i < points; ++i) {
    const double x = i == points - 1 ? hi : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
    const double fx = f(x);
    if (fx == 0.0) {
      roots.push_back(x);
    } else if (f_prev != 0.0 && (fx > 0) != (f_prev > 0)) {
      roots.push_back(bisect_full(f, x_prev, x));
    }
    x_prev = x;
    f_prev = fx;
  }
  return roots;
}

}  // namespace

double gamma_map(double x, double lambda, int k) { return lambda * std::pow((1.0 + x) / (1.0 + 2.0 * x), k); }

double gamma_derivative(double x, double lambda, int k) {
  return -static_cast<double>(k) * gamma_map(x, lambda, k) / ((1.0 + x) * (1.0 + 2.0 * x));
}

double gamma_fixed_point(double lambda, int k) {
  require(lambda, k);
  auto f = [&](double x) { return gamma_map(x, lambda, k) - x; };
  return bisect_full(f, 0.0, lambda);
}

double kesten_quadratic(double x, int k) { return 2.0 * x * x + (3.0 - k) * x + 1.0; }

bool kesten_condition(double lambda, int k) {
  require(lambda, k);
  const double x = gamma_fixed_point(lambda, k);
  const double quad = kesten_quadratic(x, k);
  const bool by_quadratic = quad < 0.0;
  const bool by_derivative = gamma_derivative(x, lambda, k) < -1.0;
  if (by_quadratic != by_derivative && std::abs(quad) > 1e-9) {
    throw NumericalFailure("Kesten quadratic and derivative forms disagree");
  }
  return by_quadratic;
}

std::optional<PeriodDoublingWindow> period_doubling_window(int k) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  const double disc = static_cast<double>((k - 3) * (k - 3) - 8);
  if (k < 6 || disc <= 0.0) return std::nullopt;
  PeriodDoublingWindow w{};
  w.x_low = (k - 3 - std::sqrt(disc)) / 4.0;
  w.x_high = (k - 3 + std::sqrt(disc)) / 4.0;
  auto activity = [k](double x) { return x * std::pow((1.0 + 2.0 * x) / (1.0 + x), k); };
  w.lambda_low = activity(w.x_low);
  w.lambda_high = activity(w.x_high);
  return w;
}

std::vector<double> gamma2_fixed_points(double lambda, int k) {
  require(lambda, k);
  const double x_star = gamma_fixed_point(lambda, k);
  auto g2 = [&](double x) { return gamma_map(gamma_map(x, lambda, k), lambda, k) - x; };
  // Every fixed point of gamma o gamma lies in the range (lam 2^-k, lam) of gamma.
  const double lo = lambda * std::pow(0.5, k) * (1.0 - 1e-9);
  const double hi = lambda * (1.0 + 1e-9);
  const double gap = 1e-9;
  std::vector<double> points{x_star};
  if (lo < x_star * (1.0 - gap)) {
    for (double r : sign_change_roots(g2, lo, x_star * (1.0 - gap), 3000)) points.push_back(r);
  }
  if (x_star * (1.0 + gap) < hi) {
    for (double r : sign_change_roots(g2, x_star * (1.0 + gap), hi, 3000)) points.push_back(r);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, a); }),
               points.end());
  return points;
}

std::vector<std::pair<double, double>> solve_period2_symmetric(double lambda, int k) {
  const auto points = gamma2_fixed_points(lambda, k);
  std::vector<std::pair<double, double>> out;
  for (double x : points) {
    const double y = gamma_map(x, lambda, k);
    if (std::abs(gamma_map(y, lambda, k) - x) > 1e-10 * std::max(1.0, x)) {
      throw NumericalFailure("two-cycle of gamma failed to close");
    }
    out.emplace_back(x, y);
  }
  const bool has_cycle = out.size() > 1;
  const double x_star = gamma_fixed_point(lambda, k);
  if (has_cycle != kesten_condition(lambda, k) && std::abs(kesten_quadratic(x_star, k)) > 1e-9) {
    throw NumericalFailure("two-cycle presence disagrees with the Kesten condition");
  }
  return out;
}

std::string_view to_string(Period2Kind kind) { return kind == Period2Kind::Diagonal ? "diagonal" : "alternating"; }

RatioSystem period2_system(const ConstraintGraph& g, const ActivityVector& lam, int k) {
  const auto ti = translation_invariant_system(g, lam, k);
  const int q = ti.dimension();
  std::vector<RatioEquation> eqs;
  auto shifted = [q](const AffineForm& f, int offset) {
    AffineForm out;
    out.constant = f.constant;
    out.coeffs.assign(static_cast<std::size_t>(2 * q), 0.0);
    for (int m = 0; m < q; ++m) out.coeffs[static_cast<std::size_t>(m + offset)] = f.coeffs[static_cast<std::size_t>(m)];
    return out;
  };
  for (const auto& e : ti.equations()) {
    // z_j = G_j(t)
    eqs.push_back({e.target, e.scale, shifted(e.numerator, q), shifted(e.denominator, q), e.power});
  }
  for (const auto& e : ti.equations()) {
    // t_j = G_j(z)
    eqs.push_back({e.target + q, e.scale, shifted(e.numerator, 0), shifted(e.denominator, 0), e.power});
  }
  return RatioSystem(2 * q, std::move(eqs));
}

std::vector<Period2Solution> solve_period2_full(const ConstraintGraph& g, const ActivityVector& lam, int k) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  const auto system = period2_system(g, lam, k);
  const auto ti = translation_invariant_system(g, lam, k);
  const int q = g.q();
  const int points = q == 2 ? 40 : std::max(3, static_cast<int>(std::pow(1600.0, 1.0 / q)));
  std::vector<std::vector<double>> seeds;
  for (const auto& z : log_grid(q, points, 1e-4, 1e4)) {
    auto seed = z;
    const auto t = ti.map(z);
    seed.insert(seed.end(), t.begin(), t.end());
    seeds.push_back(std::move(seed));
  }
  std::vector<Period2Solution> out;
  for (const auto& root : multistart(system, seeds)) {
    Period2Solution s;
    s.z.assign(root.z.begin(), root.z.begin() + q);
    s.t.assign(root.z.begin() + q, root.z.end());
    s.kind = same_point(s.z, s.t, 1e-7) ? Period2Kind::Diagonal : Period2Kind::Alternating;
    s.residual = root.defect;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Period2Solution> solve_period2_full(double lambda, int k) {
  require(lambda, k);
  const auto g = builtin(Builtin::Hinge);
  const auto lam = ActivityVector::uniform(2, lambda);
  auto out = solve_period2_full(g, lam, k);
  auto contains = [&](const std::vector<double>& z, const std::vector<double>& t) {
    return std::any_of(out.begin(), out.end(),
                       [&](const Period2Solution& s) { return same_point(s.z, z, 1e-6) && same_point(s.t, t, 1e-6); });
  };
  for (const auto& sol : count_ti_solutions(g, lam, k)) {
    if (!contains(sol.z, sol.z)) throw NumericalFailure("period-two search missed a translation-invariant solution");
  }
  for (const auto& [x0, x1] : solve_period2_symmetric(lambda, k)) {
    if (!contains({x0, x0}, {x1, x1})) throw NumericalFailure("period-two search missed a symmetric two-cycle");
  }
  return out;
}

}  // namespace hardcore
