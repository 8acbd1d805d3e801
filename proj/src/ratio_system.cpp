#include "hardcore/ratio_system.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "hardcore/errors.hpp"

namespace hardcore {

double AffineForm::operator()(const std::vector<double>& z) const {
  double value = constant;
  for (std::size_t m = 0; m < coeffs.size(); ++m) value += coeffs[m] * z[m];
  return value;
}

RatioSystem::RatioSystem(int dimension, std::vector<RatioEquation> equations)
    : dim_(dimension), eqs_(std::move(equations)) {
  if (dim_ < 1 || static_cast<int>(eqs_.size()) != dim_) throw InvalidInput("ratio system must be square");
  std::vector<bool> seen(static_cast<std::size_t>(dim_), false);
  for (auto& e : eqs_) {
    if (e.target < 0 || e.target >= dim_ || seen[static_cast<std::size_t>(e.target)]) {
      throw InvalidInput("ratio system targets must be a permutation of the unknowns");
    }
    seen[static_cast<std::size_t>(e.target)] = true;
    e.numerator.coeffs.resize(static_cast<std::size_t>(dim_), 0.0);
    e.denominator.coeffs.resize(static_cast<std::size_t>(dim_), 0.0);
    if (!(e.scale > 0.0)) throw InvalidInput("ratio equation scale must be > 0");
  }
}

std::vector<double> RatioSystem::map(const std::vector<double>& z) const {
  std::vector<double> out(static_cast<std::size_t>(dim_));
  for (const auto& e : eqs_) {
    out[static_cast<std::size_t>(e.target)] = e.scale * std::pow(e.numerator(z) / e.denominator(z), e.power);
  }
  return out;
}

double RatioSystem::defect(const std::vector<double>& z) const {
  const auto g = map(z);
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double d = std::abs(z[i] - g[i]) / std::max(1.0, std::abs(z[i]));
    if (!std::isfinite(d)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, d);
  }
  return worst;
}

std::vector<double> RatioSystem::log_residual(const std::vector<double>& u) const {
  std::vector<double> z(u.size());
  std::transform(u.begin(), u.end(), z.begin(), [](double x) { return std::exp(x); });
  std::vector<double> r(static_cast<std::size_t>(dim_));
  for (std::size_t e = 0; e < eqs_.size(); ++e) {
    const auto& eq = eqs_[e];
    r[e] = u[static_cast<std::size_t>(eq.target)] - std::log(eq.scale) -
           eq.power * (std::log(eq.numerator(z)) - std::log(eq.denominator(z)));
  }
  return r;
}

std::vector<double> RatioSystem::log_jacobian(const std::vector<double>& u) const {
  std::vector<double> z(u.size());
  std::transform(u.begin(), u.end(), z.begin(), [](double x) { return std::exp(x); });
  const auto n = static_cast<std::size_t>(dim_);
  std::vector<double> jac(n * n, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    const auto& eq = eqs_[e];
    const double num = eq.numerator(z);
    const double den = eq.denominator(z);
    for (std::size_t m = 0; m < n; ++m) {
      jac[e * n + m] = -eq.power * (eq.numerator.coeffs[m] * z[m] / num - eq.denominator.coeffs[m] * z[m] / den);
    }
    jac[e * n + static_cast<std::size_t>(eq.target)] += 1.0;
  }
  return jac;
}

RatioSystem translation_invariant_system(const ConstraintGraph& g, const ActivityVector& lam, int k) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  if (lam.num_states() != g.num_states()) throw InvalidInput("activity vector size does not match graph");
  const int q = g.q();
  AffineForm den;
  den.constant = g.adj(0, 0);
  for (int i = 1; i <= q; ++i) den.coeffs.push_back(g.adj(0, i));
  std::vector<RatioEquation> eqs;
  for (int j = 1; j <= q; ++j) {
    RatioEquation eq;
    eq.target = j - 1;
    eq.scale = lam.ratio(j);
    eq.numerator.constant = g.adj(j, 0);
    for (int i = 1; i <= q; ++i) eq.numerator.coeffs.push_back(g.adj(j, i));
    eq.denominator = den;
    eq.power = k;
    eqs.push_back(std::move(eq));
  }
  return RatioSystem(q, std::move(eqs));
}

namespace {

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return std::isfinite(m) ? m : std::numeric_limits<double>::infinity();
}

}  // namespace

std::optional<NewtonResult> newton_polish(const RatioSystem& system, const std::vector<double>& seed,
                                          const NewtonOptions& options) {
  const auto n = static_cast<std::size_t>(system.dimension());
  if (seed.size() != n) throw InvalidInput("seed dimension mismatch");
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(seed[i] > 0.0)) return std::nullopt;
    u[i] = std::log(seed[i]);
  }
  auto r = system.log_residual(u);
  double norm = sup_norm(r);
  std::array<double, 5> recent;
  recent.fill(norm);
  int it = 0;
  for (; it < options.max_iterations && norm > 0.0; ++it) {
    const auto jac = system.log_jacobian(u);
    Eigen::MatrixXd J(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t a = 0; a < n; ++a) {
      rhs(static_cast<Eigen::Index>(a)) = -r[a];
      for (std::size_t b = 0; b < n; ++b) J(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = jac[a * n + b];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) break;
    const Eigen::VectorXd delta = lu.solve(rhs);
    if (!delta.allFinite()) return std::nullopt;

    // Nonmonotone acceptance: compare against the worst of the last few
    // residuals. Near a degenerate root full steps converge but need not
    // decrease the residual every time, and a monotone rule stalls there.
    const double reference = *std::max_element(recent.begin(), recent.end());
    double alpha = 1.0;
    std::vector<double> trial(n);
    std::vector<double> trial_r;
    double trial_norm = std::numeric_limits<double>::infinity();
    for (int h = 0; h <= options.max_halvings; ++h, alpha *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + alpha * delta(static_cast<Eigen::Index>(i));
      trial_r = system.log_residual(trial);
      trial_norm = sup_norm(trial_r);
      if (trial_norm <= reference) break;
    }
    if (!(trial_norm <= reference)) break;  // residual is at its floating-point floor
    double step = 0.0;
    for (std::size_t i = 0; i < n; ++i) step = std::max(step, std::abs(trial[i] - u[i]));
    u = trial;
    r = std::move(trial_r);
    norm = trial_norm;
    recent[static_cast<std::size_t>(it) % recent.size()] = norm;
    if (sup_norm(u) > options.log_bound) return std::nullopt;
    if (step <= 1e-15) break;
  }
  NewtonResult result;
  result.z.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.z[i] = std::exp(u[i]);
  result.defect = system.defect(result.z);
  result.iterations = it;
  if (!(result.defect <= options.accept_defect)) return std::nullopt;
  return result;
}

bool same_point(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol * std::max(1.0, std::abs(a[i]))) return false;
  }
  return true;
}

double log_jacobian_rcond(const RatioSystem& system, const std::vector<double>& z) {
  const auto n = static_cast<Eigen::Index>(system.dimension());
  std::vector<double> u(z.size());
  std::transform(z.begin(), z.end(), u.begin(), [](double x) { return std::log(x); });
  const auto jac = system.log_jacobian(u);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> J(jac.data(), n, n);
  const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues();
  return sv(0) > 0.0 ? sv(n - 1) / sv(0) : 0.0;
}

std::vector<NewtonResult> multistart(const RatioSystem& system, const std::vector<std::vector<double>>& seeds,
                                     const MultiStartOptions& options) {
  std::vector<NewtonResult> roots;
  for (const auto& seed : seeds) {
    auto polished = newton_polish(system, seed, options.newton);
    if (!polished) continue;
    auto it = std::find_if(roots.begin(), roots.end(), [&](const NewtonResult& r) {
      return same_point(r.z, polished->z, options.dedup_tolerance);
    });
    if (it == roots.end()) {
      roots.push_back(std::move(*polished));
    } else if (polished->defect < it->defect) {
      *it = std::move(*polished);
    }
  }
  // At a bifurcation point several branches meet in one degenerate root and
  // Newton stops anywhere in a small cloud around it; collapse such clouds.
  std::vector<bool> degenerate(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    degenerate[i] = log_jacobian_rcond(system, roots[i].z) < options.degenerate_rcond;
  }
  std::vector<NewtonResult> merged;
  std::vector<bool> merged_degenerate;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    bool absorbed = false;
    for (std::size_t j = 0; j < merged.size() && !absorbed; ++j) {
      if ((degenerate[i] || merged_degenerate[j]) && same_point(merged[j].z, roots[i].z, options.degenerate_radius)) {
        if (roots[i].defect < merged[j].defect) merged[j] = roots[i];
        merged_degenerate[j] = merged_degenerate[j] || degenerate[i];
        absorbed = true;
      }
    }
    if (!absorbed) {
      merged.push_back(roots[i]);
      merged_degenerate.push_back(degenerate[i]);
    }
  }
  std::sort(merged.begin(), merged.end(), [](const NewtonResult& a, const NewtonResult& b) { return a.z < b.z; });
  return merged;
}

std::vector<std::vector<double>> log_grid(int dimension, int points_per_axis, double lo, double hi) {
  if (dimension < 1 || points_per_axis < 1 || !(lo > 0.0) || !(hi >= lo)) throw InvalidInput("bad grid specification");
  std::vector<double> axis(static_cast<std::size_t>(points_per_axis));
  for (int i = 0; i < points_per_axis; ++i) {
    const double f = points_per_axis == 1 ? 0.5 : static_cast<double>(i) / (points_per_axis - 1);
    axis[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
  }
  std::size_t total = 1;
  for (int d = 0; d < dimension; ++d) total *= static_cast<std::size_t>(points_per_axis);
  std::vector<std::vector<double>> grid;
  grid.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<double> p(static_cast<std::size_t>(dimension));
    std::size_t rest = idx;
    for (int d = dimension - 1; d >= 0; --d) {
      p[static_cast<std::size_t>(d)] = axis[rest % static_cast<std::size_t>(points_per_axis)];
      rest /= static_cast<std::size_t>(points_per_axis);
    }
    grid.push_back(std::move(p));
  }
  return grid;
}

}  // namespace hardcore
