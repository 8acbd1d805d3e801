#include "hardcore/path_measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "hardcore/bounds.hpp"
#include "hardcore/errors.hpp"

namespace hardcore {

namespace {

constexpr int kOrder = 2;

double require_window(double lambda) {
  const auto w = contraction_window();
  if (!w.contains(lambda)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "lambda = %.15g is outside the contraction window (%.15g, %.15g)", lambda, w.lower,
                  w.upper);
    throw InvalidInput(buf);
  }
  return z_minus_hinge_k2(lambda);
}

using Pair = std::array<double, 2>;

Pair to_ratio(const LogPair& h) { return {std::exp(h[0]), std::exp(h[1])}; }

double log_distance(const Pair& a, const Pair& b) {
  return std::max(std::abs(std::log(a[0]) - std::log(b[0])), std::abs(std::log(a[1]) - std::log(b[1])));
}

struct Model {
  ConstraintGraph g = builtin(Builtin::Hinge);
  ActivityVector lam;
  double z_minus;

  Pair step_children(const std::vector<double>& flat) const {
    Pair out{};
    step(g, lam, flat, out);
    return out;
  }
};

// Values of every vertex of V_n for one truncation depth, stored compactly.
struct Truncation {
  // homogeneous[s][h]: value of an off-path vertex of side s (0: T1, 1: T2)
  // whose subtree has height h.
  std::array<std::vector<Pair>, 2> homogeneous;
  // path[m]: value of the path vertex in generation m, m = 0..N'.
  std::vector<Pair> path;
};

int side_index(Side s) { return s == Side::T2 ? 1 : 0; }

}  // namespace

ContractionWindow contraction_window() {
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  // z-(lam) decreases from 1 at lam = 9/4; bisect z-(lam) - golden on (9/4, 3].
  auto f = [golden](double lambda) { return z_minus_hinge_k2(lambda) - golden; };
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 1);
  std::uintmax_t max_iter = 2000;
  const auto [a, b] = boost::math::tools::bisect(f, 2.25 + 1e-6, 3.0, tol, max_iter);
  return {2.25, 0.5 * (a + b)};
}

LogPair side_boundary(Side side, double z_minus) {
  const double l = std::log(z_minus);
  return side == Side::T2 ? LogPair{-l, l} : LogPair{l, -l};
}

std::vector<LogPair> build_boundary(double t, double lambda, const TreeShape& shape) {
  if (shape.k() != kOrder) throw InvalidInput("path boundaries are defined for k = 2");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("t must lie in [0, 1]");
  const double zm = require_window(lambda);
  const PathCode path(t, kOrder);
  const int n = shape.n();
  const std::size_t begin = shape.generation_offset(n);
  std::vector<LogPair> out;
  out.reserve(shape.generation_size(n));
  for (std::size_t v = begin; v < begin + shape.generation_size(n); ++v) {
    out.push_back(side_boundary(split_assign(shape, path, address_of(shape, v)), zm));
  }
  return out;
}

LogPair PathField::log_at(std::size_t vertex) const {
  const auto z = field.at(vertex);
  return {std::log(z[0]), std::log(z[1])};
}

std::vector<double> PathField::contraction_ratios(double floor) const {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < history.size(); ++i) {
    if (history[i] > floor && history[i + 1] > floor) out.push_back(history[i + 1] / history[i]);
  }
  return out;
}

std::string PathField::to_csv() const {
  std::string out = "vertex_address,h1,h2,split_tag\n";
  char buf[96];
  for (std::size_t v = 0; v < field.size(); ++v) {
    const auto h = log_at(v);
    std::snprintf(buf, sizeof buf, ",%.15g,%.15g,", h[0], h[1]);
    out += address_of(field.shape(), v).to_string();
    out += buf;
    out += to_string(sides[v]);
    out += '\n';
  }
  return out;
}

int default_depth_limit(int n, double lambda, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidInput("tolerance must lie in (0, 1)");
  const double L = lipschitz_constant(require_window(lambda));
  return n + static_cast<int>(std::ceil(std::log(tol) / std::log(L)));
}

PathField solve_path_field(double t, double lambda, int n, std::optional<int> depth_limit, double tol) {
  if (n < 0) throw InvalidInput("depth n must be >= 0");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("t must lie in [0, 1]");
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be > 0");
  const double zm = require_window(lambda);
  const int N = depth_limit ? *depth_limit : default_depth_limit(n, lambda, tol);
  if (N < n) throw InvalidInput("depth limit N must be >= n");

  Model model{builtin(Builtin::Hinge), ActivityVector::uniform(2, lambda), zm};
  const PathCode code(t, kOrder);
  const auto digits = code.digits(N);
  const double lo = zm * (1.0 - 1e-12);
  const double hi = (1.0 / zm) * (1.0 + 1e-12);
  auto check_box = [&](const Pair& z) {
    if (!(z[0] >= lo && z[0] <= hi && z[1] >= lo && z[1] <= hi)) {
      throw NumericalFailure("path field left the invariant box [z-, 1/z-]");
    }
  };

  // Off-path subtrees by height, shared by every truncation.
  std::array<std::vector<Pair>, 2> homogeneous;
  std::vector<double> flat;
  for (int s = 0; s < 2; ++s) {
    homogeneous[s].push_back(to_ratio(side_boundary(s == 0 ? Side::T1 : Side::T2, zm)));
    for (int h = 1; h <= N; ++h) {
      const Pair child = homogeneous[s].back();
      flat.clear();
      for (int c = 0; c < kOrder; ++c) flat.insert(flat.end(), child.begin(), child.end());
      homogeneous[s].push_back(model.step_children(flat));
      check_box(homogeneous[s].back());
    }
  }

  // Side of the off-path child with digit d of the path vertex in generation m.
  auto child_side = [&](int m, int d) { return d < digits[static_cast<std::size_t>(m)] ? 0 : 1; };

  auto sweep_path = [&](int depth) {
    std::vector<Pair> path(static_cast<std::size_t>(depth) + 1);
    path[static_cast<std::size_t>(depth)] = to_ratio(side_boundary(Side::OnPath, zm));
    for (int m = depth - 1; m >= 0; --m) {
      const int children = m == 0 ? kOrder + 1 : kOrder;
      flat.clear();
      for (int d = 0; d < children; ++d) {
        const Pair& z = d == digits[static_cast<std::size_t>(m)]
                            ? path[static_cast<std::size_t>(m) + 1]
                            : homogeneous[child_side(m, d)][static_cast<std::size_t>(depth - m - 1)];
        flat.insert(flat.end(), z.begin(), z.end());
      }
      path[static_cast<std::size_t>(m)] = model.step_children(flat);
      // The root has k + 1 children; the box bound covers V minus the root.
      if (m > 0) check_box(path[static_cast<std::size_t>(m)]);
    }
    return path;
  };

  const TreeShape shape(kOrder, n);
  PathField out;
  out.t = t;
  out.lambda = lambda;
  out.n = n;
  out.depth_limit = N;
  out.z_minus = zm;
  out.sides = split_all(shape, code);

  // Which off-path sides occur in each generation of V_n.
  std::vector<std::array<bool, 2>> present(static_cast<std::size_t>(n) + 1, {false, false});
  for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
    if (out.sides[v] != Side::OnPath) present[static_cast<std::size_t>(shape.generation_of(v))][side_index(out.sides[v])] = true;
  }

  std::vector<Pair> previous = sweep_path(n);
  for (int depth = n + 1; depth <= N; ++depth) {
    auto current = sweep_path(depth);
    double change = 0.0;
    for (int m = 0; m <= n; ++m) {
      const auto um = static_cast<std::size_t>(m);
      change = std::max(change, log_distance(current[um], previous[um]));
      for (int s = 0; s < 2; ++s) {
        if (!present[um][static_cast<std::size_t>(s)]) continue;
        change = std::max(change, log_distance(homogeneous[s][static_cast<std::size_t>(depth - m)],
                                               homogeneous[s][static_cast<std::size_t>(depth - 1 - m)]));
      }
    }
    out.history.push_back(change);
    previous = std::move(current);
  }
  out.sup_change = out.history.empty() ? std::numeric_limits<double>::infinity() : out.history.back();
  out.converged = out.sup_change <= tol;

  out.field = Field(shape, 2);
  for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
    const int m = shape.generation_of(v);
    const Pair& z = out.sides[v] == Side::OnPath
                        ? previous[static_cast<std::size_t>(m)]
                        : homogeneous[side_index(out.sides[v])][static_cast<std::size_t>(N - m)];
    std::copy(z.begin(), z.end(), out.field.at(v).begin());
  }
  return out;
}

std::optional<VertexAddress> distinguish(const PathField& a, const PathField& b, double tol) {
  if (a.field.shape().n() != b.field.shape().n() || a.field.shape().k() != b.field.shape().k()) {
    throw InvalidInput("fields live on different balls");
  }
  for (std::size_t v = 0; v < a.field.size(); ++v) {
    const auto ha = a.log_at(v);
    const auto hb = b.log_at(v);
    if (std::max(std::abs(ha[0] - hb[0]), std::abs(ha[1] - hb[1])) > tol) return address_of(a.field.shape(), v);
  }
  return std::nullopt;
}

std::optional<VertexAddress> distinguish(double t1, double t2, double lambda, int n, double tol) {
  const auto a = solve_path_field(t1, lambda, n);
  const auto b = solve_path_field(t2, lambda, n);
  return distinguish(a, b, tol);
}

}  // namespace hardcore
