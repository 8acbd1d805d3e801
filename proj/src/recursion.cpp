#include "hardcore/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "hardcore/errors.hpp"

namespace hardcore {

namespace {

constexpr int kLogSpaceChildren = 20;

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_sum_exp3(double a, double b, double c) {
  const double m = std::max({a, b, c});
  return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

}  // namespace

Field::Field(TreeShape shape, int q) : shape_(shape), q_(q) {
  if (q < 1) throw InvalidInput("field needs q >= 1 components");
  values_.assign(shape_.vertex_count() * static_cast<std::size_t>(q_), 0.0);
}

std::span<const double> Field::generation(int m) const {
  const std::size_t begin = shape_.generation_offset(m) * static_cast<std::size_t>(q_);
  const std::size_t end = shape_.generation_offset(m + 1) * static_cast<std::size_t>(q_);
  return std::span<const double>(values_).subspan(begin, end - begin);
}

std::string Field::to_csv() const {
  std::string out = "vertex_address";
  for (int i = 1; i <= q_; ++i) out += ",z" + std::to_string(i);
  out += '\n';
  char buf[32];
  for (std::size_t v = 0; v < size(); ++v) {
    out += address_of(shape_, v).to_string();
    for (double z : at(v)) {
      std::snprintf(buf, sizeof buf, ",%.15g", z);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void step(const ConstraintGraph& g, const ActivityVector& lam, std::span<const double> children,
          std::span<double> parent) {
  const int q = g.q();
  const auto uq = static_cast<std::size_t>(q);
  if (lam.num_states() != g.num_states()) throw InvalidInput("activity vector size does not match graph");
  if (parent.size() != uq || children.size() % uq != 0) throw InvalidInput("field vectors must have q components");
  const std::size_t count = children.size() / uq;
  const bool log_space = count >= static_cast<std::size_t>(kLogSpaceChildren);

  // Per state: running product (or log-sum) of numerator/denominator ratios.
  std::array<double, 16> small{};
  std::vector<double> large;
  double* acc = small.data();
  if (uq > small.size()) {
    large.assign(uq, 0.0);
    acc = large.data();
  }
  for (std::size_t j = 0; j < uq; ++j) acc[j] = log_space ? 0.0 : 1.0;

  for (std::size_t c = 0; c < count; ++c) {
    const double* z = children.data() + c * uq;
    double den = g.adj(0, 0);
    for (int i = 1; i <= q; ++i) {
      if (!(z[i - 1] > 0.0)) throw InvalidInput("child field values must be strictly positive");
      den += g.adj(0, i) * z[i - 1];
    }
    if (!(den > 0.0)) {
      throw SingularModel("vanishing denominator at child " + std::to_string(c) + " of the recursion step");
    }
    for (int j = 1; j <= q; ++j) {
      double num = g.adj(j, 0);
      for (int i = 1; i <= q; ++i) num += g.adj(j, i) * z[i - 1];
      if (log_space) {
        acc[j - 1] += std::log(num) - std::log(den);
      } else {
        acc[j - 1] *= num / den;
      }
    }
  }
  for (int j = 1; j <= q; ++j) {
    const double value = log_space ? std::exp(std::log(lam.ratio(j)) + acc[j - 1]) : lam.ratio(j) * acc[j - 1];
    parent[static_cast<std::size_t>(j - 1)] = value;
  }
}

std::vector<double> step(const ConstraintGraph& g, const ActivityVector& lam,
                         const std::vector<std::vector<double>>& children) {
  const auto uq = static_cast<std::size_t>(g.q());
  std::vector<double> flat;
  flat.reserve(children.size() * uq);
  for (const auto& c : children) {
    if (c.size() != uq) throw InvalidInput("field vectors must have q components");
    flat.insert(flat.end(), c.begin(), c.end());
  }
  std::vector<double> out(uq);
  step(g, lam, flat, out);
  return out;
}

Field inward_sweep(const ConstraintGraph& g, const ActivityVector& lam, const TreeShape& shape,
                   std::span<const double> boundary, const SweepOptions& options) {
  const int q = g.q();
  const auto uq = static_cast<std::size_t>(q);
  Field field(shape, q);
  const std::size_t leaves = shape.generation_size(shape.n());
  if (boundary.size() != leaves * uq) throw InvalidInput("boundary must provide q values for every vertex of W_n");
  for (double v : boundary) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("boundary values must be finite and > 0");
  }
  auto values = field.values();
  std::copy(boundary.begin(), boundary.end(), values.begin() + static_cast<std::ptrdiff_t>(shape.generation_offset(shape.n()) * uq));

  auto sweep_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      const std::size_t first = shape.first_child(v);
      const auto count = static_cast<std::size_t>(shape.child_count(v));
      step(g, lam, std::span<const double>(values.data() + first * uq, count * uq), field.at(v));
    }
  };

  const int threads = std::max(1, options.threads);
  for (int m = shape.n() - 1; m >= 0; --m) {
    const std::size_t begin = shape.generation_offset(m);
    const std::size_t end = shape.generation_offset(m + 1);
    const std::size_t width = end - begin;
    if (threads == 1 || width < 256) {
      sweep_range(begin, end);
      continue;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (width + static_cast<std::size_t>(threads) - 1) / static_cast<std::size_t>(threads);
    for (std::size_t lo = begin; lo < end; lo += chunk) {
      pool.emplace_back(sweep_range, lo, std::min(end, lo + chunk));
    }
  }
  return field;
}

LogPair log_field_map(const LogPair& h) {
  const double log_total = log_sum_exp3(0.0, h[0], h[1]);
  return {softplus(h[0]) - log_total, softplus(h[1]) - log_total};
}

std::array<double, 4> log_field_jacobian(const LogPair& h) {
  const double log_total = log_sum_exp3(0.0, h[0], h[1]);
  const double p1 = std::exp(h[0] - log_total);  // e^h1 / S
  const double p2 = std::exp(h[1] - log_total);
  const double s1 = 1.0 / (1.0 + std::exp(-h[0]));  // e^h1 / (1 + e^h1)
  const double s2 = 1.0 / (1.0 + std::exp(-h[1]));
  return {s1 - p1, -p2, -p1, s2 - p2};
}

double injectivity_determinant(const LogPair& l) { return -(1.0 + std::exp(l[0]) + std::exp(l[1])); }

LipschitzBox lipschitz_box(double z_minus) {
  if (!(z_minus > 0.0 && z_minus < 1.0)) throw InvalidInput("z- must lie in (0,1)");
  const double lo = std::log(z_minus);
  return {lo, -lo};
}

double lipschitz_constant(double z_minus) {
  if (!(z_minus > 0.0 && z_minus < 1.0)) throw InvalidInput("z- must lie in (0,1)");
  return 2.0 / (1.0 + z_minus + z_minus * z_minus);
}

PartialBounds partial_derivative_bounds(double z_minus) {
  if (!(z_minus > 0.0 && z_minus < 1.0)) throw InvalidInput("z- must lie in (0,1)");
  const double r = std::sqrt(z_minus + 1.0) + std::sqrt(z_minus);
  return {1.0 / (r * r), 1.0 / (1.0 + z_minus + z_minus * z_minus)};
}

}  // namespace hardcore
