#include "hardcore/finite_oracle.hpp"

#include <map>

#include "hardcore/errors.hpp"

namespace hardcore {

namespace {

void require_enumerable(const TreeShape& shape) {
  if (shape.vertex_count() > kEnumerationLimit) {
    throw InvalidInput("V_n has " + std::to_string(shape.vertex_count()) + " vertices; enumeration is limited to " +
                       std::to_string(kEnumerationLimit));
  }
}

void require_shape(int k, int n) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  if (n < 0) throw InvalidInput("depth n must be >= 0");
}

// Visits every admissible configuration on V_n, assigning vertices in level
// order so each new vertex only needs its parent checked.
template <class Visit>
void for_each_admissible(const ConstraintGraph& g, const TreeShape& shape, Visit&& visit) {
  const std::size_t size = shape.vertex_count();
  std::vector<State> cfg(size, 0);
  auto recurse = [&](auto&& self, std::size_t v) -> void {
    if (v == size) {
      visit(cfg);
      return;
    }
    for (State s = 0; s < g.num_states(); ++s) {
      if (v > 0 && !g.adj(cfg[shape.parent_of(v)], s)) continue;
      cfg[v] = s;
      self(self, v + 1);
    }
  };
  recurse(recurse, 0);
}

}  // namespace

std::vector<std::vector<State>> enumerate_admissible(const ConstraintGraph& g, const TreeShape& shape) {
  require_enumerable(shape);
  std::vector<std::vector<State>> out;
  for_each_admissible(g, shape, [&](const std::vector<State>& cfg) { out.push_back(cfg); });
  return out;
}

BigCount count_admissible_enumerated(const ConstraintGraph& g, int k, int n) {
  require_shape(k, n);
  const TreeShape shape(k, n);
  require_enumerable(shape);
  BigCount count = 0;
  for_each_admissible(g, shape, [&](const std::vector<State>&) { ++count; });
  return count;
}

BigCount count_admissible_dp(const ConstraintGraph& g, int k, int n) {
  require_shape(k, n);
  const int states = g.num_states();
  // below[s]: admissible fillings of a subtree of the current height whose top is in state s.
  std::vector<BigCount> below(static_cast<std::size_t>(states), 1);
  auto lift = [&](int children) {
    std::vector<BigCount> up(static_cast<std::size_t>(states));
    for (State s = 0; s < states; ++s) {
      BigCount per_child = 0;
      for (State c = 0; c < states; ++c) {
        if (g.adj(s, c)) per_child += below[static_cast<std::size_t>(c)];
      }
      up[static_cast<std::size_t>(s)] = boost::multiprecision::pow(per_child, static_cast<unsigned>(children));
    }
    return up;
  };
  for (int h = 1; h < n; ++h) below = lift(k);
  if (n >= 1) below = lift(k + 1);
  BigCount total = 0;
  for (const auto& c : below) total += c;
  return total;
}

AdmissibleCount count_admissible(const ConstraintGraph& g, int k, int n) {
  AdmissibleCount out;
  out.value = count_admissible_dp(g, k, n);
  if (TreeShape(k, n).vertex_count() <= kEnumerationLimit) {
    if (count_admissible_enumerated(g, k, n) != out.value) {
      throw NumericalFailure("enumeration and DP disagree on the admissible count");
    }
    out.enumerated = true;
  }
  return out;
}

double partition_function(const ConstraintGraph& g, const ActivityVector& lam, int k, int n,
                          const std::vector<State>& boundary) {
  require_shape(k, n);
  if (lam.num_states() != g.num_states()) throw InvalidInput("activity vector size does not match graph");
  const TreeShape outer(k, n + 1);
  if (boundary.size() != outer.generation_size(n + 1)) {
    throw InvalidInput("boundary must give one state per vertex of W_{n+1}");
  }
  for (State s : boundary) {
    if (s < 0 || s >= g.num_states()) throw InvalidInput("boundary state out of range");
  }
  const int states = g.num_states();
  const auto us = static_cast<std::size_t>(states);
  // Per-vertex state sums, generation by generation from W_n inward.
  std::vector<double> sums(outer.generation_size(n) * us);
  for (std::size_t r = 0; r < outer.generation_size(n); ++r) {
    const std::size_t v = outer.generation_offset(n) + r;
    const std::size_t first = outer.first_child(v) - outer.generation_offset(n + 1);
    for (State s = 0; s < states; ++s) {
      bool ok = true;
      for (int c = 0; c < outer.child_count(v); ++c) ok = ok && g.adj(s, boundary[first + static_cast<std::size_t>(c)]);
      sums[r * us + static_cast<std::size_t>(s)] = ok ? lam[s] : 0.0;
    }
  }
  for (int m = n - 1; m >= 0; --m) {
    std::vector<double> up(outer.generation_size(m) * us);
    for (std::size_t r = 0; r < outer.generation_size(m); ++r) {
      const std::size_t v = outer.generation_offset(m) + r;
      const std::size_t first = outer.first_child(v) - outer.generation_offset(m + 1);
      for (State s = 0; s < states; ++s) {
        double w = lam[s];
        for (int c = 0; c < outer.child_count(v); ++c) {
          double child = 0.0;
          for (State t = 0; t < states; ++t) {
            if (g.adj(s, t)) child += sums[(first + static_cast<std::size_t>(c)) * us + static_cast<std::size_t>(t)];
          }
          w *= child;
        }
        up[r * us + static_cast<std::size_t>(s)] = w;
      }
    }
    sums = std::move(up);
  }
  double z = 0.0;
  for (double s : sums) z += s;
  return z;
}

double partition_function_enumerated(const ConstraintGraph& g, const ActivityVector& lam, int k, int n,
                                     const std::vector<State>& boundary) {
  require_shape(k, n);
  const TreeShape shape(k, n);
  const TreeShape outer(k, n + 1);
  if (boundary.size() != outer.generation_size(n + 1)) {
    throw InvalidInput("boundary must give one state per vertex of W_{n+1}");
  }
  double z = 0.0;
  for_each_admissible(g, (require_enumerable(shape), shape), [&](const std::vector<State>& cfg) {
    for (std::size_t r = 0; r < outer.generation_size(n); ++r) {
      const std::size_t v = outer.generation_offset(n) + r;
      const std::size_t first = outer.first_child(v) - outer.generation_offset(n + 1);
      for (int c = 0; c < outer.child_count(v); ++c) {
        if (!g.adj(cfg[v], boundary[first + static_cast<std::size_t>(c)])) return;
      }
    }
    double w = 1.0;
    for (State s : cfg) w *= lam[s];
    z += w;
  });
  return z;
}

std::vector<double> boundary_weights_from_field(const ActivityVector& lam, std::span<const double> zeta) {
  const std::size_t q = static_cast<std::size_t>(lam.num_states() - 1);
  if (zeta.size() % q != 0) throw InvalidInput("field values must come in groups of q");
  std::vector<double> w;
  w.reserve(zeta.size() / q * (q + 1));
  for (std::size_t x = 0; x < zeta.size() / q; ++x) {
    w.push_back(1.0);
    for (std::size_t j = 1; j <= q; ++j) {
      const double value = zeta[x * q + j - 1];
      if (!(value > 0.0) || !std::isfinite(value)) throw InvalidInput("field values must be finite and > 0");
      w.push_back(value / lam.ratio(static_cast<State>(j)));
    }
  }
  return w;
}

WeightedConfigTable mu_n(const ConstraintGraph& g, const ActivityVector& lam, int k, int n,
                         std::span<const double> zeta) {
  require_shape(k, n);
  if (lam.num_states() != g.num_states()) throw InvalidInput("activity vector size does not match graph");
  WeightedConfigTable table;
  table.shape = TreeShape(k, n);
  table.q = g.q();
  require_enumerable(table.shape);
  const std::size_t leaves = table.shape.generation_size(n);
  if (zeta.size() != leaves * static_cast<std::size_t>(g.q())) {
    throw InvalidInput("field must provide q values for every vertex of W_n");
  }
  const auto w = boundary_weights_from_field(lam, zeta);
  const auto us = static_cast<std::size_t>(g.num_states());
  const std::size_t outer = table.shape.generation_offset(n);
  for_each_admissible(g, table.shape, [&](const std::vector<State>& cfg) {
    double weight = 1.0;
    for (State s : cfg) weight *= lam[s];
    for (std::size_t r = 0; r < leaves; ++r) weight *= w[r * us + static_cast<std::size_t>(cfg[outer + r])];
    table.configs.push_back(cfg);
    table.weights.push_back(weight);
    table.Z += weight;
  });
  return table;
}

std::vector<double> root_marginal(const WeightedConfigTable& table) {
  std::vector<double> p(static_cast<std::size_t>(table.q + 1), 0.0);
  for (std::size_t i = 0; i < table.configs.size(); ++i) {
    p[static_cast<std::size_t>(table.configs[i][0])] += table.weights[i];
  }
  for (double& v : p) v /= table.Z;
  return p;
}

std::vector<double> predicted_root_marginal(const ConstraintGraph& g, const ActivityVector& lam, int k, int n,
                                            std::span<const double> zeta) {
  const auto field = inward_sweep(g, lam, TreeShape(k, n), zeta);
  const auto root = field.at(0);
  std::vector<double> p{1.0};
  p.insert(p.end(), root.begin(), root.end());
  double total = 0.0;
  for (double v : p) total += v;
  for (double& v : p) v /= total;
  return p;
}

double check_compatibility(const ConstraintGraph& g, const ActivityVector& lam, const Field& field) {
  const int n = field.shape().n();
  const int k = field.shape().k();
  if (n < 1) throw InvalidInput("compatibility needs n >= 1");
  if (field.q() != g.q()) throw InvalidInput("field and graph disagree on q");
  require_enumerable(field.shape());
  double defect = 0.0;
  auto inner = mu_n(g, lam, k, 0, field.generation(0));
  for (int m = 1; m <= n; ++m) {
    const auto outer = mu_n(g, lam, k, m, field.generation(m));
    const std::size_t prefix = TreeShape(k, m - 1).vertex_count();
    std::map<std::vector<State>, double> marginal;
    for (std::size_t i = 0; i < outer.configs.size(); ++i) {
      std::vector<State> key(outer.configs[i].begin(), outer.configs[i].begin() + static_cast<std::ptrdiff_t>(prefix));
      marginal[key] += outer.probability(i);
    }
    for (std::size_t i = 0; i < inner.configs.size(); ++i) {
      const auto it = marginal.find(inner.configs[i]);
      const double lhs = it == marginal.end() ? 0.0 : it->second;
      defect = std::max(defect, std::abs(lhs - inner.probability(i)));
    }
    inner = outer;
  }
  return defect;
}

Field constant_field(const ConstraintGraph& g, const ActivityVector& lam, int k, int n, const std::vector<double>& z) {
  if (z.size() != static_cast<std::size_t>(g.q())) throw InvalidInput("constant value must have q components");
  const TreeShape shape(k, n);
  std::vector<double> boundary;
  for (std::size_t r = 0; r < shape.generation_size(n); ++r) boundary.insert(boundary.end(), z.begin(), z.end());
  auto field = inward_sweep(g, lam, shape, boundary);
  // Pin non-root vertices to z itself so rounding in the sweep does not leak in.
  for (std::size_t v = 1; v < field.size(); ++v) std::copy(z.begin(), z.end(), field.at(v).begin());
  return field;
}

OracleReport oracle_report(const ConstraintGraph& g, const ActivityVector& lam, const Field& field) {
  OracleReport r;
  r.model = g.name();
  r.lambda = lam.values();
  r.k = field.shape().k();
  r.n = field.shape().n();
  const auto table = mu_n(g, lam, r.k, r.n, field.generation(r.n));
  r.Z = table.Z;
  r.defect = check_compatibility(g, lam, field);
  r.marginals = root_marginal(table);
  return r;
}

nlohmann::json to_json(const OracleReport& report) {
  return {{"model", report.model}, {"lambda", report.lambda}, {"k", report.k},         {"n", report.n},
          {"Z", report.Z},         {"defect", report.defect}, {"marginals", report.marginals}};
}

}  // namespace hardcore
