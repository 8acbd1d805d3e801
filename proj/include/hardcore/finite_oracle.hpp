#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "hardcore/constraint_graph.hpp"
#include "hardcore/recursion.hpp"
#include "hardcore/tree.hpp"

namespace hardcore {

// Exhaustive enumeration is refused above this many vertices.
inline constexpr std::size_t kEnumerationLimit = 16;

using BigCount = boost::multiprecision::cpp_int;

struct AdmissibleCount {
  BigCount value;
  // False when V_n is too large to enumerate and only the DP ran.
  bool enumerated = false;
};

// |admissible configurations on V_n|. The leaf-to-root DP always runs in
// exact integer arithmetic; when |V_n| <= kEnumerationLimit the configurations
// are also enumerated and the two counts must agree (NumericalFailure if not).
AdmissibleCount count_admissible(const ConstraintGraph& g, int k, int n);
// Depth-first enumeration only; InvalidInput above the size guard.
BigCount count_admissible_enumerated(const ConstraintGraph& g, int k, int n);
BigCount count_admissible_dp(const ConstraintGraph& g, int k, int n);

// Every admissible configuration on V_n in lexicographic level order.
std::vector<std::vector<State>> enumerate_admissible(const ConstraintGraph& g, const TreeShape& shape);

// Sum of prod_{x in V_n} lam_{sigma(x)} over admissible sigma on V_n that are
// also admissible against the fixed states `boundary` on W_{n+1} (digit
// order). Zero when no configuration fits.
double partition_function(const ConstraintGraph& g, const ActivityVector& lam, int k, int n,
                          const std::vector<State>& boundary);
double partition_function_enumerated(const ConstraintGraph& g, const ActivityVector& lam, int k, int n,
                                     const std::vector<State>& boundary);

// Weights w_{j,x} entering the measure on V_n, from recursion values zeta:
// w_0 = 1, w_j = zeta_j lam_0 / lam_j. With these the root marginal of the
// measure is proportional to (1, zeta_root).
std::vector<double> boundary_weights_from_field(const ActivityVector& lam, std::span<const double> zeta);

// Normalised measure on V_n: weight(sigma) = prod_{V_n} lam_{sigma(x)} *
// prod_{W_n} w_{sigma(x),x}.
struct WeightedConfigTable {
  TreeShape shape{1, 0};
  int q = 0;
  std::vector<std::vector<State>> configs;
  std::vector<double> weights;
  double Z = 0.0;

  double probability(std::size_t i) const { return weights[i] / Z; }
};

// `zeta` holds q recursion values per vertex of W_n (digit order).
WeightedConfigTable mu_n(const ConstraintGraph& g, const ActivityVector& lam, int k, int n,
                         std::span<const double> zeta);

// P(sigma(root) = i), i = 0..q.
std::vector<double> root_marginal(const WeightedConfigTable& table);
// (1, zeta_root) / (1 + sum zeta_root) after one inward sweep from `zeta` on W_n.
std::vector<double> predicted_root_marginal(const ConstraintGraph& g, const ActivityVector& lam, int k, int n,
                                            std::span<const double> zeta);

// For every m = 1..n and every admissible sigma on V_{m-1}, the absolute
// difference between the V_{m-1} marginal of the measure on V_m and the
// measure on V_{m-1} itself, each built from the field's values on its outer
// generation. Returns the largest difference.
double check_compatibility(const ConstraintGraph& g, const ActivityVector& lam, const Field& field);

// Field on V_n with the constant value z on every non-root vertex.
Field constant_field(const ConstraintGraph& g, const ActivityVector& lam, int k, int n, const std::vector<double>& z);

struct OracleReport {
  std::string model;
  std::vector<double> lambda;
  int k = 0;
  int n = 0;
  double Z = 0.0;
  double defect = 0.0;
  std::vector<double> marginals;
};
OracleReport oracle_report(const ConstraintGraph& g, const ActivityVector& lam, const Field& field);
nlohmann::json to_json(const OracleReport& report);

}  // namespace hardcore
