#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hardcore/recursion.hpp"
#include "hardcore/tree.hpp"

namespace hardcore {

// Hinge, k = 2. Activities lam for which z-(lam) lies in ((sqrt5 - 1)/2, 1),
// so that the log map contracts on its invariant box. The upper end is found
// by bisection on the decreasing map lam -> z-(lam).
struct ContractionWindow {
  double lower;
  double upper;
  bool contains(double lambda) const { return lambda > lower && lambda < upper; }
};
ContractionWindow contraction_window();

// Log boundary value for one side of the path: T1 and on-path vertices get
// (ln z-, -ln z-), T2 vertices get (-ln z-, ln z-). These are the two
// asymmetric TI points, so each side is stationary under the recursion.
LogPair side_boundary(Side side, double z_minus);

// Log boundary field on W_n for the path coded by t, digit order.
// Throws InvalidInput when lam is outside contraction_window() or k != 2.
std::vector<LogPair> build_boundary(double t, double lambda, const TreeShape& shape);

struct PathField {
  double t = 0.0;
  double lambda = 0.0;
  int n = 0;
  int depth_limit = 0;  // N, the deepest truncation used
  double z_minus = 0.0;
  // Ratio values z on V_n from the truncation at N. The root entry is the
  // k + 1 child value that feeds the root marginal; the field proper lives
  // on V_n minus the root.
  Field field{TreeShape(2, 0), 2};
  std::vector<Side> sides;  // split tag per vertex of V_n
  // history[i]: sup-norm change of the log field on V_n between truncations
  // n + i and n + i + 1.
  std::vector<double> history;
  double sup_change = 0.0;
  bool converged = false;

  LogPair log_at(std::size_t vertex) const;
  // Ratios history[i+1] / history[i], skipping entries at rounding level.
  std::vector<double> contraction_ratios(double floor = 1e-13) const;
  // "vertex_address,h1,h2,split_tag" rows, 15 significant digits.
  std::string to_csv() const;
};

// n + ceil(ln tol / ln L) with L = lipschitz_constant(z-(lam)).
int default_depth_limit(int n, double lambda, double tol);

// Truncates the tree at every depth N' = n..N, places the path boundary on
// W_N' and sweeps inward, keeping V_n. converged means the change between the
// last two truncations is at most tol. Off-path subtrees see a homogeneous
// boundary, so their values depend only on side and height; they are computed
// once per height with the same step() calls a full sweep would make, and only
// the path itself is swept per truncation. Every non-root value is checked
// against the box [z-, 1/z-].
PathField solve_path_field(double t, double lambda, int n, std::optional<int> depth_limit = std::nullopt,
                           double tol = 1e-9);

// First vertex of V_n in breadth-first order where the log fields of the
// paths t1 and t2 differ by more than tol in sup norm.
std::optional<VertexAddress> distinguish(double t1, double t2, double lambda, int n, double tol = 1e-9);
// Same comparison for two already solved fields on the same V_n.
std::optional<VertexAddress> distinguish(const PathField& a, const PathField& b, double tol);

}  // namespace hardcore
