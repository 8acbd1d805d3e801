#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hardcore/constraint_graph.hpp"
#include "hardcore/tree.hpp"

namespace hardcore {

// Boundary-field values z_x = (z_1x, ..., z_qx) on every vertex of V_n, with
// z_0x normalised to 1. Stored flat in level order, q values per vertex.
class Field {
 public:
  Field(TreeShape shape, int q);

  const TreeShape& shape() const noexcept { return shape_; }
  int q() const noexcept { return q_; }
  std::size_t size() const noexcept { return shape_.vertex_count(); }

  std::span<double> at(std::size_t vertex) {
    return {values_.data() + vertex * static_cast<std::size_t>(q_), static_cast<std::size_t>(q_)};
  }
  std::span<const double> at(std::size_t vertex) const {
    return {values_.data() + vertex * static_cast<std::size_t>(q_), static_cast<std::size_t>(q_)};
  }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  // Values on W_m only, |W_m| * q entries.
  std::span<const double> generation(int m) const;

  // "vertex_address,z1,z2,..." rows with 15 significant digits.
  std::string to_csv() const;

 private:
  TreeShape shape_;
  int q_;
  std::vector<double> values_;
};

// One parent-from-children step of the compatibility recursion:
//   z_jx = (lam_j / lam_0) * prod_y (a_j0 + sum_i a_ji z_iy) / (a_00 + sum_i a_0i z_iy)
// `children` holds one q-vector per child, concatenated. Products switch to
// log space from 20 children on.
void step(const ConstraintGraph& g, const ActivityVector& lam, std::span<const double> children,
          std::span<double> parent);
std::vector<double> step(const ConstraintGraph& g, const ActivityVector& lam,
                         const std::vector<std::vector<double>>& children);

struct SweepOptions {
  // Worker threads per generation; results do not depend on this value.
  int threads = 1;
};

// Leaf-to-root evaluation on V_n. `boundary` gives |W_n| * q positive values;
// every other vertex becomes step() of its children in address order.
Field inward_sweep(const ConstraintGraph& g, const ActivityVector& lam, const TreeShape& shape,
                   std::span<const double> boundary, const SweepOptions& options = {});

// Log form of the hinge recursion: h_x = (ln lam, ln lam) + sum_{y in S(x)} F(h_y) with
//   F_1(h) = ln((1 + e^h1) / (1 + e^h1 + e^h2)),  F_2 symmetric.
using LogPair = std::array<double, 2>;
LogPair log_field_map(const LogPair& h);
// Jacobian of log_field_map, row-major: {dF1/dh1, dF1/dh2, dF2/dh1, dF2/dh2}.
std::array<double, 4> log_field_jacobian(const LogPair& h);

// Determinant of the linear system behind F(h) = F(l) => h = l, at t = e^l:
// -(1 + t1 + t2).
double injectivity_determinant(const LogPair& l);

// The box [ln z-, -ln z-]^2 on which the hinge log map is Lipschitz.
struct LipschitzBox {
  double lower;
  double upper;
  bool contains(const LogPair& h, double slack = 0.0) const {
    return h[0] >= lower - slack && h[0] <= upper + slack && h[1] >= lower - slack && h[1] <= upper + slack;
  }
};
LipschitzBox lipschitz_box(double z_minus);

// Sup-norm Lipschitz bound 2 / (1 + z- + z-^2) of F on the box; z- in (0,1).
double lipschitz_constant(double z_minus);
// Componentwise bounds on the box: |dF1/dh1| <= diagonal, |dF1/dh2| <= off_diagonal.
struct PartialBounds {
  double diagonal;
  double off_diagonal;
};
PartialBounds partial_derivative_bounds(double z_minus);

}  // namespace hardcore
