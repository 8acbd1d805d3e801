#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardcore/tree.hpp"

namespace hardcore {

using State = int;

// Hard-core constraint on spin values 0..q: states i and j may sit on
// neighbouring sites iff adj(i, j) == 1. Immutable once built.
class ConstraintGraph {
 public:
  // Rows must form a symmetric square 0/1 matrix with no all-zero row.
  explicit ConstraintGraph(const std::vector<std::vector<int>>& adj, std::string name = {});

  int q() const noexcept { return states_ - 1; }
  int num_states() const noexcept { return states_; }
  int adj(State i, State j) const { return adj_[static_cast<std::size_t>(i * states_ + j)]; }
  const std::string& name() const noexcept { return name_; }
  std::vector<std::vector<int>> rows() const;

  // True when swapping states 1 and 2 maps the graph onto itself.
  bool swap_symmetric() const;

  // {"q": int, "adj": [[0|1,...],...], "name": optional string}
  static ConstraintGraph from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  bool operator==(const ConstraintGraph& other) const {
    return states_ == other.states_ && adj_ == other.adj_;
  }

 private:
  int states_;
  std::vector<std::uint8_t> adj_;
  std::string name_;
};

enum class Builtin { Wrench, Wand, Hinge, Pipe };

ConstraintGraph builtin(Builtin which);
// "wrench", "wand", "hinge" or "pipe".
ConstraintGraph builtin(std::string_view name);
Builtin parse_builtin(std::string_view name);
std::string_view to_string(Builtin which);

// Per-state activities; entry 0 belongs to the vacant state.
class ActivityVector {
 public:
  explicit ActivityVector(std::vector<double> lam);
  // (1, lambda, ..., lambda) over q+1 states.
  static ActivityVector uniform(int q, double lambda);

  int num_states() const noexcept { return static_cast<int>(lam_.size()); }
  double operator[](State i) const { return lam_[static_cast<std::size_t>(i)]; }
  // lambda_j / lambda_0
  double ratio(State j) const { return lam_[static_cast<std::size_t>(j)] / lam_[0]; }
  const std::vector<double>& values() const noexcept { return lam_; }

 private:
  std::vector<double> lam_;
};

bool is_admissible_pair(const ConstraintGraph& g, State i, State j);

// cfg holds one state per vertex of V_n in level order. Every parent/child
// edge must carry an admissible pair.
bool is_admissible_config(const ConstraintGraph& g, const TreeShape& shape, std::span<const State> cfg);

}  // namespace hardcore
