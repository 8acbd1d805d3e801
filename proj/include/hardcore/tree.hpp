#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hardcore {

// Finite ball V_n of the Cayley tree of order k around the root x0.
//
// Vertices are numbered in level order: the root is 0, then generation 1 in
// digit order, and so on. Within a generation the rank of a vertex is the
// mixed-radix value of its digits (first digit base k+1, the rest base k), so
// the children of a vertex occupy a contiguous range of the next generation.
class TreeShape {
 public:
  TreeShape(int k, int n);

  int k() const noexcept { return k_; }
  int n() const noexcept { return n_; }

  // |W_m|: 1, k+1, (k+1)k, ...
  std::size_t generation_size(int m) const;
  // Level-order index of the first vertex of W_m.
  std::size_t generation_offset(int m) const;
  // |V_n|
  std::size_t vertex_count() const { return generation_offset(n_ + 1); }

  int generation_of(std::size_t index) const;
  std::size_t parent_of(std::size_t index) const;
  // Level-order index of the first child and the number of children.
  std::size_t first_child(std::size_t index) const;
  int child_count(std::size_t index) const;

 private:
  int k_;
  int n_;
  std::vector<std::size_t> offsets_;  // offsets_[m] = first index of W_m, m = 0..n+1
};

// Digit string locating a vertex; empty is the root.
class VertexAddress {
 public:
  VertexAddress() = default;
  explicit VertexAddress(std::vector<int> digits) : digits_(std::move(digits)) {}

  const std::vector<int>& digits() const noexcept { return digits_; }
  int generation() const noexcept { return static_cast<int>(digits_.size()); }
  VertexAddress child(int digit) const;

  // "ε" for the root, otherwise dot separated digits ("0.1.1").
  std::string to_string() const;
  static VertexAddress parse(std::string_view text);

  auto operator<=>(const VertexAddress&) const = default;

 private:
  std::vector<int> digits_;
};

// Throws InvalidInput unless the digits fit the tree order and depth.
void validate_address(const TreeShape& shape, const VertexAddress& x);
std::size_t index_of(const TreeShape& shape, const VertexAddress& x);
VertexAddress address_of(const TreeShape& shape, std::size_t index);

// Direct successors S(x) in digit order; empty when x sits on W_n.
std::vector<VertexAddress> successors(const TreeShape& shape, const VertexAddress& x);

// An infinite path from the root encoded by t in [0,1]. The first branch
// choice is the first base-(k+1) digit of t, later choices are base-k digits.
// The terminating expansion is used for ambiguous t, and t = 1 maps to the
// all-maximal path.
class PathCode {
 public:
  PathCode(double t, int k);

  double t() const noexcept { return t_; }
  int k() const noexcept { return k_; }
  // Branch choices for generations 1..depth.
  std::vector<int> digits(int depth) const;

 private:
  double t_;
  int k_;
};

enum class Side { OnPath, T1, T2 };

std::string_view to_string(Side side);

// OnPath when x is a prefix of the path. Otherwise T1 if at the first
// divergence x branches to a smaller digit than the path, T2 if larger.
Side split_assign(const TreeShape& shape, const PathCode& path, const VertexAddress& x);

// Same as split_assign for every vertex of V_n, in level order.
std::vector<Side> split_all(const TreeShape& shape, const PathCode& path);

}  // namespace hardcore
