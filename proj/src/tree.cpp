#include "hardcore/tree.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "hardcore/errors.hpp"

namespace hardcore {

TreeShape::TreeShape(int k, int n) : k_(k), n_(n) {
  if (k < 1) throw InvalidInput("tree order k must be >= 1");
  if (n < 0) throw InvalidInput("tree depth n must be >= 0");
  offsets_.resize(static_cast<std::size_t>(n) + 2);
  offsets_[0] = 0;
  std::size_t size = 1;
  for (int m = 0; m <= n; ++m) {
    offsets_[m + 1] = offsets_[m] + size;
    size *= static_cast<std::size_t>(m == 0 ? k + 1 : k);
  }
}

std::size_t TreeShape::generation_size(int m) const {
  if (m < 0) throw InvalidInput("negative generation");
  if (m == 0) return 1;
  std::size_t size = static_cast<std::size_t>(k_ + 1);
  for (int i = 1; i < m; ++i) size *= static_cast<std::size_t>(k_);
  return size;
}

std::size_t TreeShape::generation_offset(int m) const {
  if (m < 0 || m > n_ + 1) throw InvalidInput("generation outside V_n");
  return offsets_[static_cast<std::size_t>(m)];
}

int TreeShape::generation_of(std::size_t index) const {
  if (index >= vertex_count()) throw InvalidInput("vertex index outside V_n");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

std::size_t TreeShape::parent_of(std::size_t index) const {
  const int m = generation_of(index);
  if (m == 0) throw InvalidInput("the root has no parent");
  const std::size_t rank = index - offsets_[m];
  const std::size_t parent_rank = m == 1 ? 0 : rank / static_cast<std::size_t>(k_);
  return offsets_[m - 1] + parent_rank;
}

std::size_t TreeShape::first_child(std::size_t index) const {
  const int m = generation_of(index);
  if (m == n_) return vertex_count();
  const std::size_t rank = index - offsets_[m];
  return offsets_[m + 1] + rank * static_cast<std::size_t>(k_);
}

int TreeShape::child_count(std::size_t index) const {
  const int m = generation_of(index);
  if (m == n_) return 0;
  return m == 0 ? k_ + 1 : k_;
}

VertexAddress VertexAddress::child(int digit) const {
  auto digits = digits_;
  digits.push_back(digit);
  return VertexAddress(std::move(digits));
}

std::string VertexAddress::to_string() const {
  if (digits_.empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(digits_[i]);
  }
  return out;
}

VertexAddress VertexAddress::parse(std::string_view text) {
  if (text == "ε" || text.empty()) return {};
  std::vector<int> digits;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t dot = std::min(text.find('.', pos), text.size());
    int value = 0;
    const auto* first = text.data() + pos;
    const auto* last = text.data() + dot;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last || value < 0) {
      throw InvalidInput("malformed vertex address: " + std::string(text));
    }
    digits.push_back(value);
    pos = dot + 1;
  }
  return VertexAddress(std::move(digits));
}

void validate_address(const TreeShape& shape, const VertexAddress& x) {
  const auto& d = x.digits();
  if (x.generation() > shape.n()) throw InvalidInput("vertex " + x.to_string() + " is deeper than n");
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int base = i == 0 ? shape.k() + 1 : shape.k();
    if (d[i] < 0 || d[i] >= base) throw InvalidInput("digit out of range in " + x.to_string());
  }
}

std::size_t index_of(const TreeShape& shape, const VertexAddress& x) {
  validate_address(shape, x);
  std::size_t rank = 0;
  const auto& d = x.digits();
  for (std::size_t i = 0; i < d.size(); ++i) {
    rank = i == 0 ? static_cast<std::size_t>(d[0]) : rank * static_cast<std::size_t>(shape.k()) + static_cast<std::size_t>(d[i]);
  }
  return shape.generation_offset(x.generation()) + rank;
}

VertexAddress address_of(const TreeShape& shape, std::size_t index) {
  const int m = shape.generation_of(index);
  std::size_t rank = index - shape.generation_offset(m);
  std::vector<int> digits(static_cast<std::size_t>(m));
  for (int i = m - 1; i >= 1; --i) {
    digits[i] = static_cast<int>(rank % static_cast<std::size_t>(shape.k()));
    rank /= static_cast<std::size_t>(shape.k());
  }
  if (m >= 1) digits[0] = static_cast<int>(rank);
  return VertexAddress(std::move(digits));
}

std::vector<VertexAddress> successors(const TreeShape& shape, const VertexAddress& x) {
  validate_address(shape, x);
  std::vector<VertexAddress> out;
  if (x.generation() == shape.n()) return out;
  const int count = x.generation() == 0 ? shape.k() + 1 : shape.k();
  out.reserve(static_cast<std::size_t>(count));
  for (int d = 0; d < count; ++d) out.push_back(x.child(d));
  return out;
}

PathCode::PathCode(double t, int k) : t_(t), k_(k) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("path parameter t must lie in [0,1]");
  if (k < 1) throw InvalidInput("tree order k must be >= 1");
}

std::vector<int> PathCode::digits(int depth) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(std::max(depth, 0)));
  double rest = t_;
  for (int m = 1; m <= depth; ++m) {
    const int base = m == 1 ? k_ + 1 : k_;
    if (t_ == 1.0) {
      out.push_back(base - 1);
      continue;
    }
    const double scaled = rest * base;
    int digit = static_cast<int>(std::floor(scaled));
    digit = std::clamp(digit, 0, base - 1);
    rest = std::clamp(scaled - digit, 0.0, 1.0);
    out.push_back(digit);
  }
  return out;
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::OnPath: return "on_path";
    case Side::T1: return "T1";
    case Side::T2: return "T2";
  }
  return "?";
}

Side split_assign(const TreeShape& shape, const PathCode& path, const VertexAddress& x) {
  validate_address(shape, x);
  if (path.k() != shape.k()) throw InvalidInput("path code and tree disagree on k");
  const auto path_digits = path.digits(x.generation());
  const auto& d = x.digits();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < path_digits[i]) return Side::T1;
    if (d[i] > path_digits[i]) return Side::T2;
  }
  return Side::OnPath;
}

std::vector<Side> split_all(const TreeShape& shape, const PathCode& path) {
  if (path.k() != shape.k()) throw InvalidInput("path code and tree disagree on k");
  const auto path_digits = path.digits(shape.n());
  std::vector<Side> sides(shape.vertex_count(), Side::OnPath);
  for (int m = 1; m <= shape.n(); ++m) {
    const std::size_t begin = shape.generation_offset(m);
    const std::size_t end = shape.generation_offset(m + 1);
    const std::size_t base = static_cast<std::size_t>(m == 1 ? shape.k() + 1 : shape.k());
    for (std::size_t v = begin; v < end; ++v) {
      const Side parent = sides[shape.parent_of(v)];
      if (parent != Side::OnPath) {
        sides[v] = parent;
        continue;
      }
      const int digit = static_cast<int>((v - begin) % base);
      const int on_path = path_digits[static_cast<std::size_t>(m - 1)];
      sides[v] = digit == on_path ? Side::OnPath : (digit < on_path ? Side::T1 : Side::T2);
    }
  }
  return sides;
}

}  // namespace hardcore
