#include "hardcore/constraint_graph.hpp"

#include <cmath>

#include "hardcore/errors.hpp"

namespace hardcore {

ConstraintGraph::ConstraintGraph(const std::vector<std::vector<int>>& adj, std::string name)
    : states_(static_cast<int>(adj.size())), name_(std::move(name)) {
  if (states_ < 2) throw InvalidInput("constraint graph needs at least two states");
  adj_.resize(static_cast<std::size_t>(states_ * states_));
  for (int i = 0; i < states_; ++i) {
    if (static_cast<int>(adj[i].size()) != states_) throw InvalidInput("adjacency matrix must be square");
    bool any = false;
    for (int j = 0; j < states_; ++j) {
      const int a = adj[i][j];
      if (a != 0 && a != 1) throw InvalidInput("adjacency entries must be 0 or 1");
      adj_[static_cast<std::size_t>(i * states_ + j)] = static_cast<std::uint8_t>(a);
      any = any || a == 1;
    }
    if (!any) throw InvalidInput("state " + std::to_string(i) + " is globally forbidden");
  }
  for (int i = 0; i < states_; ++i) {
    for (int j = 0; j < i; ++j) {
      if (adj[i][j] != adj[j][i]) throw InvalidInput("adjacency matrix must be symmetric");
    }
  }
}

std::vector<std::vector<int>> ConstraintGraph::rows() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(states_), std::vector<int>(static_cast<std::size_t>(states_)));
  for (int i = 0; i < states_; ++i) {
    for (int j = 0; j < states_; ++j) out[i][j] = adj(i, j);
  }
  return out;
}

bool ConstraintGraph::swap_symmetric() const {
  if (states_ < 3) return false;
  auto sw = [](int s) { return s == 1 ? 2 : (s == 2 ? 1 : s); };
  for (int i = 0; i < states_; ++i) {
    for (int j = 0; j < states_; ++j) {
      if (adj(i, j) != adj(sw(i), sw(j))) return false;
    }
  }
  return true;
}

ConstraintGraph ConstraintGraph::from_json(const nlohmann::json& j) {
  try {
    const int q = j.at("q").get<int>();
    auto adj = j.at("adj").get<std::vector<std::vector<int>>>();
    if (static_cast<int>(adj.size()) != q + 1) throw InvalidInput("graph JSON: adj must have q+1 rows");
    std::string name = j.contains("name") ? j.at("name").get<std::string>() : std::string{};
    return ConstraintGraph(adj, std::move(name));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("graph JSON: ") + e.what());
  }
}

nlohmann::json ConstraintGraph::to_json() const {
  nlohmann::json j;
  j["q"] = q();
  j["adj"] = rows();
  if (!name_.empty()) j["name"] = name_;
  return j;
}

ConstraintGraph builtin(Builtin which) {
  switch (which) {
    // {0,1}, {0,2}; loops at 0 and 1
    case Builtin::Wrench: return ConstraintGraph({{1, 1, 1}, {1, 1, 0}, {1, 0, 0}}, "wrench");
    // {0,1}, {0,2}; loops at 1 and 2
    case Builtin::Wand: return ConstraintGraph({{0, 1, 1}, {1, 1, 0}, {1, 0, 1}}, "wand");
    // {0,1}, {0,2}; loops at 0, 1 and 2
    case Builtin::Hinge: return ConstraintGraph({{1, 1, 1}, {1, 1, 0}, {1, 0, 1}}, "hinge");
    // {0,1}, {1,2}; loop at 0
    case Builtin::Pipe: return ConstraintGraph({{1, 1, 0}, {1, 0, 1}, {0, 1, 0}}, "pipe");
  }
  throw InvalidInput("unknown builtin graph");
}

Builtin parse_builtin(std::string_view name) {
  if (name == "wrench") return Builtin::Wrench;
  if (name == "wand") return Builtin::Wand;
  if (name == "hinge") return Builtin::Hinge;
  if (name == "pipe") return Builtin::Pipe;
  throw InvalidInput("unknown graph name '" + std::string(name) + "' (expected wrench, wand, hinge or pipe)");
}

ConstraintGraph builtin(std::string_view name) { return builtin(parse_builtin(name)); }

std::string_view to_string(Builtin which) {
  switch (which) {
    case Builtin::Wrench: return "wrench";
    case Builtin::Wand: return "wand";
    case Builtin::Hinge: return "hinge";
    case Builtin::Pipe: return "pipe";
  }
  return "?";
}

ActivityVector::ActivityVector(std::vector<double> lam) : lam_(std::move(lam)) {
  if (lam_.size() < 2) throw InvalidInput("activity vector needs at least two entries");
  for (double v : lam_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("activities must be finite and > 0");
  }
}

ActivityVector ActivityVector::uniform(int q, double lambda) {
  std::vector<double> lam(static_cast<std::size_t>(q) + 1, lambda);
  lam[0] = 1.0;
  return ActivityVector(std::move(lam));
}

bool is_admissible_pair(const ConstraintGraph& g, State i, State j) {
  if (i < 0 || j < 0 || i > g.q() || j > g.q()) throw InvalidInput("state out of range");
  return g.adj(i, j) == 1;
}

bool is_admissible_config(const ConstraintGraph& g, const TreeShape& shape, std::span<const State> cfg) {
  if (cfg.size() != shape.vertex_count()) {
    throw InvalidInput("configuration must assign a state to every vertex of V_n");
  }
  for (State s : cfg) {
    if (s < 0 || s > g.q()) throw InvalidInput("state out of range in configuration");
  }
  for (std::size_t v = 1; v < cfg.size(); ++v) {
    if (g.adj(cfg[shape.parent_of(v)], cfg[v]) == 0) return false;
  }
  return true;
}

}  // namespace hardcore
