#include "cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hardcore/bounds.hpp"
#include "hardcore/constraint_graph.hpp"
#include "hardcore/errors.hpp"
#include "hardcore/finite_oracle.hpp"
#include "hardcore/path_measures.hpp"
#include "hardcore/periodic.hpp"
#include "hardcore/ti_solver.hpp"

namespace hardcore::cli {

namespace {

constexpr int kUsage = 2;
constexpr int kCertificate = 3;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// Evaluates rows[i] = job(i) on a small pool; output order is by index.
std::vector<std::string> parallel_rows(std::size_t count, int threads, const std::function<std::string(std::size_t)>& job) {
  std::vector<std::string> rows(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        rows[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < std::max(1, threads); ++w) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

ConstraintGraph load_graph(const RunConfig& cfg) {
  if (cfg.graph_path.empty()) return builtin(cfg.model);
  std::ifstream in(cfg.graph_path);
  if (!in) throw InvalidInput("cannot open graph file " + cfg.graph_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("graph file is not valid JSON: ") + e.what());
  }
  return ConstraintGraph::from_json(j);
}

double single_lambda(const RunConfig& cfg) {
  const auto grid = parse_range(cfg.lambda, false);
  if (grid.size() != 1) throw InvalidInput("this command takes a single --lambda value");
  return grid.front();
}

Format format_or(const RunConfig& cfg, Format fallback) { return cfg.format.value_or(fallback); }

int ti_scan(const RunConfig& cfg, std::ostream& out) {
  const auto g = load_graph(cfg);
  const auto grid = parse_range(cfg.lambda, cfg.log_grid);
  const int q = g.q();
  std::vector<SolutionSet> results(grid.size());
  parallel_rows(grid.size(), cfg.threads, [&](std::size_t i) {
    results[i] = count_ti_solutions(g, ActivityVector::uniform(q, grid[i]), cfg.k);
    return std::string();
  });
  if (format_or(cfg, Format::Csv) == Format::Json) {
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto sols = nlohmann::json::array();
      for (const auto& s : results[i]) {
        sols.push_back({{"z", s.z}, {"kind", std::string(to_string(s.kind))}, {"residual", s.residual}});
      }
      arr.push_back({{"lambda", grid[i]}, {"count", results[i].size()}, {"solutions", sols}});
    }
    out << nlohmann::json{{"model", g.name()}, {"k", cfg.k}, {"scan", arr}}.dump(2) << '\n';
    return 0;
  }
  out << "lambda,count,index,kind";
  for (int j = 1; j <= q; ++j) out << ",z" << j;
  out << ",residual\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t s = 0; s < results[i].size(); ++s) {
      const auto& sol = results[i][s];
      out << num(grid[i]) << ',' << results[i].size() << ',' << s << ',' << to_string(sol.kind);
      for (double v : sol.z) out << ',' << num(v);
      out << ',' << num(sol.residual) << '\n';
    }
  }
  return 0;
}

int period2(const RunConfig& cfg, std::ostream& out) {
  const auto grid = parse_range(cfg.lambda, cfg.log_grid);
  struct Row {
    double x_star;
    bool kesten;
    std::optional<std::pair<double, double>> cycle;
  };
  std::vector<Row> rows(grid.size());
  parallel_rows(grid.size(), cfg.threads, [&](std::size_t i) {
    Row r{gamma_fixed_point(grid[i], cfg.k), kesten_condition(grid[i], cfg.k), std::nullopt};
    for (const auto& [x0, x1] : solve_period2_symmetric(grid[i], cfg.k)) {
      if (x0 < r.x_star && x1 > r.x_star) r.cycle = std::make_pair(x0, x1);
    }
    rows[i] = r;
    return std::string();
  });
  if (format_or(cfg, Format::Csv) == Format::Json) {
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      nlohmann::json row{{"lambda", grid[i]}, {"x_star", rows[i].x_star}, {"kesten", rows[i].kesten}};
      row["x0"] = rows[i].cycle ? nlohmann::json(rows[i].cycle->first) : nlohmann::json(nullptr);
      row["x1"] = rows[i].cycle ? nlohmann::json(rows[i].cycle->second) : nlohmann::json(nullptr);
      arr.push_back(row);
    }
    out << nlohmann::json{{"k", cfg.k}, {"scan", arr}}.dump(2) << '\n';
    return 0;
  }
  out << "lambda,x_star,kesten,x0,x1\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << num(grid[i]) << ',' << num(rows[i].x_star) << ',' << (rows[i].kesten ? "true" : "false") << ',';
    if (rows[i].cycle) out << num(rows[i].cycle->first) << ',' << num(rows[i].cycle->second);
    else out << ',';
    out << '\n';
  }
  return 0;
}

int path_field(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const double lambda = single_lambda(cfg);
  const auto window = contraction_window();
  if (!window.contains(lambda)) {
    err << "error: path fields need lambda inside the contraction window (2.25, ~2.4721), exactly ("
        << num(window.lower) << ", " << num(window.upper) << "); got " << num(lambda) << '\n';
    return kUsage;
  }
  if (cfg.k != 2) throw InvalidInput("path fields are defined for k = 2");
  const auto field = solve_path_field(cfg.t, lambda, cfg.n, cfg.depth_limit, cfg.tol);
  if (format_or(cfg, Format::Csv) == Format::Json) {
    auto vertices = nlohmann::json::array();
    for (std::size_t v = 0; v < field.field.size(); ++v) {
      const auto h = field.log_at(v);
      vertices.push_back({{"address", address_of(field.field.shape(), v).to_string()},
                          {"h1", h[0]},
                          {"h2", h[1]},
                          {"split_tag", std::string(to_string(field.sides[v]))}});
    }
    out << nlohmann::json{{"t", field.t},
                          {"lambda", field.lambda},
                          {"n", field.n},
                          {"depth_limit", field.depth_limit},
                          {"z_minus", field.z_minus},
                          {"converged", field.converged},
                          {"sup_change", field.sup_change},
                          {"history", field.history},
                          {"vertices", vertices}}
               .dump(2)
        << '\n';
  } else {
    out << field.to_csv();
  }
  if (!field.converged) {
    err << "error: path field did not converge: last change " << num(field.sup_change) << " > tol " << num(cfg.tol)
        << " after depth " << field.depth_limit << '\n';
    return kCertificate;
  }
  return 0;
}

int oracle_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(cfg);
  const double lambda = single_lambda(cfg);
  const auto lam = ActivityVector::uniform(g.q(), lambda);
  const auto solutions = count_ti_solutions(g, lam, cfg.k);
  if (cfg.solution < 0 || cfg.solution >= static_cast<int>(solutions.size())) {
    throw InvalidInput("--solution must index one of the " + std::to_string(solutions.size()) + " TI solutions");
  }
  const auto field =
      constant_field(g, lam, cfg.k, cfg.n, solutions[static_cast<std::size_t>(cfg.solution)].z);
  const auto report = oracle_report(g, lam, field);
  if (format_or(cfg, Format::Json) == Format::Json) {
    out << to_json(report).dump(2) << '\n';
  } else {
    out << "model,lambda,k,n,Z,defect";
    for (std::size_t i = 0; i < report.marginals.size(); ++i) out << ",p" << i;
    out << '\n' << report.model << ',' << num(lambda) << ',' << report.k << ',' << report.n << ',' << num(report.Z)
        << ',' << num(report.defect);
    for (double p : report.marginals) out << ',' << num(p);
    out << '\n';
  }
  if (!(report.defect <= 1e-12)) {
    err << "error: compatibility defect " << num(report.defect) << " exceeds 1e-12\n";
    return kCertificate;
  }
  return 0;
}

int bounds(const RunConfig& cfg, std::ostream& out) {
  const auto model = parse_builtin(cfg.model);
  if (model != Builtin::Hinge && model != Builtin::Pipe) throw InvalidInput("bounds supports hinge and pipe");
  const auto grid = parse_range(cfg.lambda, cfg.log_grid);
  std::vector<std::vector<Envelope>> results(grid.size());
  parallel_rows(grid.size(), cfg.threads, [&](std::size_t i) {
    results[i] = solve_envelope(model, grid[i], cfg.k);
    return std::string();
  });
  bool symmetric_ok = true;
  if (format_or(cfg, Format::Csv) == Format::Json) {
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t e = 0; e < results[i].size(); ++e) {
        const auto& env = results[i][e];
        const bool sym = envelope_symmetry_check(env);
        symmetric_ok = symmetric_ok && sym;
        arr.push_back({{"lambda", grid[i]},
                       {"index", e},
                       {"z1_minus", env.z1_minus},
                       {"z1_plus", env.z1_plus},
                       {"z2_minus", env.z2_minus},
                       {"z2_plus", env.z2_plus},
                       {"z_minus", env.z_minus ? nlohmann::json(*env.z_minus) : nlohmann::json(nullptr)},
                       {"residual", env.residual},
                       {"symmetry_check", sym}});
      }
    }
    out << nlohmann::json{{"model", cfg.model}, {"k", cfg.k}, {"envelopes", arr}}.dump(2) << '\n';
  } else {
    out << "lambda,index,z1_minus,z1_plus,z2_minus,z2_plus,z_minus,residual,symmetry_check\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t e = 0; e < results[i].size(); ++e) {
        const auto& env = results[i][e];
        const bool sym = envelope_symmetry_check(env);
        symmetric_ok = symmetric_ok && sym;
        out << num(grid[i]) << ',' << e << ',' << num(env.z1_minus) << ',' << num(env.z1_plus) << ','
            << num(env.z2_minus) << ',' << num(env.z2_plus) << ',' << (env.z_minus ? num(*env.z_minus) : "") << ','
            << num(env.residual) << ',' << (sym ? "true" : "false") << '\n';
      }
    }
  }
  return symmetric_ok ? 0 : kCertificate;
}

int threads_from_env() {
  const char* text = std::getenv("HARDCORE_THREADS");
  if (!text || !*text) return 1;
  try {
    return std::max(1, std::stoi(text));
  } catch (const std::exception&) {
    throw InvalidInput("HARDCORE_THREADS must be a positive integer");
  }
}

}  // namespace

std::vector<double> parse_range(const std::string& text, bool log) {
  auto parse_number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw InvalidInput("bad number '" + s + "' in range '" + text + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw InvalidInput("bad number '" + s + "' in range '" + text + "'");
    return v;
  };
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  double lo = 0.0;
  double hi = 0.0;
  long steps = 1;
  if (parts.size() == 1) {
    lo = hi = parse_number(parts[0]);
  } else if (parts.size() == 3) {
    lo = parse_number(parts[0]);
    hi = parse_number(parts[1]);
    const double s = parse_number(parts[2]);
    if (s < 1 || s != std::floor(s) || s > 1e7) throw InvalidInput("range steps must be a positive integer");
    steps = static_cast<long>(s);
  } else {
    throw InvalidInput("range must be 'value' or 'min:max:steps', got '" + text + "'");
  }
  if (!(lo > 0.0) || !(hi > 0.0)) throw InvalidInput("lambda must be > 0");
  if (hi < lo) throw InvalidInput("range max must not be below min");
  std::vector<double> grid;
  for (long i = 0; i < steps; ++i) {
    const double f = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    grid.push_back(log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo));
  }
  if (steps > 1) grid.back() = hi;
  return grid;
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!(cfg.tol > 0.0)) throw InvalidInput("--tol must be > 0");
  if (cfg.command == "ti-scan") return ti_scan(cfg, out);
  if (cfg.command == "period2") return period2(cfg, out);
  if (cfg.command == "path-field") return path_field(cfg, out, err);
  if (cfg.command == "oracle-check") return oracle_check(cfg, out, err);
  if (cfg.command == "bounds") return bounds(cfg, out);
  throw InvalidInput("unknown command '" + cfg.command + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hard-core models on Cayley trees: fixed points, phase transitions and exact checks"};
  app.require_subcommand(1, 1);
  RunConfig cfg;
  std::string format;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--lambda", cfg.lambda, "activity, or min:max:steps (inclusive)");
    sub->add_option("--k", cfg.k, "tree order (children per vertex)")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", threads, "worker threads (default $HARDCORE_THREADS or 1)")
        ->check(CLI::PositiveNumber);
  };
  auto* ti = app.add_subcommand("ti-scan", "count translation-invariant solutions over a lambda grid");
  add_common(ti);
  ti->add_option("--model", cfg.model, "wrench, wand, hinge or pipe");
  ti->add_option("--graph", cfg.graph_path, "constraint graph JSON {q, adj, name}");
  ti->add_flag("--log", cfg.log_grid, "geometric lambda grid");

  auto* p2 = app.add_subcommand("period2", "symmetric period-two analysis of the hinge");
  add_common(p2);
  p2->add_flag("--log", cfg.log_grid, "geometric lambda grid");

  auto* pf = app.add_subcommand("path-field", "path-indexed boundary field on V_n (hinge, k = 2)");
  add_common(pf);
  pf->add_option("--t", cfg.t, "path parameter in [0, 1]")->check(CLI::Range(0.0, 1.0));
  pf->add_option("--n", cfg.n, "output depth")->check(CLI::NonNegativeNumber);
  pf->add_option("--tol", cfg.tol, "convergence tolerance");
  pf->add_option("--depth-limit", cfg.depth_limit, "deepest truncation N (default from the contraction rate)");

  auto* oc = app.add_subcommand("oracle-check", "exact compatibility check of a TI field on V_n");
  add_common(oc);
  oc->add_option("--model", cfg.model, "wrench, wand, hinge or pipe");
  oc->add_option("--graph", cfg.graph_path, "constraint graph JSON {q, adj, name}");
  oc->add_option("--n", cfg.n, "depth")->check(CLI::PositiveNumber);
  oc->add_option("--solution", cfg.solution, "index into the sorted TI solutions");

  auto* bd = app.add_subcommand("bounds", "extremal envelope solutions (hinge or pipe)");
  add_common(bd);
  bd->add_option("--model", cfg.model, "hinge or pipe");
  bd->add_flag("--log", cfg.log_grid, "geometric lambda grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (!format.empty()) cfg.format = format == "json" ? Format::Json : Format::Csv;

  try {
    cfg.threads = threads > 0 ? threads : threads_from_env();
    if (cfg.out.empty()) return execute(cfg, out, err);
    std::ostringstream buffer;
    const int code = execute(cfg, buffer, err);
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw InvalidInput("cannot write " + cfg.out);
    file << buffer.str();
    return code;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const SingularModel& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalFailure& e) {
    err << "error: numerical check failed: " << e.what() << '\n';
    return kCertificate;
  }
}

}  // namespace hardcore::cli
