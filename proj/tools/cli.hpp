#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hardcore::cli {

enum class Format { Csv, Json };

struct RunConfig {
  std::string command;
  std::string model = "hinge";
  std::string graph_path;  // overrides model when set
  std::string lambda = "1";
  bool log_grid = false;
  int k = 2;
  int n = 2;
  double t = 0.0;
  double tol = 1e-9;
  std::optional<int> depth_limit;
  int solution = 0;
  std::string out;
  std::optional<Format> format;
  int threads = 1;
};

// "min:max:steps" with inclusive endpoints, or a single number. Uniform
// spacing, or geometric spacing when log is set. Throws InvalidInput.
std::vector<double> parse_range(const std::string& text, bool log);

// Full command line including argv[0]. Returns the process exit code:
// 0 success, 2 usage or domain error, 3 numerical-certificate failure.
// The worker count for scans comes from HARDCORE_THREADS unless --threads
// is given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Runs an already parsed configuration, writing the command's output to
// `out`. Throws the library's exceptions.
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace hardcore::cli
