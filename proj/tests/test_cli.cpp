#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "hardcore/errors.hpp"

#include <nlohmann/json.hpp>

using namespace hardcore;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "hardcore-cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Value of the named CSV column in every data row.
std::vector<std::string> column(const std::string& csv, const std::string& name) {
  const auto rows = lines(csv);
  std::vector<std::string> header;
  std::istringstream h(rows.at(0));
  for (std::string cell; std::getline(h, cell, ',');) header.push_back(cell);
  const auto idx = static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  REQUIRE(idx < header.size());
  std::vector<std::string> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::istringstream row(rows[r]);
    std::string cell;
    for (std::size_t c = 0; c <= idx; ++c) std::getline(row, cell, ',');
    out.push_back(cell);
  }
  return out;
}

}  // namespace

TEST_CASE("parse_range") {
  CHECK(cli::parse_range("2.5", false) == std::vector<double>{2.5});
  const auto lin = cli::parse_range("1:3:5", false);
  CHECK(lin == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
  const auto geo = cli::parse_range("1:100:3", true);
  REQUIRE(geo.size() == 3);
  CHECK(geo[1] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(geo[2] == 100.0);
  CHECK(cli::parse_range("5:5:1", false) == std::vector<double>{5.0});
  for (const char* bad : {"", "abc", "1:2", "1:2:0", "1:2:1.5", "0:1:3", "-1", "3:1:4", "1:2:3:4", "1e999"}) {
    CHECK_THROWS_AS(cli::parse_range(bad, false), InvalidInput);
  }
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"no-such-command"}).code == 2);
  CHECK(invoke({"ti-scan", "--bogus"}).code == 2);
  CHECK(invoke({"ti-scan", "--lambda", "0:1:3"}).code == 2);
  CHECK(invoke({"ti-scan", "--model", "triangle"}).code == 2);
  CHECK(invoke({"ti-scan", "--graph", "/nonexistent/graph.json"}).code == 2);
  CHECK(invoke({"path-field", "--t", "1.5"}).code == 2);
  CHECK(invoke({"path-field", "--tol", "0"}).code == 2);
  CHECK(invoke({"oracle-check", "--n", "3"}).code == 2);
  CHECK(invoke({"bounds", "--model", "wand"}).code == 2);
  const auto help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("ti-scan") != std::string::npos);
}

TEST_CASE("ti-scan finds the hinge transition") {
  const auto r = invoke({"ti-scan", "--model", "hinge", "--k", "2", "--lambda", "2.0:2.5:6"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).at(0) == "lambda,count,index,kind,z1,z2,residual");
  const auto lam = column(r.out, "lambda");
  const auto count = column(r.out, "count");
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double l = std::stod(lam[i]);
    CHECK(count[i] == (l > 2.25 ? "3" : "1"));
  }
}

TEST_CASE("period2 and bounds rows") {
  const auto p = invoke({"period2", "--k", "6", "--lambda", "5"});
  REQUIRE(p.code == 0);
  CHECK(lines(p.out).at(0) == "lambda,x_star,kesten,x0,x1");
  CHECK(column(p.out, "kesten").at(0) == "true");
  CHECK(std::stod(column(p.out, "x0").at(0)) < std::stod(column(p.out, "x_star").at(0)));
  CHECK(std::stod(column(p.out, "x_star").at(0)) < std::stod(column(p.out, "x1").at(0)));

  const auto small = invoke({"period2", "--k", "2", "--lambda", "1:10:10"});
  for (const auto& k : column(small.out, "kesten")) CHECK(k == "false");

  const auto b = invoke({"bounds", "--model", "hinge", "--k", "2", "--lambda", "4"});
  REQUIRE(b.code == 0);
  CHECK(lines(b.out).size() == 4);
  for (const auto& zm : column(b.out, "z_minus")) CHECK(std::stod(zm) == doctest::Approx(0.281971680061195));
}

TEST_CASE("path-field output and the window message") {
  const auto r = invoke({"path-field", "--lambda", "2.35", "--t", "0.5", "--n", "2"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).at(0) == "vertex_address,h1,h2,split_tag");
  CHECK(lines(r.out).size() == 1 + 10);

  const auto outside = invoke({"path-field", "--lambda", "3", "--t", "0.5"});
  CHECK(outside.code == 2);
  CHECK(outside.err.find("contraction window (2.25, ~2.4721)") != std::string::npos);

  // A depth limit too shallow to reach tol is a certificate failure.
  CHECK(invoke({"path-field", "--lambda", "2.35", "--t", "0.5", "--n", "2", "--depth-limit", "4"}).code == 3);
}

TEST_CASE("oracle-check prints JSON") {
  const auto r = invoke({"oracle-check", "--model", "hinge", "--lambda", "2.25", "--n", "2"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["defect"].get<double>() <= 1e-12);
  CHECK(j["n"] == 2);
  CHECK(invoke({"oracle-check", "--model", "hinge", "--lambda", "4", "--n", "1", "--solution", "7"}).code == 2);
}

TEST_CASE("output is deterministic and independent of the thread count") {
  const std::vector<std::string> scan = {"ti-scan", "--model", "wand", "--lambda", "0.5:2:4"};
  auto one = scan;
  one.insert(one.end(), {"--threads", "1"});
  auto four = scan;
  four.insert(four.end(), {"--threads", "4"});
  const auto a = invoke(one), b = invoke(one), c = invoke(four);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
}
