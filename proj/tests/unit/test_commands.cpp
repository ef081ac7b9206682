#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spshift/commands.hpp"
#include "spshift/exceptions.hpp"

using namespace spshift;
using doctest::Approx;

namespace {

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
  double num(std::size_t row, const std::string& name) const { return std::stod(rows[row][column(name)]); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') quoted = !quoted;
    else if (ch == ',' && !quoted) out.emplace_back();
    else out.back() += ch;
  }
  return out;
}

Csv parse(const std::string& text) {
  Csv csv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("#", 0) == 0) csv.comments.push_back(line);
    else if (csv.header.empty()) csv.header = split(line);
    else csv.rows.push_back(split(line));
  }
  return csv;
}

bool has_comment(const Csv& csv, const std::string& needle) {
  for (const auto& c : csv.comments)
    if (c.find(needle) != std::string::npos) return true;
  return false;
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("SPSHIFT_CLI");
  REQUIRE(cli != nullptr);
  const int rc = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("number format") {
  CHECK(format_number(5.27e-2) == "5.27000e-02");
  CHECK(format_number(-1234.5678) == "-1.23457e+03");
  CHECK(format_number(0.0) == "0.00000e+00");
}

TEST_CASE("solve: ex1 has u' extrema near the boundaries") {
  RunConfig c;
  c.epsilon = 1e-2;
  c.q = {2};
  c.N = {64};
  const auto csv = parse(cmd_solve(c).csv);
  CHECK(csv.header == std::vector<std::string>{"x", "u", "du", "w", "dw"});
  CHECK(has_comment(csv, "seed=20240601"));
  std::size_t imax = 0, imin = 0;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    if (csv.num(i, "du") > csv.num(imax, "du")) imax = i;
    if (csv.num(i, "du") < csv.num(imin, "du")) imin = i;
  }
  CHECK(csv.num(imax, "x") <= 0.05);
  CHECK(csv.num(imin, "x") >= 1.95);
}

TEST_CASE("solve: ex2 has u'' = 0 at the ends") {
  RunConfig c;
  c.example = "ex2";
  c.epsilon = 1e-2;
  const auto csv = parse(cmd_solve(c).csv);
  const double eps = 1e-2;
  double wmax = 0;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) wmax = std::max(wmax, std::abs(csv.num(i, "w")));
  CHECK(std::abs(csv.num(0, "w")) / eps <= 1e-10);
  CHECK(std::abs(csv.num(csv.rows.size() - 1, "w")) / eps <= 1e-10);
  CHECK(wmax > 0);
}

TEST_CASE("solve is deterministic and needs a single (q, N)") {
  RunConfig c;
  c.epsilon = 1e-3;
  CHECK(cmd_solve(c).csv == cmd_solve(c).csv);
  c.N = {64, 128};
  CHECK_THROWS_AS(cmd_solve(c), ValidationError);
}

TEST_CASE("convergence: empty N list is rejected") {
  RunConfig c;
  c.N.clear();
  CHECK_THROWS_AS(cmd_convergence(c), ValidationError);
}

TEST_CASE("convergence: ex1 errors and rates for q = 1, 2") {
  RunConfig c;
  c.q = {1, 2};
  c.N = {64, 128, 256};
  const auto csv = parse(cmd_convergence(c).csv);
  CHECK(csv.header == std::vector<std::string>{"q", "N", "energy", "energy_rate", "l2_u", "l2_u_rate", "l2_w",
                                               "l2_w_rate"});
  REQUIRE(csv.rows.size() == 6);
  const std::array<double, 3> e1{5.27e-2, 2.64e-2, 1.32e-2};
  for (int i = 0; i < 3; ++i) CHECK(csv.num(i, "energy") == Approx(e1[i]).epsilon(0.2));
  CHECK(csv.num(1, "energy_rate") == Approx(1.0).epsilon(0.1));
  CHECK(csv.num(3, "energy") == Approx(4.51e-4).epsilon(0.2));
  CHECK(csv.num(3, "l2_u") == Approx(5.60e-6).epsilon(0.25));
  CHECK(csv.num(3, "l2_w") == Approx(4.18e-5).epsilon(0.25));
  CHECK(std::abs(csv.num(4, "energy_rate") - 2.0) <= 0.15);
  CHECK(std::abs(csv.num(4, "l2_u_rate") - 3.0) <= 0.15);
  CHECK(std::abs(csv.num(4, "l2_w_rate") - 2.86) <= 0.15);
  CHECK(csv.rows[0][csv.column("energy_rate")].empty());
}

TEST_CASE("compare-meshes gives four columns") {
  RunConfig c;
  c.q = {2};
  c.N = {64, 128};
  c.weak_exponent = 0.5;
  c.sigma = 3;
  const auto csv = parse(cmd_compare_meshes(c).csv);
  CHECK(csv.header == std::vector<std::string>{"N", "BS-BS", "BS-BS_rate", "BS-S", "BS-S_rate", "BS-weakeq",
                                               "BS-weakeq_rate", "BS-weakS", "BS-weakS_rate"});
  REQUIRE(csv.rows.size() == 2);
  CHECK(csv.num(0, "BS-weakS") < csv.num(0, "BS-weakeq"));
  CHECK(csv.num(0, "BS-weakeq") <= csv.num(0, "BS-BS") * 1.01);
}

TEST_CASE("greens: default table") {
  RunConfig c;
  const auto out = cmd_greens(c);
  const auto csv = parse(out.csv);
  CHECK(csv.header == std::vector<std::string>{"name", "epsilon", "computed", "target", "rel_error"});
  CHECK(csv.rows.size() >= 12);
  bool det = false;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    if (csv.rows[i][0] == "det(A)") {
      det = true;
      continue;
    }
    if (csv.num(i, "epsilon") == 1e-4 && !csv.rows[i][csv.column("rel_error")].empty())
      CHECK_MESSAGE(csv.num(i, "rel_error") <= 1e-2, csv.rows[i][0]);
  }
  CHECK(det);
}

TEST_CASE("greens: every targeted row at the smallest eps within 1e-2, det(A) included") {
  RunConfig c;
  const auto out = cmd_greens(c);
  const auto csv = parse(out.csv);
  for (std::size_t i = 0; i < csv.rows.size(); ++i)
    if (csv.rows[i][0] == "det(A)" && csv.num(i, "epsilon") == 1e-4)
      CHECK_MESSAGE(csv.num(i, "rel_error") <= 1e-2, "det(A) = " << csv.rows[i][2] << ", closed form " << csv.rows[i][3]);
  CHECK(out.passed);
}

TEST_CASE("greens: m2 has residual rows only") {
  RunConfig c;
  c.variant = GreensVariant::m2;
  c.epsilons = {1e-2, 1e-3};
  const auto csv = parse(cmd_greens(c).csv);
  CHECK(!csv.rows.empty());
  for (const auto& r : csv.rows) CHECK(r[3].empty());
}

TEST_CASE("decompose") {
  RunConfig c;
  c.epsilon = 1e-2;
  c.q = {3};
  c.N = {128};
  const auto csv = parse(cmd_decompose(c).csv);
  CHECK(csv.header == std::vector<std::string>{"x", "S0", "E", "W", "V0", "u_h"});
  CHECK(has_comment(csv, "ratio="));

  c.d = 0.0;
  const auto flat = parse(cmd_decompose(c).csv);
  double wmax = 0, vmax = 0;
  for (std::size_t i = 0; i < flat.rows.size(); ++i) {
    wmax = std::max(wmax, std::abs(flat.num(i, "W")));
    vmax = std::max(vmax, std::abs(flat.num(i, "V0")));
  }
  CHECK(wmax <= 1e-8 * vmax);

  RunConfig s;
  s.q = {3};
  s.N = {128};
  s.epsilons = {1e-2, 1e-3, 1e-4};
  const auto sweep = parse(cmd_decompose(s).csv);
  CHECK(sweep.rows.size() == 3);
  CHECK(has_comment(sweep, "slope E_left="));
  CHECK(has_comment(sweep, "slope W_left="));

  RunConfig v;
  v.d = 0.5;
  v.example = "ex1";
  CHECK_NOTHROW(problem_from_config(v, 1e-2));
}

TEST_CASE("postprocess columns") {
  RunConfig c;
  c.q = {1};
  c.N = {64, 128};
  const auto csv = parse(cmd_postprocess(c).csv);
  CHECK(csv.header == std::vector<std::string>{"q", "N", "energy", "supercloseness", "supercloseness_rate",
                                               "postprocessed", "postprocessed_rate"});
  CHECK(csv.rows.size() == 2);
  CHECK(csv.num(1, "postprocessed_rate") >= 1.7);
}

TEST_CASE("command line exit codes") {
  CHECK(run_cli("solve --epsilon 1e-2 --N 16") == 0);
  CHECK(run_cli("solve --N 12") == 2);
  CHECK(run_cli("solve --imesh chebyshev") == 2);
  CHECK(run_cli("solve --epsilon -1") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("solve --config does_not_exist.json") == 2);
  {
    std::ofstream bad("spshift_bad_config.json");
    bad << "{ \"q\": [1, }";
  }
  CHECK(run_cli("solve --config spshift_bad_config.json") == 2);
  std::remove("spshift_bad_config.json");
  // the determinant row misses its closed-form target, so a checked run reports failure
  CHECK(run_cli("greens --epsilon 1e-3 --check") == 4);
  CHECK(run_cli("greens --epsilon 1e-3") == 0);
}

TEST_CASE("flags override the config file") {
  RunConfig c;
  c.q = {3};
  c.N = {32};
  {
    std::ofstream out("spshift_flags.json");
    out << emit_config(c);
  }
  const char* cli = std::getenv("SPSHIFT_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = std::string(cli) + " solve --config spshift_flags.json --N 16 --dump-config > spshift_flags_out.json";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const auto resolved = load_config("spshift_flags_out.json");
  CHECK(resolved.q == std::vector<int>{3});
  CHECK(resolved.N == std::vector<int>{16});
  std::remove("spshift_flags.json");
  std::remove("spshift_flags_out.json");
}
