#include "cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

using hardcore::cli::run;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream l(line);
    while (std::getline(l, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

TEST(Cli, PolyOfTriangle) {
  const auto r = invoke({"poly", "--graph", "complete:3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["coefficients"], json::array({1, 3}));
  EXPECT_EQ(j["vertices"], 3);
  EXPECT_EQ(j["edges"], 3);
}

TEST(Cli, PolyOfPathFive) {
  // 1 + 5x + 6x^2 + x^3
  const auto j = json::parse(invoke({"poly", "--graph", "path:5"}).out);
  EXPECT_EQ(j["coefficients"], json::array({1, 5, 6, 1}));
}

TEST(Cli, VssmOnSixCycle) {
  const auto r = invoke({"vssm", "--graph", "cycle:6", "--lambda", "1", "--lmax", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"graph_id", "v", "l", "gap"}));
  double prev = std::stod(rows[1][3]);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double g = std::stod(rows[i][3]);
    EXPECT_LE(g, prev + 1e-15) << "row " << i;
    EXPECT_GE(g, 0.0);
    prev = g;
  }
}

TEST(Cli, DynamicsGridCrossesMinusOne) {
  const auto r = invoke({"dynamics", "--d", "2", "--lambda-grid", "3.5:4.5:0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0][0], "lambda");
  EXPECT_GT(std::stod(rows[1][2]), -1.0);
  EXPECT_LT(std::stod(rows[11][2]), -1.0);
  int crossings = 0;
  for (std::size_t i = 2; i < rows.size(); ++i)
    crossings += (std::stod(rows[i - 1][2]) > -1.0) != (std::stod(rows[i][2]) > -1.0);
  EXPECT_EQ(crossings, 1);
  // 2-cycle columns only filled past the bifurcation
  EXPECT_TRUE(rows[1][4].empty());
  EXPECT_FALSE(rows[11][4].empty());
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"vssm", "--graph", "random:9:0.35:4", "--all-vertices", "--lmax", "4", "--jobs", "3"},
        std::vector<std::string>{"dynamics", "--d", "3", "--lambda-grid", "1:3:0.25", "--jobs", "4"},
        std::vector<std::string>{"spectral", "--graph", "cycle:5", "--lambda", "0.7"},
        std::vector<std::string>{"zeros", "--mode", "roots", "--family", "2:2:1"}}) {
    const auto a = invoke(args), b = invoke(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out) << args[0];
  }
}

TEST(Cli, JobsDoNotChangeOutput) {
  const auto one = invoke({"ratio", "--graph", "cycle:7", "--lambda-grid", "0.1:2:0.1", "--jobs", "1"});
  const auto many = invoke({"ratio", "--graph", "cycle:7", "--lambda-grid", "0.1:2:0.1", "--jobs", "5"});
  EXPECT_EQ(one.out, many.out);
}

TEST(Cli, ConfigAndOverride) {
  const auto dir = std::filesystem::temp_directory_path() / "hardcore_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "cfg.json").string();
  std::ofstream(path) << R"({"command": "ratio", "graph": "path:3", "vertex": 0, "lambda": 2.0})";

  const auto from_config = invoke({"--config", path});
  ASSERT_EQ(from_config.code, 0) << from_config.err;
  auto rows = csv_rows(from_config.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "2");
  // path of 3 from an end: R = 2 (1 + 2) / (1 + 4) = 6/5
  EXPECT_NEAR(std::stod(rows[1][1]), 1.2, 1e-15);

  const auto overridden = invoke({"ratio", "--config", path, "--lambda", "3"});
  rows = csv_rows(overridden.out);
  EXPECT_EQ(rows[1][0], "3");
  EXPECT_NEAR(std::stod(rows[1][1]), 12.0 / 7.0, 1e-15);
}

TEST(Cli, OutputFile) {
  const auto path = (std::filesystem::temp_directory_path() / "hardcore_cli_out.json").string();
  const auto r = invoke({"poly", "--graph", "star:4", "--out", path});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const auto j = json::parse(in);
  // star K_{1,3}: 1 + 4x + 3x^2 + x^3
  EXPECT_EQ(j["coefficients"], json::array({1, 4, 3, 1}));
}

void expect_error(const Result& r, int code, const std::string& kind) {
  EXPECT_EQ(r.code, code) << r.err;
  const auto j = json::parse(r.err);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["error"]["kind"], kind);
  EXPECT_FALSE(j["error"]["message"].get<std::string>().empty());
}

TEST(Cli, ExitCodes) {
  expect_error(invoke({"ratio", "--lambda", "-1"}), hardcore::cli::kValidation, "validation");
  expect_error(invoke({"poly", "--graph", "bogus:3"}), hardcore::cli::kValidation, "validation");
  expect_error(invoke({"poly", "--no-such-flag"}), hardcore::cli::kValidation, "validation");
  expect_error(invoke({"vssm", "--vertex", "99"}), hardcore::cli::kValidation, "validation");
  expect_error(invoke({"poly", "--graph-file", "/nonexistent/graph.txt"}), hardcore::cli::kValidation, "validation");
  expect_error(invoke({"ssm", "--graph", "random:40:0.3:1", "--lmax", "3"}), hardcore::cli::kBudget, "budget");
  expect_error(invoke({"zeros", "--family", "2:2:0", "--start-re", "100", "--start-im", "0", "--max-iter", "3"}),
               hardcore::cli::kConvergence, "convergence");
}

TEST(Cli, GoldenCorpusChecksPass) {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(HARDCORE_TEST_DATA)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    const auto r = invoke({"--config", entry.path().string()});
    EXPECT_EQ(r.code, 0) << entry.path() << "\n" << r.err;
    EXPECT_NE(r.err.find("PASS"), std::string::npos) << entry.path();
  }
  EXPECT_EQ(seen, 9);
}

}  // namespace
