#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nandwalk/cli.hpp"
#include "nandwalk/harness.hpp"

using namespace nandwalk;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nandwalk");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nandwalk_test_" + name);
}

}  // namespace

TEST(Cli, EvalPrintsValue) {
  const auto r = cli({"eval", "--input", "0110"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0\n");
  const auto rj = cli({"eval", "--input", "00", "--randomized", "--format", "json"});
  EXPECT_EQ(rj.code, 0);
  const auto j = json::parse(rj.out);
  EXPECT_EQ(j.at("value"), 1);
  EXPECT_EQ(j.at("queries"), 1);
}

TEST(Cli, RunMatchesClassicalValue) {
  const auto r = cli({"run", "--input", "0110", "--gamma", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("decision"), 0);
  EXPECT_EQ(j.at("nand"), 0);
  EXPECT_TRUE(j.contains("config_hash"));
  EXPECT_EQ(j.at("config").at("propagator"), "cheb");
}

TEST(Cli, ScatterRowsAllPass) {
  const auto r = cli({"scatter", "--input", "11", "--emax", "auto", "--points", "64"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# config_hash="), std::string::npos);
  EXPECT_NE(r.out.find("# version="), std::string::npos);
  EXPECT_NE(r.out.find("# columns=N,instance_id,E,nand,abs_y,abs_T,bound_y,bound_T,pass"),
            std::string::npos);
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 65u);
  for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_EQ(lines[i].back(), '1') << lines[i];
}

TEST(Cli, ScatterTableAndRandomInstances) {
  const auto t = cli({"scatter", "--input", "0110", "--table", "--emin", "0.01", "--emax", "1.5",
                      "--points", "5"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(data_lines(t.out).size(), 6u);
  const auto s = cli({"scatter", "--n", "3,5", "--instances", "4", "--points", "8"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(data_lines(s.out).size(), 1u + 2 * 4 * 8);
  EXPECT_EQ(cli({"scatter", "--input", "11", "--emax", "0.5"}).code, 2);
}

TEST(Cli, EmbedParityAndDiagnose) {
  const auto p = cli({"embed-parity", "--k", "2,4"});
  EXPECT_EQ(p.code, 0);
  EXPECT_NE(p.out.find("mismatches=0"), std::string::npos);
  EXPECT_EQ(data_lines(p.out).size(), 1u + 4 + 16);
  const auto one = cli({"embed-parity", "--bits", "10", "--format", "json"});
  EXPECT_EQ(json::parse(one.out).at("rows").at(0).at("value"), 0);
  const auto d = cli({"diagnose", "--L", "16,64", "--eps", "0.1", "--input", "0110"});
  EXPECT_EQ(d.code, 0) << d.err;
  EXPECT_NE(d.out.find("window_weight"), std::string::npos);
  EXPECT_NE(d.out.find("l_eps_cubed"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"eval", "--input", "011"}).code, 2);
  EXPECT_EQ(cli({"eval"}).code, 2);
  EXPECT_EQ(cli({"run", "--input", "0110", "--gamma", "8,16"}).code, 2);
  EXPECT_EQ(cli({"run", "--input", "0110", "--propagator", "krylov"}).code, 2);
  const auto r = cli({"run", "--input", "01a0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(cli({"diagnose", "--L", "16", "--eps", "4"}).code, 2);
}

TEST(Cli, EmptySweepGridIsUsageError) {
  const auto path = temp_file("empty.json");
  std::ofstream(path) << R"({"command": "sweep", "gammas": []})";
  const auto r = cli({"sweep", "--config", path.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("empty"), std::string::npos);
  EXPECT_THROW(run_sweep(ExperimentConfig{}, 1), std::invalid_argument);
}

TEST(Cli, HelpShowsDefaults) {
  const auto r = cli({"run", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--m-factor"), std::string::npos);
  EXPECT_NE(r.out.find("[3]"), std::string::npos);
  EXPECT_NE(r.out.find("[cheb]"), std::string::npos);
  EXPECT_NE(r.out.find("[1e-12]"), std::string::npos);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const auto path = temp_file("run.json");
  std::ofstream(path) << R"({"command": "run", "input": "0001", "gammas": [8]})";
  const auto from_file = json::parse(cli({"run", "--config", path.string()}).out);
  EXPECT_EQ(from_file.at("config").at("input"), "0001");
  EXPECT_EQ(from_file.at("config").at("gamma"), 8.0);
  const auto flagged = json::parse(cli({"run", "--config", path.string(), "--gamma", "16"}).out);
  EXPECT_EQ(flagged.at("config").at("input"), "0001");
  EXPECT_EQ(flagged.at("config").at("gamma"), 16.0);
  std::ofstream(path) << R"({"command": "sweep"})";
  EXPECT_EQ(cli({"run", "--config", path.string()}).code, 2);
}

TEST(Cli, OutputFileCarriesMetadata) {
  const auto path = temp_file("sweep.csv");
  const auto r = cli({"sweep", "--n", "2", "--instances", "2", "--gamma", "8", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# config_hash=", 0), 0u);
  EXPECT_NE(text.find("# columns=" + std::string(kSweepColumns)), std::string::npos);
  EXPECT_EQ(data_lines(text).front(), std::string(kSweepColumns));
}

TEST(Sweep, ByteIdenticalAcrossWorkerCounts) {
  const std::vector<std::string> args{"sweep", "--n", "2,3", "--instances", "3", "--gamma", "6,12", "--seed", "5"};
  setenv("NANDWALK_WORKERS", "1", 1);
  const auto a = cli(args);
  setenv("NANDWALK_WORKERS", "4", 1);
  const auto b = cli(args);
  unsetenv("NANDWALK_WORKERS");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(data_lines(a.out).size(), 1u + 2 * 3 * 2);
  const auto c = cli({"sweep", "--n", "2,3", "--instances", "3", "--gamma", "6,12", "--seed", "6"});
  EXPECT_NE(a.out, c.out);
}

TEST(Sweep, RowOrderFollowsGrid) {
  ExperimentConfig cfg;
  cfg.depths = {2, 3};
  cfg.instances = 2;
  cfg.gammas = {6, 12};
  const auto res = run_sweep(cfg, 3);
  ASSERT_EQ(res.rows.size(), 8u);
  std::size_t i = 0;
  for (int depth : {2, 3}) {
    for (int k = 0; k < 2; ++k) {
      for (double g : {6.0, 12.0}) {
        EXPECT_EQ(res.rows[i].leaves, std::size_t{1} << depth);
        EXPECT_EQ(res.rows[i].instance_id, k);
        EXPECT_EQ(res.rows[i].gamma, g);
        ++i;
      }
    }
  }
}

TEST(Sweep, ErrorRateNonIncreasingInGamma) {
  ExperimentConfig cfg;
  cfg.depths = {4};
  cfg.instances = 16;
  cfg.gammas = {4, 16, 64};
  const auto res = run_sweep(cfg, worker_count());
  EXPECT_TRUE(res.summary.error_rate_nonincreasing);
  ASSERT_EQ(res.summary.per_gamma.size(), 3u);
  EXPECT_EQ(res.summary.per_gamma[2].wrong, 0u);
  EXPECT_TRUE(std::isfinite(res.summary.alpha));
  EXPECT_GT(res.summary.alpha, 0.0);
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_LT(res.summary.per_gamma[i].mean_deviation, res.summary.per_gamma[i - 1].mean_deviation);
  }
}

TEST(Sweep, RowFailuresAreRecorded) {
  const auto r = cli({"sweep", "--n", "2", "--instances", "1", "--gamma", "1,8"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# row 0 failed"), std::string::npos);
  EXPECT_EQ(r.out.find("# row 1 failed"), std::string::npos);
  EXPECT_NE(r.out.find("failed=1"), std::string::npos);
}

TEST(Summary, FitsPowerLaw) {
  std::vector<SweepRow> rows;
  for (double g : {4.0, 16.0, 64.0}) {
    SweepRow r;
    r.gamma = g;
    r.T0_sq = 1.0;
    r.p_right = 1.0 - 0.8 / std::sqrt(g);
    r.correct = true;
    rows.push_back(r);
  }
  const auto s = summarize(rows, {4, 16, 64});
  EXPECT_NEAR(s.alpha, 0.5, 1e-12);
  EXPECT_TRUE(s.error_rate_nonincreasing);
  EXPECT_TRUE(std::isnan(loglog_slope({1.0}, {1.0})));
}

TEST(Config, HashAndRoundTrip) {
  ExperimentConfig a;
  a.command = "sweep";
  a.gammas = {4, 16};
  a.depths = {4};
  auto b = a;
  b.out = "elsewhere.csv";
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 2;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  const auto c = ExperimentConfig::from_json(a.to_json());
  EXPECT_EQ(c.to_json(), a.to_json());
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
}

TEST(Format, DoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(16.0), "16");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}
