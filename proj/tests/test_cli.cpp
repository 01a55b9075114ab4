#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "regen/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "regen");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = regen::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("regen_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, BoundsClassical) {
  const auto r = run({"bounds", "classical_bernstein", "n=100", "sigma2=1", "M=1", "t=10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_EQ(j["formula"], "classical_bernstein");
  EXPECT_NEAR(j["value"].get<double>(), 0.61644, 1e-4);
  EXPECT_NEAR(j["value"].get<double>(), std::exp(-100.0 / (200.0 + 20.0 / 3.0)), 1e-15);
  EXPECT_EQ(j["inputs"]["sigma2"], "1");
  EXPECT_TRUE(j["flags"].empty());
}

TEST(Cli, BoundsListAndErrors) {
  const auto list = run({"bounds", "list"});
  ASSERT_EQ(list.code, 0);
  const auto names = parse(list);
  EXPECT_NE(std::find(names.begin(), names.end(), "thm_bi2"), names.end());
  EXPECT_EQ(run({"bounds", "no_such_formula", "t=1"}).code, 1);
  EXPECT_EQ(run({"bounds", "classical_bernstein", "n=100", "sigma2=1", "M=1"}).code, 1);
  EXPECT_EQ(run({"bounds", "classical_bernstein", "n=100", "sigma2=1", "M=1", "t=1", "bogus=2"}).code, 1);
  EXPECT_EQ(run({"bounds", "kp_constant", "p=0"}).code, 1);
  EXPECT_EQ(run({"bounds"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
}

TEST(Cli, VerifyExactPasses) {
  const auto r = run({"verify", "--chain", "two-state", "--a", "0.5", "--b", "0.5", "--f", "indicator_centered", "--n",
                      "12", "--exact", "--cycles", "2000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["tail"]["provenance"], "enumeration");
  EXPECT_EQ(j["verdicts"].size(), 3u);
}

TEST(Cli, SimulateDivisibility) {
  EXPECT_EQ(run({"simulate", "--chain", "singular-mod1", "--n", "11"}).code, 1);
  const auto ok = run({"simulate", "--chain", "singular-mod1", "--n", "10"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  const auto j = parse(ok);
  EXPECT_EQ(j["m"], 2);
  EXPECT_NEAR(j["decomposition"]["reconstructed"].get<double>(), j["decomposition"]["direct"].get<double>(), 1e-10);
}

TEST(Cli, GuardExitCode) {
  const auto r = run({"oracle", "--n", "40"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("guard"), std::string::npos);
}

TEST(Cli, OracleValues) {
  const auto r = run({"oracle", "--n", "2", "--t-grid", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(parse(r)["tail"]["estimate"][0].get<double>(), 0.5, 1e-15);
  EXPECT_EQ(run({"oracle", "--chain", "singular-mod1"}).code, 1);
  EXPECT_EQ(run({"oracle", "--chain", "nope"}).code, 1);
}

TEST(Cli, VarianceReport) {
  const auto r = run({"variance", "--a", "0.25", "--b", "0.25", "--cycles", "20000", "--batch-n", "100000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_EQ(j["estimates"][0]["kind"], "mrv_exact");
  EXPECT_NEAR(j["estimates"][0]["value"].get<double>(), 0.75, 1e-12);
  EXPECT_TRUE(j["link"]["within_4se"].get<bool>());
}

TEST(Cli, ConfigPrecedence) {
  const auto dir = scratch("config");
  const auto cfg = dir / "run.json";
  std::ofstream(cfg) << R"({"n": 2, "t_grid": [0.5], "seed": 9})";
  auto j = parse(run({"oracle", "--config", cfg.string()}));
  EXPECT_EQ(j["n"], 2);
  EXPECT_EQ(j["seed"], 9);
  j = parse(run({"oracle", "--config", cfg.string(), "--n", "4", "--seed", "11"}));
  EXPECT_EQ(j["n"], 4);
  EXPECT_EQ(j["seed"], 11);
  std::ofstream(dir / "bad.json") << R"({"nn": 2})";
  EXPECT_EQ(run({"oracle", "--config", (dir / "bad.json").string()}).code, 1);
  std::ofstream(dir / "broken.json") << "{";
  EXPECT_EQ(run({"oracle", "--config", (dir / "broken.json").string()}).code, 1);
  EXPECT_EQ(run({"oracle", "--config", (dir / "missing.json").string()}).code, 1);
}

TEST(Cli, EnvironmentSeed) {
  const auto dir = scratch("env");
  const auto cfg = dir / "run.json";
  std::ofstream(cfg) << R"({"seed": 5})";
  ::setenv("REGEN_BERNSTEIN_SEED", "77", 1);
  EXPECT_EQ(parse(run({"oracle", "--n", "2"}))["seed"], 77);
  EXPECT_EQ(parse(run({"oracle", "--n", "2", "--config", cfg.string()}))["seed"], 5);
  EXPECT_EQ(parse(run({"oracle", "--n", "2", "--seed", "3"}))["seed"], 3);
  ::setenv("REGEN_BERNSTEIN_SEED", "x1", 1);
  EXPECT_EQ(run({"oracle", "--n", "2"}).code, 1);
  ::unsetenv("REGEN_BERNSTEIN_SEED");
  EXPECT_EQ(parse(run({"oracle", "--n", "2"}))["seed"], 1);
}

TEST(Cli, DeterministicFiles) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::vector<std::string> base = {"verify", "--chain", "singular-mod1", "--n", "20", "--replicas", "2000",
                                         "--cycles", "500", "--seed", "4"};
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--out", a.string(), "--threads", "1"});
  args_b.insert(args_b.end(), {"--out", b.string(), "--threads", "4"});
  ASSERT_EQ(run(args_a).code, 0);
  ASSERT_EQ(run(args_b).code, 0);
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / "curves.csv"), slurp(b / "curves.csv"));
  EXPECT_FALSE(slurp(a / "report.json").empty());
}

TEST(Cli, SimulateCsvAndFiles) {
  const auto dir = scratch("sim");
  ASSERT_EQ(run({"simulate", "--n", "6", "--out", dir.string()}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
  const auto csv = run({"simulate", "--n", "6", "--format", "csv"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 7);
}

TEST(Cli, Binary) {
  const std::string cmd = std::string(REGEN_TOOL_PATH) + " bounds psi1_bernstein n=25 tau=1 t=10 > /dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  const std::string bad = std::string(REGEN_TOOL_PATH) + " bounds psi1_bernstein n=25 tau=0 t=10 2> /dev/null";
  const int status = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 1);
}
