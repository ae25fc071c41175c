#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "swiss/cli.hpp"

namespace {

namespace fs = std::filesystem;
using swiss::CommandOptions;
using swiss::Json;
using swiss::SystemConfig;

SystemConfig pair_config() { return swiss::load_config(fixtures::scenario("nonlinear_pair.json")); }
SystemConfig scalar_config() {
  return swiss::load_config(fixtures::scenario("scalar_verified.json"));
}

struct CliRun {
  int code;
  Json report;
  std::string out, err;
};

CliRun run(const std::string& cmd, const SystemConfig& cfg, CommandOptions opts = {}) {
  std::ostringstream out, err;
  Json report;
  const int code = swiss::run_command(cmd, cfg, opts, out, err, &report);
  return {code, report, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("swiss_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Analyze, PairConfig) {
  const CliRun r = run("analyze", pair_config());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.report["cycle"], Json::parse("[1, 2, 1]"));
  EXPECT_NEAR(r.report["xi"].get<double>(), -0.0222459, 1e-6);
  EXPECT_NE(r.out.find("contractive cycle: 1,2,1"), std::string::npos);
}

TEST(Analyze, AllUnstableExitsThree) {
  const SystemConfig cfg = swiss::parse_config(R"({
    "nodes": [{"id": 1, "lambda": 1.5}, {"id": 2, "lambda": 2}],
    "edges": [{"from": 1, "to": 2, "mu": 1}, {"from": 2, "to": 1, "mu": 1}]
  })");
  const CliRun r = run("analyze", cfg);
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.report["contractive"].get<bool>());
  EXPECT_GE(r.report["min_mean"]["mean_weight"].get<double>(), 0.0);
  EXPECT_NE(r.out.find("no contractive cycle"), std::string::npos);
}

TEST(Synthesize, PairHorizonSix) {
  CommandOptions o;
  o.horizon = 6;
  const CliRun r = run("synthesize", pair_config(), o);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.report["sigma"], Json::parse("[1, 2, 1, 2, 1, 2]"));
  o.horizon = 0;
  EXPECT_EQ(run("synthesize", pair_config(), o).code, 2);
}

TEST(Synthesize, SelfLoopOnlyGivesConstantSignal) {
  const SystemConfig cfg = swiss::parse_config(R"({
    "nodes": [{"id": 3, "lambda": 0.9}], "edges": [{"from": 3, "to": 3, "mu": 1}]
  })");
  CommandOptions o;
  o.horizon = 4;
  const CliRun r = run("synthesize", cfg, o);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.report["sigma"], Json::parse("[3, 3, 3, 3]"));
}

TEST(Synthesize, NoCycleExitsThree) {
  const SystemConfig cfg = swiss::parse_config(R"({
    "nodes": [{"id": 1, "lambda": 1.5}], "edges": [{"from": 1, "to": 1, "mu": 1}]
  })");
  CommandOptions o;
  o.horizon = 4;
  EXPECT_EQ(run("synthesize", cfg, o).code, 3);
}

TEST(SignalFile, RoundTripThroughSimulateAndBound) {
  const fs::path dir = scratch("signal");
  CommandOptions o;
  o.horizon = 40;
  o.out_dir = dir;
  ASSERT_EQ(run("synthesize", pair_config(), o).code, 0);
  const auto file = swiss::read_signal_file(dir / "signal.csv");
  EXPECT_EQ(file.base_walk, swiss::Walk({1, 2, 1}));
  ASSERT_EQ(file.sigma.size(), 40u);
  const swiss::PeriodicSignal s(file.base_walk);
  for (std::size_t t = 0; t < 40; ++t) EXPECT_EQ(file.sigma[t], s.at(t));

  CommandOptions b;
  b.signal_file = dir / "signal.csv";
  const CliRun r = run("bound", pair_config(), b);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.report["signal_source"], "file");

  std::istringstream tampered("# base_walk: 1 2 1\nt,sigma\n0,1\n1,1\n");
  EXPECT_THROW(swiss::parse_signal_file(tampered, "t.csv"), swiss::InputError);
}

TEST(Verify, ScalarPasses) {
  const CliRun r = run("verify", scalar_config());
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(r.report["passed"].get<bool>());
}

TEST(Verify, PairReportsSecondSubsystem) {
  const CliRun r = run("verify", pair_config());
  EXPECT_EQ(r.code, 4);
  bool f2_decay_failed = false;
  for (const Json& c : r.report["checks"]) {
    if (c["subsystem"] == "1") {
      EXPECT_TRUE(c["passed"].get<bool>()) << c["inequality"];
    }
    if (c["subsystem"] == "2" && c["inequality"] == "decay") {
      f2_decay_failed = !c["passed"].get<bool>();
      EXPECT_EQ(c["violations"].size(), c["violation_count"].get<std::size_t>());
    }
  }
  EXPECT_TRUE(f2_decay_failed);
}

TEST(Verify, LowerComparisonAboveV) {
  SystemConfig cfg = scalar_config();
  cfg.profile->alpha_lower = {2.0, 1.0};
  EXPECT_EQ(run("verify", cfg).code, 4);
}

TEST(Verify, MissingBlocksExitTwo) {
  SystemConfig cfg = scalar_config();
  cfg.profile.reset();
  const CliRun r = run("verify", cfg);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("profile"), std::string::npos);
}

TEST(Simulate, ScalarSummaryShowsBoundChecks) {
  const fs::path dir = scratch("scalar_sim");
  CommandOptions o;
  o.out_dir = dir;
  const CliRun r = run("simulate", scalar_config(), o);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report["bound_checks"]["ok"], 50);
  EXPECT_TRUE(r.report["verification"]["passed"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  EXPECT_TRUE(fs::exists(dir / "trajectories" / "traj_049.csv"));
  const std::string table = slurp(dir / "trajectories" / "traj_000.csv");
  EXPECT_EQ(table.rfind("t,sigma,v1,x1,norm_x,bound\n", 0), 0u);
}

TEST(Simulate, CountZeroIsAnError) {
  SystemConfig cfg = scalar_config();
  cfg.simulation->count = 0;
  EXPECT_EQ(run("simulate", cfg).code, 2);
}

TEST(Simulate, SeedOverrideChangesSummary) {
  CommandOptions a, b;
  a.seed = 1;
  b.seed = 2;
  const CliRun ra = run("simulate", scalar_config(), a);
  const CliRun rb = run("simulate", scalar_config(), b);
  EXPECT_NE(ra.report["trajectories"][0]["x0"], rb.report["trajectories"][0]["x0"]);
  EXPECT_EQ(ra.report, run("simulate", scalar_config(), a).report);
}

TEST(Bound, PairRows) {
  CommandOptions o;
  o.t_max = 10;
  const CliRun r = run("bound", pair_config(), o);
  ASSERT_EQ(r.code, 0) << r.err;
  const Json& row = r.report["rows"][2];
  EXPECT_NEAR(row["psi1"].get<double>(), 0.978, 1e-12);
  EXPECT_NEAR(row["psi2"].get<double>(), 2.2, 1e-12);
  EXPECT_EQ(r.report["rows"].size(), 11u);
}

TEST(Bound, TMaxZero) {
  CommandOptions o;
  o.t_max = 0;
  const CliRun r = run("bound", pair_config(), o);
  ASSERT_EQ(r.code, 0);
  ASSERT_EQ(r.report["rows"].size(), 1u);
  EXPECT_EQ(r.report["rows"][0]["psi1"], 1.0);
  EXPECT_EQ(r.report["rows"][0]["psi2"], 0.0);
}

TEST(Bound, ScalarRowsBoundedAndMonotoneAcrossPeriods) {
  const CliRun r = run("bound", scalar_config());
  ASSERT_EQ(r.code, 0);
  const double cap = r.report["psi2_bound"].get<double>();
  const auto& rows = r.report["rows"];
  // The walk 1 2 1 has period 2.
  for (std::size_t t = 0; t < rows.size(); ++t) {
    EXPECT_LE(rows[t]["psi2"].get<double>(), cap);
    if (t >= 2 && t % 2 == 0) {
      EXPECT_GE(rows[t]["psi2"].get<double>(), rows[t - 2]["psi2"].get<double>());
    }
  }
}

TEST(Bound, NonContractiveWalkExitsThree) {
  SystemConfig cfg = pair_config();
  cfg.simulation->walk = std::vector<swiss::VertexId>{2, 2};
  EXPECT_EQ(run("bound", cfg).code, 3);
}

TEST(Binary, ExitCodesAndDeterministicSummary) {
  const std::string cli = SWISS_CLI_PATH;
  const std::string cfg = fixtures::scenario("nonlinear_pair.json");
  auto sh = [](const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(sh(cli + " analyze --config " + cfg), 0);
  EXPECT_EQ(sh(cli + " verify --config " + cfg), 4);
  EXPECT_EQ(sh(cli + " analyze --config /nonexistent.json"), 2);
  EXPECT_EQ(sh(cli + " frobnicate"), 2);

  const fs::path bad = scratch("binary") / "bad.json";
  std::ofstream(bad) << "{\n  \"nodes\": [\n";
  std::ostringstream err;
  const int code = swiss::run_command_file("analyze", bad.string(), {}, err, err);
  EXPECT_EQ(code, 2);
  EXPECT_NE(err.str().find("bad.json:3:"), std::string::npos) << err.str();

  const fs::path a = scratch("binary_a"), b = scratch("binary_b");
  ASSERT_EQ(sh(cli + " simulate --config " + cfg + " --out-dir " + a.string()), 0);
  ASSERT_EQ(sh(cli + " simulate --config " + cfg + " --out-dir " + b.string()), 0);
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
  EXPECT_EQ(slurp(a / "trajectories" / "traj_017.csv"),
            slurp(b / "trajectories" / "traj_017.csv"));
}

}  // namespace
