// Copyright 2026 The SceneFuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cli.h"

#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scenefuzz/report_io.h"
#include "scenefuzz/risky_store.h"
#include "scenefuzz/sim_kernel.h"
#include "test_util.h"

namespace scenefuzz {
namespace {

namespace fs = std::filesystem;
using testing::DemoScenePath;
using testing::FixturePath;
using testing::LoadFixture;
using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage = {"scenefuzz"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : storage) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::Main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Fixture(const std::string& name) {
  return FixturePath(name + ".scene.json");
}

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(Cli({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(Cli({}).code, cli::kExitError);
  EXPECT_EQ(Cli({"frobnicate"}).code, cli::kExitError);
  TempDir dir("usage");
  const Result zero = Cli({"fuzz", "--scene", DemoScenePath(), "--budget", "0",
                           "--out", dir / "o"});
  EXPECT_EQ(zero.code, cli::kExitError);
  EXPECT_NE(zero.err.find("budget"), std::string::npos);
  EXPECT_EQ(Cli({"fuzz", "--scene", DemoScenePath(), "--method", "annealing",
                 "--out", dir / "o"})
                .code,
            cli::kExitError);
  EXPECT_EQ(Cli({"fuzz", "--scene", dir / "missing.json", "--out", dir / "o"}).code,
            cli::kExitError);
}

TEST(Cli, FuzzIsDeterministicAndWritesArtifacts) {
  TempDir dir("fuzz");
  const auto run = [&](const std::string& out) {
    return Cli({"fuzz", "--scene", DemoScenePath(), "--method", "asf",
                "--budget", "40", "--seed", "1", "--out", out,
                "--store-ego-fault"});
  };
  const Result a = run(dir / "a");
  const Result b = run(dir / "b");
  ASSERT_NE(a.code, cli::kExitError) << a.err;
  EXPECT_EQ(a.code, b.code);
  const std::string report = ReadFile(dir / "a/report.csv");
  EXPECT_EQ(report, ReadFile(dir / "b/report.csv"));
  EXPECT_EQ(ParseReportCsv(report).size(), 40u);
  EXPECT_EQ(ReadFile(dir / "a/grid.pgm"), ReadFile(dir / "b/grid.pgm"));
  const auto rows = ReadIndex(fs::path(dir / "a/risky"));
  bool collision = false;
  for (const IndexRow& r : rows) collision = collision || r.severity == "collision";
  EXPECT_EQ(a.code == cli::kExitCollision, collision);

  // Every stored case replays to its outcome.json.
  for (const IndexRow& r : rows) {
    const fs::path stored = fs::path(dir / "a/risky") / r.path;
    const std::string out = dir / "replayed.json";
    ASSERT_EQ(Cli({"replay", (stored / "case.scene.json").string(), "--out", out})
                  .code,
              cli::kExitOk);
    EXPECT_EQ(ReadFile(out), ReadFile((stored / "outcome.json").string()));
  }
}

TEST(Cli, ManifestAndEnvironmentDefault) {
  TempDir dir("manifest");
  WriteFile(dir / "run.json",
            nlohmann::json{{"scene", DemoScenePath()},
                           {"method", "random"},
                           {"out", "from-config"},
                           {"campaign", {{"iterationBudget", 5}, {"masterSeed", 4}}}}
                .dump());
  const Result r = Cli({"fuzz", "--config", dir / "run.json"});
  ASSERT_NE(r.code, cli::kExitError) << r.err;
  const auto records = ParseReportCsv(ReadFile(dir / "from-config/report.csv"));
  ASSERT_EQ(records.size(), 5u);
  EXPECT_EQ(records[0].method, "random");
  // Flags override the file.
  ASSERT_NE(Cli({"fuzz", "--config", dir / "run.json", "--budget", "3", "--out",
                 dir / "flag"})
                .code,
            cli::kExitError);
  EXPECT_EQ(ParseReportCsv(ReadFile(dir / "flag/report.csv")).size(), 3u);

  WriteFile(dir / "bad.json", R"({"scene": "x", "colour": "blue"})");
  EXPECT_EQ(Cli({"fuzz", "--config", dir / "bad.json"}).code, cli::kExitError);

  ::setenv("SCENEFUZZ_OUT", (dir / "env").c_str(), 1);
  const Result e = Cli({"fuzz", "--scene", DemoScenePath(), "--budget", "2"});
  ::unsetenv("SCENEFUZZ_OUT");
  ASSERT_NE(e.code, cli::kExitError) << e.err;
  EXPECT_TRUE(fs::exists(dir / "env/report.csv"));
}

TEST(Cli, ReplayBaselineReachesGoal) {
  TempDir dir("replay");
  const Result r = Cli({"replay", DemoScenePath(), "--out", dir / "o.json"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("reached_goal"), std::string::npos);
  EXPECT_EQ(ReadFile(dir / "o.json"),
            SerializeOutcome(KernelSimulator().Run(testing::DemoCase())));
}

TEST(Cli, FixedPlannerRemovesL1) {
  TempDir dir("fixed");
  const Result bad = Cli({"replay", Fixture("defect"), "--out", dir / "a.json"});
  EXPECT_NE(bad.out.find("verdict L1"), std::string::npos) << bad.out;
  const Result fixed = Cli({"replay", Fixture("defect"), "--fixed-planner", "--out",
                            dir / "b.json"});
  EXPECT_EQ(fixed.code, cli::kExitOk);
  EXPECT_EQ(fixed.out.find("L1"), std::string::npos) << fixed.out;
  EXPECT_TRUE(OutcomeFromJson(nlohmann::json::parse(ReadFile(dir / "b.json")))
                  .crashes.empty());
}

TEST(Cli, ReplayOverBridgeChild) {
  TempDir dir("bridge");
  const Result r = Cli({"replay", Fixture("cut_in"), "--bridge-cmd",
                        std::string(SCENEFUZZ_BIN) + " serve --stdio", "--out",
                        dir / "o.json"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(ReadFile(dir / "o.json"),
            SerializeOutcome(KernelSimulator().Run(LoadFixture("cut_in"))));
}

TEST(Cli, ReplayRejectsInvalidCase) {
  TempDir dir("invalid");
  TestCase tc = LoadFixture("one_npc");
  tc.dynamic_config.environment.rain = 2.0;
  SaveTestCase(tc, dir / "bad.scene.json");
  EXPECT_EQ(Cli({"replay", dir / "bad.scene.json", "--out", dir / "o.json"}).code,
            cli::kExitError);
  WriteFile(dir / "garbage.json", "{");
  EXPECT_EQ(Cli({"replay", dir / "garbage.json"}).code, cli::kExitError);
}

TEST(Cli, CompareThreeReports) {
  TempDir dir("compare");
  std::vector<std::string> reports;
  for (const char* m : {"asf", "random", "genetic"}) {
    const std::string out = dir / m;
    ASSERT_NE(Cli({"fuzz", "--scene", DemoScenePath(), "--method", m, "--budget",
                   "40", "--seed", "2", "--out", out})
                  .code,
              cli::kExitError);
    reports.push_back(out + "/report.csv");
  }
  const Result r = Cli({"compare", reports[0], reports[1], reports[2], "--out",
                        dir / "cmp"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const std::string csv = ReadFile(dir / "cmp/coverage.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iteration,asf,random,genetic");
  std::vector<std::vector<IterationRecord>> parsed;
  for (const std::string& p : reports) parsed.push_back(ParseReportCsv(ReadFile(p)));
  EXPECT_EQ(csv, FormatCurvesCsv(CurvesFromReports(parsed)));
  EXPECT_TRUE(fs::exists(dir / "cmp/coverage.svg"));
  EXPECT_TRUE(fs::exists(dir / "cmp/risky_summary.md"));

  EXPECT_EQ(Cli({"compare", reports[0], "--out", dir / "one"}).code, cli::kExitError);
  ASSERT_NE(Cli({"fuzz", "--scene", DemoScenePath(), "--budget", "7", "--out",
                 dir / "short"})
                .code,
            cli::kExitError);
  EXPECT_EQ(Cli({"compare", reports[0], dir / "short/report.csv", "--out",
                 dir / "mismatch"})
                .code,
            cli::kExitError);
}

TEST(Cli, MutateFlipIsLocalAndValid) {
  TempDir dir("mutate");
  TestCase parent = LoadFixture("one_npc");
  parent.dynamic_config.traffic_lights.clear();  // only the NPC can flip
  SaveTestCase(parent, dir / "parent.scene.json");
  const Result r = Cli({"mutate", dir / "parent.scene.json", "--strategy", "flip",
                        "--seed", "3", "--out", dir / "m"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "m")) {
    const TestCase child = LoadTestCase(e.path().string());
    TestCase probe = child;
    probe.case_id = parent.case_id;
    probe.lineage = parent.lineage;
    probe.dynamic_config.npcs[0].spawn_pose = parent.dynamic_config.npcs[0].spawn_pose;
    EXPECT_EQ(probe, parent);
    EXPECT_NE(child.dynamic_config.npcs[0].spawn_pose,
              parent.dynamic_config.npcs[0].spawn_pose);
    EXPECT_EQ(Cli({"validate", e.path().string()}).code, cli::kExitOk);
    ++files;
  }
  EXPECT_GT(files, 0u);
}

TEST(Cli, MutateUnknownStrategyListsNames) {
  const Result r = Cli({"mutate", Fixture("one_npc"), "--strategy", "shuffle"});
  EXPECT_EQ(r.code, cli::kExitError);
  for (const char* name : {"arithmetic", "flip", "random", "insert"}) {
    EXPECT_NE(r.err.find(name), std::string::npos) << r.err;
  }
}

TEST(Cli, ValidateReportsBadFiles) {
  TempDir dir("validate");
  TestCase tc = LoadFixture("one_npc");
  tc.dynamic_config.npcs[0].spawn_pose.easting = 0.0;
  SaveTestCase(tc, dir / "out.scene.json");
  EXPECT_EQ(Cli({"validate", Fixture("one_npc"), Fixture("cut_in")}).code,
            cli::kExitOk);
  const Result r = Cli({"validate", Fixture("one_npc"), dir / "out.scene.json"});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_NE(r.out.find("out.scene.json"), std::string::npos);
}

}  // namespace
}  // namespace scenefuzz
