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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scenefuzz/baselines.h"
#include "scenefuzz/bridge.h"
#include "scenefuzz/campaign.h"
#include "scenefuzz/mutation.h"
#include "scenefuzz/report_io.h"
#include "scenefuzz/risky_store.h"
#include "scenefuzz/rng.h"
#include "scenefuzz/scenario.h"
#include "scenefuzz/sim_kernel.h"

namespace scenefuzz::cli {

namespace fs = std::filesystem;

namespace {

// A failure reported to the user as one diagnostic line and exit status 1.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BackendOptions {
  std::string backend = "builtin";
  std::string bridge;      // host:port
  std::string bridge_cmd;  // child process command line
  bool fixed_planner = false;
};

void AddBackendOptions(CLI::App* app, BackendOptions& o) {
  app->add_option("--backend", o.backend, "builtin or bridge")
      ->check(CLI::IsMember({"builtin", "bridge"}));
  app->add_option("--bridge", o.bridge,
                  "host:port of a bridge server (implies --backend bridge)");
  app->add_option("--bridge-cmd", o.bridge_cmd,
                  "command to spawn as a bridge backend over its stdio");
  app->add_flag("--fixed-planner", o.fixed_planner,
                "built-in planner with the lane-borrow checks restored");
}

std::vector<std::string> SplitWords(const std::string& command) {
  std::istringstream in(command);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

std::unique_ptr<Simulator> MakeSimulator(const BackendOptions& o) {
  const bool bridge =
      o.backend == "bridge" || !o.bridge.empty() || !o.bridge_cmd.empty();
  if (!bridge) {
    KernelConfig config;
    config.fixed_planner = o.fixed_planner;
    return std::make_unique<KernelSimulator>(config);
  }
  if (o.fixed_planner) {
    throw UsageError(
        "--fixed-planner applies to the built-in backend; pass it to the "
        "bridge server instead");
  }
  if (!o.bridge.empty() && !o.bridge_cmd.empty()) {
    throw UsageError("give either --bridge or --bridge-cmd, not both");
  }
  if (!o.bridge.empty()) {
    const auto [host, port] = ParseHostPort(o.bridge);
    return BridgeSimulator::ConnectTcp(host, port);
  }
  if (o.bridge_cmd.empty()) {
    throw UsageError("--backend bridge needs --bridge or --bridge-cmd");
  }
  return BridgeSimulator::SpawnChild(SplitWords(o.bridge_cmd));
}

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

void PrintOutcome(const TestCase& tc, const SimOutcome& o, std::ostream& out) {
  out << "case " << tc.case_id << ": " << CompletionName(o.completed) << "\n";
  out << "  min obstacle distance: " << Fixed(o.min_obstacle_distance, 2)
      << " m\n";
  for (size_t i = 0; i < o.crashes.size(); ++i) {
    const CrashEvent& c = o.crashes[i];
    out << "  crash at " << Fixed(c.time, 2) << " s: " << c.party_a << " / "
        << c.party_b << ", " << Fixed(c.relative_speed_kmh, 2) << " km/h\n";
    if (i < o.verdicts.size()) {
      const LiabilityVerdict& v = o.verdicts[i];
      out << "    verdict " << v.rule << " ("
          << (v.ego_at_fault ? "ego at fault" : "ego not at fault")
          << "): " << v.narrative << "\n";
    }
  }
  for (const RuleViolation& v : o.violations) {
    out << "  violation " << v.kind << " at " << Fixed(v.time, 2) << " s by "
        << v.agent << ": " << v.detail << "\n";
  }
}

// ---------------------------------------------------------------- fuzz

struct FuzzOptions {
  std::string config_path;
  std::string scene;
  std::string method = "asf";
  size_t budget = 0;
  uint64_t seed = 0;
  double block_size = 0.0;
  double near_threshold = 0.0;
  size_t batch_size = 0;
  size_t jobs = 0;
  double horizon = 0.0;
  std::string out;
  std::string seeds;
  bool store_ego_fault = false;
  BackendOptions backend;
};

void ApplyManifest(const std::string& path, FuzzOptions& o,
                   CampaignConfig& config,
                   const std::function<bool(const char*)>& given) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ReadFile(path));
  } catch (const std::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config " + path + " must be an object");
  const fs::path base = fs::path(path).parent_path();
  auto text = [&](const char* key) {
    const nlohmann::json& v = doc[key];
    if (!v.is_string()) {
      throw UsageError("config " + path + ": '" + key + "' must be a string");
    }
    return v.get<std::string>();
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "campaign") {
      try {
        ApplyCampaignJson(value, config);
      } catch (const std::invalid_argument& e) {
        throw UsageError("config " + path + ": " + e.what());
      }
    } else if (key == "scene") {
      if (!given("--scene")) o.scene = (base / text("scene")).string();
    } else if (key == "method") {
      if (!given("--method")) o.method = text("method");
    } else if (key == "out") {
      if (!given("--out")) o.out = (base / text("out")).string();
    } else if (key == "backend") {
      // "builtin" or a bridge address.
      const std::string b = text("backend");
      if (!given("--backend") && !given("--bridge") && b != "builtin") {
        o.backend.bridge = b;
      }
    } else {
      throw UsageError("config " + path + ": unknown key '" + key + "'");
    }
  }
}

std::vector<TestCase> LoadSeedDir(const std::string& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 11 &&
        name.ends_with(".scene.json")) {
      files.push_back(entry.path());
    }
  }
  if (ec) throw UsageError("cannot read seed directory " + dir);
  std::sort(files.begin(), files.end());
  std::vector<TestCase> seeds;
  for (const fs::path& f : files) seeds.push_back(LoadTestCase(f.string()));
  if (seeds.empty()) throw UsageError("no *.scene.json seeds in " + dir);
  return seeds;
}

int RunFuzz(FuzzOptions& o, CLI::App* app, std::ostream& out) {
  CampaignConfig config;
  auto given = [app](const char* flag) { return app->count(flag) > 0; };
  if (!o.config_path.empty()) ApplyManifest(o.config_path, o, config, given);
  if (o.scene.empty()) throw UsageError("--scene is required");
  if (given("--budget")) config.iteration_budget = o.budget;
  if (given("--seed")) config.master_seed = o.seed;
  if (given("--block-size")) config.block_size = o.block_size;
  if (given("--near-threshold")) config.near_threshold = o.near_threshold;
  if (given("--batch-size")) config.mutation.batch_size = o.batch_size;
  if (given("--jobs")) config.jobs = o.jobs;
  if (given("--horizon")) config.horizon = o.horizon;
  if (o.store_ego_fault) config.store_ego_fault = true;
  const std::optional<Method> method = MethodFromName(o.method);
  if (!method) {
    throw UsageError("unknown method '" + o.method +
                     "' (expected asf, random or genetic)");
  }
  try {
    config.Check();
    config.mutation.Check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const TestCase scene = LoadTestCase(o.scene);
  if (!o.seeds.empty()) config.initial_seeds = LoadSeedDir(o.seeds);
  if (!scene.dynamic_config.traffic_lights.empty()) {
    config.random_scene.light_ids.clear();
    for (const TrafficLightPlan& p : scene.dynamic_config.traffic_lights) {
      config.random_scene.light_ids.push_back(p.light_id);
    }
  }
  if (o.out.empty()) o.out = "scenefuzz-out";
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw UsageError("cannot create " + o.out + ": " + ec.message());

  std::unique_ptr<Simulator> simulator = MakeSimulator(o.backend);
  CampaignReport report;
  switch (*method) {
    case Method::kAsf:
      report = RunCampaign(scene.static_config, config, *simulator);
      break;
    case Method::kRandom:
      report = RunRandomCampaign(scene.static_config, config, *simulator);
      break;
    case Method::kGenetic:
      report = RunGeneticCampaign(scene.static_config, config, *simulator);
      break;
  }

  const fs::path dir(o.out);
  WriteFile((dir / "report.csv").string(), FormatReportCsv(report.records));
  WriteFile((dir / "grid.pgm").string(), FormatGridPgm(*report.grid));
  size_t collisions = 0, near = 0;
  for (const RiskyCase& r : report.risky) {
    StoreRisky(r, dir / "risky");
    (r.severity == Severity::kCollision ? collisions : near)++;
  }
  out << MethodName(*method) << ": " << report.records.size()
      << " iterations, " << report.grid->covered_count() << " of "
      << report.grid->block_count() << " blocks covered, " << collisions
      << " collision and " << near << " near-collision cases";
  if (report.restarts > 0) out << ", " << report.restarts << " restarts";
  out << "\nartifacts in " << o.out << "\n";
  return collisions > 0 ? kExitCollision : kExitOk;
}

// ---------------------------------------------------------------- replay

int RunReplay(const std::string& case_path, const std::string& out_path,
              double horizon, const BackendOptions& backend,
              std::ostream& out) {
  const TestCase tc = LoadTestCase(case_path);
  const ValidationReport report = Validate(tc);
  if (!report.ok()) {
    const Violation& v = report.violations.front();
    throw UsageError(case_path + ": " + v.path + ": " + v.message);
  }
  std::unique_ptr<Simulator> simulator = MakeSimulator(backend);
  const SimOutcome outcome = simulator->Run(tc, horizon);
  PrintOutcome(tc, outcome, out);
  WriteFile(out_path, SerializeOutcome(outcome));
  out << "outcome written to " << out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- compare

int RunCompare(const std::vector<std::string>& reports, const std::string& dir,
               std::ostream& out) {
  if (reports.size() < 2) throw UsageError("compare needs at least 2 reports");
  std::vector<std::vector<IterationRecord>> parsed;
  for (const std::string& path : reports) {
    try {
      parsed.push_back(ParseReportCsv(ReadFile(path)));
    } catch (const std::exception& e) {
      throw UsageError(path + ": " + e.what());
    }
  }
  std::vector<CoverageCurve> curves;
  try {
    curves = CurvesFromReports(parsed);
  } catch (const ReportFormatError& e) {
    throw UsageError(e.what());
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create " + dir + ": " + ec.message());
  const fs::path d(dir);
  WriteFile((d / "coverage.csv").string(), FormatCurvesCsv(curves));
  WriteFile((d / "coverage.svg").string(), RenderCurvesSvg(curves));
  const std::string summary = FormatRiskySummary(parsed);
  WriteFile((d / "risky_summary.md").string(), summary);
  out << "final coverage:";
  for (const CoverageCurve& c : curves) {
    out << " " << c.method << "=" << c.total_blocks.back();
  }
  out << "\n\n" << summary;
  return kExitOk;
}

// ---------------------------------------------------------------- mutate

int RunMutate(const std::string& case_path, const std::string& strategy,
              uint64_t seed, size_t batch_size, const std::string& dir,
              std::ostream& out) {
  const std::optional<MutationStrategy> s = StrategyFromName(strategy);
  if (!s) {
    std::string names;
    for (MutationStrategy k : kAllStrategies) {
      names += (names.empty() ? "" : ", ") + std::string(StrategyName(k));
    }
    throw UsageError("unknown strategy '" + strategy + "'; valid: " + names);
  }
  const TestCase parent = LoadTestCase(case_path);
  MutationConfig config;
  config.batch_size = batch_size;
  config.strategy_weights = {0.0, 0.0, 0.0, 0.0};
  config.strategy_weights[static_cast<size_t>(*s)] = 1.0;
  try {
    config.Check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Rng rng(seed);
  MutationBatch batch;
  try {
    batch = Mutate(parent, config, rng);
  } catch (const NoApplicableTarget& e) {
    throw UsageError(std::string(e.what()));
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create " + dir + ": " + ec.message());
  for (const TestCase& tc : batch.cases) {
    const fs::path file = fs::path(dir) / (tc.case_id + ".scene.json");
    SaveTestCase(tc, file.string());
    out << file.string() << "\n";
  }
  out << batch.cases.size() << " of " << batch.candidates
      << " candidates were valid\n";
  return kExitOk;
}

// ---------------------------------------------------------------- validate

int RunValidate(const std::vector<std::string>& files, std::ostream& out) {
  bool all_ok = true;
  for (const std::string& path : files) {
    try {
      const ValidationReport report = Validate(LoadTestCase(path));
      if (report.ok()) {
        out << path << ": ok\n";
        continue;
      }
      all_ok = false;
      for (const Violation& v : report.violations) {
        out << path << ": " << v.path << ": " << v.rule << ": " << v.message
            << "\n";
      }
    } catch (const ScenarioError& e) {
      all_ok = false;
      out << path << ": " << e.path() << ": " << e.what() << "\n";
    }
  }
  return all_ok ? kExitOk : kExitError;
}

// ---------------------------------------------------------------- serve

int RunServe(bool stdio, const std::string& listen, bool fixed_planner,
             int connections, std::ostream& out) {
  KernelConfig config;
  config.fixed_planner = fixed_planner;
  KernelSimulator simulator(config);
  if (stdio == !listen.empty()) {
    throw UsageError("serve needs exactly one of --stdio or --listen");
  }
  if (stdio) {
    FdChannel channel(0, 1);
    ServeBridge(simulator, channel);
    return kExitOk;
  }
  std::string host = "127.0.0.1";
  std::string port_text = listen;
  if (const size_t colon = listen.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host = listen.substr(0, colon);
    port_text = listen.substr(colon + 1);
  }
  int port = -1;
  try {
    size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) port = -1;
  } catch (const std::exception&) {
  }
  if (port < 0 || port > 65535) throw UsageError("bad --listen '" + listen + "'");
  ServeTcp(
      simulator, host, port,
      [&out](int bound) {
        out << "listening on port " << bound << std::endl;
      },
      connections);
  return kExitOk;
}

}  // namespace

int Main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err) {
  CLI::App app{"Coverage-guided scenario fuzzer for automated driving"};
  app.require_subcommand(1);

  FuzzOptions fuzz;
  CLI::App* fuzz_cmd = app.add_subcommand("fuzz", "run a fuzzing campaign");
  fuzz_cmd->add_option("--config", fuzz.config_path,
                       "JSON manifest; flags override its values")
      ->check(CLI::ExistingFile);
  fuzz_cmd->add_option("--scene", fuzz.scene, "scene file (.scene.json)");
  fuzz_cmd->add_option("--method", fuzz.method, "asf, random or genetic");
  fuzz_cmd->add_option("--budget", fuzz.budget, "simulations to run");
  fuzz_cmd->add_option("--seed", fuzz.seed, "master seed");
  fuzz_cmd->add_option("--block-size", fuzz.block_size, "coverage block, m");
  fuzz_cmd->add_option("--near-threshold", fuzz.near_threshold,
                       "near-collision gap, m");
  fuzz_cmd->add_option("--batch-size", fuzz.batch_size, "mutants per seed");
  fuzz_cmd->add_option("--jobs", fuzz.jobs, "parallel simulations");
  fuzz_cmd->add_option("--horizon", fuzz.horizon, "seconds per simulation");
  fuzz_cmd->add_option("--out", fuzz.out, "output directory")
      ->envname("SCENEFUZZ_OUT");
  fuzz_cmd->add_option("--seeds", fuzz.seeds,
                       "directory of handcrafted *.scene.json seeds");
  fuzz_cmd->add_flag("--store-ego-fault", fuzz.store_ego_fault,
                     "store ego-at-fault crashes as collisions too");
  AddBackendOptions(fuzz_cmd, fuzz.backend);

  std::string replay_case, replay_out = "outcome.json";
  double replay_horizon = kDefaultHorizon;
  BackendOptions replay_backend;
  CLI::App* replay_cmd =
      app.add_subcommand("replay", "simulate one case and report its outcome");
  replay_cmd->add_option("case", replay_case, "case file")->required();
  replay_cmd->add_option("--out", replay_out, "outcome file to write");
  replay_cmd->add_option("--horizon", replay_horizon, "seconds");
  AddBackendOptions(replay_cmd, replay_backend);

  std::vector<std::string> compare_reports;
  std::string compare_out = ".";
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "coverage curves and risky-case table of several reports");
  compare_cmd->add_option("reports", compare_reports, "report.csv files")
      ->required();
  compare_cmd->add_option("--out", compare_out, "output directory")
      ->envname("SCENEFUZZ_OUT");

  std::string mutate_case, mutate_strategy, mutate_out = "mutants";
  uint64_t mutate_seed = 0;
  size_t mutate_batch = 8;
  CLI::App* mutate_cmd =
      app.add_subcommand("mutate", "write one batch of mutants of a case");
  mutate_cmd->add_option("case", mutate_case, "case file")->required();
  mutate_cmd->add_option("--strategy", mutate_strategy,
                         "arithmetic, flip, random or insert")
      ->required();
  mutate_cmd->add_option("--seed", mutate_seed, "RNG seed");
  mutate_cmd->add_option("--batch-size", mutate_batch, "mutants to draw");
  mutate_cmd->add_option("--out", mutate_out, "output directory");

  std::vector<std::string> validate_files;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check case files against the schema");
  validate_cmd->add_option("files", validate_files, "case files")->required();

  bool serve_stdio = false, serve_fixed = false;
  std::string serve_listen;
  int serve_connections = 0;
  CLI::App* serve_cmd = app.add_subcommand(
      "serve", "serve the built-in simulator over the bridge protocol");
  serve_cmd->add_flag("--stdio", serve_stdio, "serve on stdin/stdout");
  serve_cmd->add_option("--listen", serve_listen,
                        "[host:]port to listen on (0 picks one)");
  serve_cmd->add_option("--connections", serve_connections,
                        "exit after this many connections (0 = never)");
  serve_cmd->add_flag("--fixed-planner", serve_fixed,
                      "built-in planner with the lane-borrow checks restored");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*fuzz_cmd) return RunFuzz(fuzz, fuzz_cmd, out);
    if (*replay_cmd) {
      return RunReplay(replay_case, replay_out, replay_horizon, replay_backend,
                       out);
    }
    if (*compare_cmd) return RunCompare(compare_reports, compare_out, out);
    if (*mutate_cmd) {
      return RunMutate(mutate_case, mutate_strategy, mutate_seed, mutate_batch,
                       mutate_out, out);
    }
    if (*validate_cmd) return RunValidate(validate_files, out);
    if (*serve_cmd) {
      return RunServe(serve_stdio, serve_listen, serve_fixed, serve_connections,
                      out);
    }
  } catch (const ScenarioError& e) {
    err << "error: " << (e.path().empty() ? "" : e.path() + ": ") << e.what()
        << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace scenefuzz::cli
