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

#ifndef SCENEFUZZ_CORE_CAMPAIGN_H_
#define SCENEFUZZ_CORE_CAMPAIGN_H_

// Coverage-guided fuzzing campaign. Each iteration simulates one mutant; a
// mutant whose trajectory reaches blocks never covered before becomes a seed
// with priority equal to the number of new blocks.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenefuzz/coverage_grid.h"
#include "scenefuzz/mutation.h"
#include "scenefuzz/random_scene.h"
#include "scenefuzz/scenario.h"
#include "scenefuzz/sim_interface.h"

namespace scenefuzz {

enum class Severity { kNone, kCollision, kNearCollision, kEgoFaultExcluded };
std::string_view SeverityName(Severity severity);
std::optional<Severity> SeverityFromName(std::string_view name);
inline bool IsRisky(Severity s) {
  return s == Severity::kCollision || s == Severity::kNearCollision;
}

enum class Method { kAsf, kRandom, kGenetic };
std::string_view MethodName(Method method);
std::optional<Method> MethodFromName(std::string_view name);

struct GeneticConfig {
  size_t population = 8;
  size_t patience = 3;  // generations without improvement before a restart
  double min_improvement = 0.1;  // meters
};

struct CampaignConfig {
  size_t iteration_budget = 40;
  size_t initial_seed_count = 4;
  double near_threshold = 4.0;  // meters
  double block_size = kDefaultBlockSize;
  MutationConfig mutation;
  RandomSceneConfig random_scene;
  GeneticConfig genetic;
  uint64_t master_seed = 0;
  double horizon = kDefaultHorizon;
  size_t jobs = 1;  // simulations in flight per batch
  // Keep ego-at-fault crashes as risky collisions too.
  bool store_ego_fault = false;
  // Handcrafted starting seeds; random ones when empty.
  std::vector<TestCase> initial_seeds;

  // Throws std::invalid_argument on a broken configuration.
  void Check() const;
};

// Reads the keys present under a config document's "campaign" object into
// `config`; absent keys keep their current values. Throws
// std::invalid_argument on unknown keys or bad values.
void ApplyCampaignJson(const nlohmann::json& campaign, CampaignConfig& config);

struct IterationRecord {
  std::string method;
  size_t iteration = 0;  // 1-based
  std::string case_id;
  std::string parent_id;
  std::string strategy;
  size_t new_blocks = 0;
  size_t total_blocks = 0;
  Severity severity = Severity::kNone;
  double min_distance = kDistanceCap;
  std::optional<double> hit_speed_kmh;
  std::string hit_object;
  // Not part of report.csv.
  std::string rule;
  bool enqueued = false;
};

struct RiskyCase {
  TestCase test_case;
  SimOutcome outcome;
  Severity severity = Severity::kNone;
  size_t iteration = 0;
};

struct CampaignReport {
  Method method = Method::kAsf;
  std::vector<IterationRecord> records;
  std::optional<CoverageGrid> grid;
  std::vector<RiskyCase> risky;
  // Simulated case of every iteration, in order.
  std::vector<TestCase> cases;
  size_t restarts = 0;
  size_t simulations = 0;
};

class CampaignError : public std::runtime_error {
 public:
  CampaignError(size_t iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " +
                           what),
        iteration_(iteration) {}
  size_t iteration() const { return iteration_; }

 private:
  size_t iteration_;
};

// kCollision when the ego crashed and no verdict holds it at fault (or
// store_ego_fault is set), kEgoFaultExcluded for other crashes,
// kNearCollision when the gap fell below near_threshold, else kNone.
Severity ClassifyOutcome(const SimOutcome& outcome,
                         const CampaignConfig& config);
bool ShouldEnqueue(const NoveltyReport& novelty);

// What the ego hit in `crash`: the NPC's kind name, or the party id when it
// is not one of the case's NPCs.
std::string HitObject(const TestCase& test_case, const CrashEvent& crash);

// Owns the coverage grid and the report of one campaign; shared by all three
// fuzzers so their reports are directly comparable.
class CampaignRecorder {
 public:
  CampaignRecorder(Method method, const DrivingArea& area,
                   const CampaignConfig& config);

  // Folds one simulated case into coverage and the report.
  const IterationRecord& Record(const TestCase& test_case,
                                const SimOutcome& outcome,
                                NoveltyReport* novelty = nullptr);
  void CountRestart() { ++report_.restarts; }
  size_t iterations() const { return report_.records.size(); }
  IterationRecord& last() { return report_.records.back(); }
  CampaignReport Finish() { return std::move(report_); }

 private:
  const CampaignConfig& config_;
  CampaignReport report_;
};

// Runs `cases` on `simulator`, concurrently when it is thread-safe and
// config.jobs > 1. Results come back in input order. Backend failures are
// rethrown as CampaignError naming first_iteration + index.
std::vector<SimOutcome> SimulateBatch(Simulator& simulator,
                                      std::span<const TestCase> cases,
                                      const CampaignConfig& config,
                                      size_t first_iteration);

CampaignReport RunCampaign(const StaticConfig& scene,
                           const CampaignConfig& config, Simulator& simulator);

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_CAMPAIGN_H_
