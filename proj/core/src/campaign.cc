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

#include "scenefuzz/campaign.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <type_traits>

#include "scenefuzz/seed_queue.h"

namespace scenefuzz {

using nlohmann::json;

std::string_view SeverityName(Severity s) {
  switch (s) {
    case Severity::kNone:
      return "none";
    case Severity::kCollision:
      return "collision";
    case Severity::kNearCollision:
      return "near_collision";
    case Severity::kEgoFaultExcluded:
      return "ego_fault_excluded";
  }
  return "unknown";
}

std::optional<Severity> SeverityFromName(std::string_view name) {
  for (Severity s : {Severity::kNone, Severity::kCollision,
                     Severity::kNearCollision, Severity::kEgoFaultExcluded}) {
    if (SeverityName(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kAsf:
      return "asf";
    case Method::kRandom:
      return "random";
    case Method::kGenetic:
      return "genetic";
  }
  return "unknown";
}

std::optional<Method> MethodFromName(std::string_view name) {
  for (Method m : {Method::kAsf, Method::kRandom, Method::kGenetic}) {
    if (MethodName(m) == name) return m;
  }
  return std::nullopt;
}

void CampaignConfig::Check() const {
  if (iteration_budget < 1) {
    throw std::invalid_argument("iteration budget must be >= 1");
  }
  if (initial_seed_count < 1) {
    throw std::invalid_argument("initial seed count must be >= 1");
  }
  if (!(near_threshold > 0.0)) {
    throw std::invalid_argument("near threshold must be positive");
  }
  if (!(block_size > 0.0)) {
    throw std::invalid_argument("block size must be positive");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (genetic.population < 2) {
    throw std::invalid_argument("genetic population must be >= 2");
  }
  if (random_scene.max_npcs < random_scene.min_npcs) {
    throw std::invalid_argument("random scene NPC range is empty");
  }
  mutation.Check();
}

namespace {

void RejectUnknown(const json& obj, std::initializer_list<std::string_view> keys,
                   const std::string& where) {
  if (!obj.is_object()) {
    throw std::invalid_argument(where + " must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument("unknown key " + where + "." + key);
    }
  }
}

template <typename T>
void Read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  bool ok = true;
  if constexpr (std::is_same_v<T, bool>) {
    ok = it->is_boolean();
  } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
    // Non-negative integers built in code are stored signed.
    ok = it->is_number_unsigned() ||
         (it->is_number_integer() && it->get<int64_t>() >= 0);
  } else if constexpr (std::is_arithmetic_v<T>) {
    ok = it->is_number();
  }
  try {
    if (ok) out = it->get<T>();
  } catch (const json::exception&) {
    ok = false;
  }
  if (!ok) {
    throw std::invalid_argument(where + "." + key + " has the wrong type");
  }
}

}  // namespace

void ApplyCampaignJson(const json& c, CampaignConfig& config) {
  const std::string top = "campaign";
  RejectUnknown(c,
                {"iterationBudget", "initialSeedCount", "nearThreshold",
                 "blockSize", "masterSeed", "horizon", "jobs", "storeEgoFault",
                 "mutation", "genetic", "randomScene"},
                top);
  Read(c, "iterationBudget", config.iteration_budget, top);
  Read(c, "initialSeedCount", config.initial_seed_count, top);
  Read(c, "nearThreshold", config.near_threshold, top);
  Read(c, "blockSize", config.block_size, top);
  Read(c, "masterSeed", config.master_seed, top);
  Read(c, "horizon", config.horizon, top);
  Read(c, "jobs", config.jobs, top);
  Read(c, "storeEgoFault", config.store_ego_fault, top);

  if (auto it = c.find("mutation"); it != c.end()) {
    const std::string where = top + ".mutation";
    const json& m = *it;
    RejectUnknown(m,
                  {"arithmeticStep", "speedStep", "environmentStep",
                   "batchSize", "maxNpcs", "insertKinds", "strategyWeights",
                   "randomSpeedRange", "insertCorridorWidth", "insertAttempts"},
                  where);
    MutationConfig& mc = config.mutation;
    Read(m, "arithmeticStep", mc.arithmetic_step, where);
    Read(m, "speedStep", mc.speed_step, where);
    Read(m, "environmentStep", mc.environment_step, where);
    Read(m, "batchSize", mc.batch_size, where);
    Read(m, "maxNpcs", mc.max_npcs, where);
    Read(m, "insertCorridorWidth", mc.insert_corridor_width, where);
    Read(m, "insertAttempts", mc.insert_attempts, where);
    if (auto k = m.find("insertKinds"); k != m.end()) {
      if (!k->is_array()) throw std::invalid_argument(where + ".insertKinds must be an array");
      mc.insert_kinds.clear();
      for (const json& name : *k) {
        const auto kind = name.is_string()
                              ? AgentKindFromName(name.get<std::string>())
                              : std::nullopt;
        if (!kind) throw std::invalid_argument(where + ".insertKinds: bad kind");
        mc.insert_kinds.push_back(*kind);
      }
    }
    if (auto w = m.find("strategyWeights"); w != m.end()) {
      RejectUnknown(*w, {"arithmetic", "flip", "random", "insert"},
                    where + ".strategyWeights");
      for (MutationStrategy s : kAllStrategies) {
        Read(*w, std::string(StrategyName(s)).c_str(),
             mc.strategy_weights[static_cast<size_t>(s)],
             where + ".strategyWeights");
      }
    }
    if (auto r = m.find("randomSpeedRange"); r != m.end()) {
      if (!r->is_array() || r->size() != 2 || !(*r)[0].is_number() ||
          !(*r)[1].is_number()) {
        throw std::invalid_argument(where + ".randomSpeedRange must be [min, max]");
      }
      mc.random_speed_min = (*r)[0].get<double>();
      mc.random_speed_max = (*r)[1].get<double>();
    }
  }
  if (auto it = c.find("genetic"); it != c.end()) {
    const std::string where = top + ".genetic";
    RejectUnknown(*it, {"population", "patience", "minImprovement"}, where);
    Read(*it, "population", config.genetic.population, where);
    Read(*it, "patience", config.genetic.patience, where);
    Read(*it, "minImprovement", config.genetic.min_improvement, where);
  }
  if (auto it = c.find("randomScene"); it != c.end()) {
    const std::string where = top + ".randomScene";
    RejectUnknown(*it, {"minNpcs", "maxNpcs", "lightIds"}, where);
    Read(*it, "minNpcs", config.random_scene.min_npcs, where);
    Read(*it, "maxNpcs", config.random_scene.max_npcs, where);
    Read(*it, "lightIds", config.random_scene.light_ids, where);
  }
}

Severity ClassifyOutcome(const SimOutcome& outcome,
                         const CampaignConfig& config) {
  if (outcome.HasCrash()) {
    // The ego must be cleared of every contact it was part of.
    bool ego_at_fault = outcome.verdicts.empty();
    for (const LiabilityVerdict& v : outcome.verdicts) {
      ego_at_fault = ego_at_fault || v.ego_at_fault;
    }
    return !ego_at_fault || config.store_ego_fault
               ? Severity::kCollision
               : Severity::kEgoFaultExcluded;
  }
  if (outcome.min_obstacle_distance < config.near_threshold) {
    return Severity::kNearCollision;
  }
  return Severity::kNone;
}

bool ShouldEnqueue(const NoveltyReport& novelty) {
  return novelty.new_count > 0;
}

std::string HitObject(const TestCase& tc, const CrashEvent& crash) {
  const std::string& other =
      crash.party_a == kEgoId ? crash.party_b : crash.party_a;
  for (const NpcAgent& npc : tc.dynamic_config.npcs) {
    if (npc.agent_id == other) return std::string(AgentKindName(npc.kind));
  }
  return other;
}

CampaignRecorder::CampaignRecorder(Method method, const DrivingArea& area,
                                   const CampaignConfig& config)
    : config_(config) {
  report_.method = method;
  report_.grid = CoverageGrid::FromArea(area, config.block_size);
}

const IterationRecord& CampaignRecorder::Record(const TestCase& tc,
                                                const SimOutcome& outcome,
                                                NoveltyReport* novelty_out) {
  CoverageGrid& grid = *report_.grid;
  const std::vector<BlockIndex> blocks =
      BlocksOfTrajectory(outcome.trajectory, grid);
  NoveltyReport novelty = grid.Update(blocks);

  IterationRecord r;
  r.method = std::string(MethodName(report_.method));
  r.iteration = report_.records.size() + 1;
  r.case_id = tc.case_id;
  r.parent_id = tc.lineage.parent_id.value_or("");
  r.strategy = tc.lineage.strategy.value_or("");
  r.new_blocks = novelty.new_count;
  r.total_blocks = novelty.total_after;
  r.severity = ClassifyOutcome(outcome, config_);
  r.min_distance = outcome.min_obstacle_distance;
  if (outcome.HasCrash()) {
    const CrashEvent& crash = outcome.crashes.front();
    r.hit_speed_kmh = crash.relative_speed_kmh;
    r.hit_object = HitObject(tc, crash);
    r.rule = outcome.verdicts.front().rule;
  }
  report_.records.push_back(r);
  report_.cases.push_back(tc);
  ++report_.simulations;
  if (IsRisky(r.severity)) {
    report_.risky.push_back({tc, outcome, r.severity, r.iteration});
  }
  if (novelty_out != nullptr) *novelty_out = std::move(novelty);
  return report_.records.back();
}

std::vector<SimOutcome> SimulateBatch(Simulator& simulator,
                                      std::span<const TestCase> cases,
                                      const CampaignConfig& config,
                                      size_t first_iteration) {
  std::vector<SimOutcome> outcomes(cases.size());
  std::vector<std::exception_ptr> errors(cases.size());
  auto run_one = [&](size_t i) {
    try {
      outcomes[i] = simulator.Run(cases[i], config.horizon);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const size_t workers = std::min(config.jobs, cases.size());
  if (workers > 1 && simulator.ThreadSafe()) {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < cases.size(); i = next++) run_one(i);
      });
    }
    for (std::thread& t : pool) t.join();
  } else {
    for (size_t i = 0; i < cases.size(); ++i) {
      run_one(i);
      if (errors[i]) break;
    }
  }
  for (size_t i = 0; i < cases.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw CampaignError(first_iteration + i, e.what());
    }
  }
  return outcomes;
}

namespace {

void SeedRandomly(SeedQueue& queue, const StaticConfig& scene,
                  const CampaignConfig& config, Rng& rng) {
  for (size_t i = 0; i < config.initial_seed_count; ++i) {
    TestCase tc = RandomTestCase(scene, config.random_scene, rng,
                                 HexId("s-", rng.NextU64(), 12));
    queue.Push(std::move(tc), 0);
  }
}

}  // namespace

CampaignReport RunCampaign(const StaticConfig& scene,
                           const CampaignConfig& config, Simulator& simulator) {
  config.Check();
  Rng rng(config.master_seed);
  CampaignRecorder recorder(Method::kAsf, scene.driving_area, config);
  SeedQueue queue;
  if (config.initial_seeds.empty()) {
    SeedRandomly(queue, scene, config, rng);
  } else {
    for (const TestCase& tc : config.initial_seeds) queue.Push(tc, 0);
  }

  size_t barren = 0;
  while (recorder.iterations() < config.iteration_budget) {
    if (queue.empty()) {
      recorder.CountRestart();
      SeedRandomly(queue, scene, config, rng);
    }
    const QueueEntry parent = *queue.Pop();
    Rng batch_rng(rng.NextU64());
    MutationBatch batch;
    try {
      batch = Mutate(parent.test_case, config.mutation, batch_rng);
    } catch (const NoApplicableTarget&) {
    }
    if (batch.cases.empty()) {
      if (++barren > 10000) {
        throw CampaignError(recorder.iterations() + 1,
                            "mutation keeps producing empty batches");
      }
      continue;
    }
    barren = 0;
    const size_t take = std::min(batch.cases.size(),
                                 config.iteration_budget - recorder.iterations());
    const std::span<const TestCase> run(batch.cases.data(), take);
    const std::vector<SimOutcome> outcomes =
        SimulateBatch(simulator, run, config, recorder.iterations() + 1);
    for (size_t i = 0; i < take; ++i) {
      NoveltyReport novelty;
      recorder.Record(run[i], outcomes[i], &novelty);
      if (ShouldEnqueue(novelty)) {
        recorder.last().enqueued =
            queue.Push(run[i], static_cast<int64_t>(novelty.new_count));
      }
    }
  }
  return recorder.Finish();
}

}  // namespace scenefuzz
