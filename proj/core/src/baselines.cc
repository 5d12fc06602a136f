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

#include "scenefuzz/baselines.h"

#include <algorithm>
#include <optional>
#include <set>

#include "scenefuzz/mutation.h"
#include "scenefuzz/random_scene.h"

namespace scenefuzz {
namespace {

std::vector<TestCase> FreshCases(const StaticConfig& scene,
                                 const CampaignConfig& config, Rng& rng,
                                 size_t count, std::string_view prefix) {
  std::vector<TestCase> out;
  for (size_t i = 0; i < count; ++i) {
    out.push_back(RandomTestCase(scene, config.random_scene, rng,
                                 HexId(prefix, rng.NextU64(), 12)));
  }
  return out;
}

}  // namespace

CampaignReport RunRandomCampaign(const StaticConfig& scene,
                                 const CampaignConfig& config,
                                 Simulator& simulator) {
  config.Check();
  Rng rng(config.master_seed);
  CampaignRecorder recorder(Method::kRandom, scene.driving_area, config);
  const size_t chunk = std::max<size_t>(config.jobs, 1);
  while (recorder.iterations() < config.iteration_budget) {
    const size_t n =
        std::min(chunk, config.iteration_budget - recorder.iterations());
    const std::vector<TestCase> cases = FreshCases(scene, config, rng, n, "r-");
    const std::vector<SimOutcome> outcomes =
        SimulateBatch(simulator, cases, config, recorder.iterations() + 1);
    for (size_t i = 0; i < n; ++i) recorder.Record(cases[i], outcomes[i]);
  }
  return recorder.Finish();
}

TestCase Crossover(const TestCase& a, const TestCase& b, size_t max_npcs,
                   Rng& rng) {
  const auto& na = a.dynamic_config.npcs;
  const auto& nb = b.dynamic_config.npcs;
  const size_t cut_a = std::min(rng.Below(na.size() + 1), max_npcs);
  size_t cut_b = rng.Below(nb.size() + 1);
  // Over the cap, the suffix starts later so it stays a suffix of `b`.
  cut_b = std::max(cut_b, nb.size() - std::min(nb.size(), max_npcs - cut_a));
  TestCase child = a;
  auto& out = child.dynamic_config.npcs;
  out.assign(na.begin(), na.begin() + static_cast<ptrdiff_t>(cut_a));
  std::set<std::string> ids;
  for (const NpcAgent& n : out) ids.insert(n.agent_id);
  for (size_t i = cut_b; i < nb.size(); ++i) {
    NpcAgent n = nb[i];
    const std::string base = n.agent_id;
    for (int k = 1; ids.count(n.agent_id) != 0; ++k) {
      n.agent_id = base + "-x" + std::to_string(k);
    }
    ids.insert(n.agent_id);
    out.push_back(std::move(n));
  }
  return child;
}

namespace {

std::optional<TestCase> MakeChild(const TestCase& a, const TestCase& b,
                                  const CampaignConfig& config, Rng& rng) {
  const MutationConfig& mc = config.mutation;
  for (int attempt = 0; attempt < 10; ++attempt) {
    TestCase child = Crossover(a, b, mc.max_npcs, rng);
    const MutationStrategy strategy = rng.Bernoulli(0.5)
                                          ? MutationStrategy::kArithmetic
                                          : MutationStrategy::kRandom;
    const std::vector<MutationTarget> targets =
        ApplicableTargets(child, strategy, mc);
    if (targets.empty()) continue;
    const MutationTarget& target = targets[rng.Below(targets.size())];
    try {
      if (strategy == MutationStrategy::kArithmetic) {
        child = ArithmeticStep(child, target, rng.Bernoulli(0.5) ? 1 : -1, mc);
      } else {
        child = RandomReplace(child, target, mc, rng);
      }
    } catch (const MutationError&) {
      continue;
    }
    child.case_id = HexId("g-", rng.NextU64(), 12);
    child.lineage.parent_id = a.case_id;
    child.lineage.strategy = "crossover+" + std::string(StrategyName(strategy));
    child.lineage.generation = a.lineage.generation + 1;
    if (Validate(child).ok()) return child;
  }
  return std::nullopt;
}

}  // namespace

CampaignReport RunGeneticCampaign(const StaticConfig& scene,
                                  const CampaignConfig& config,
                                  Simulator& simulator) {
  return RunGeneticCampaign(scene, config, simulator, nullptr);
}

CampaignReport RunGeneticCampaign(const StaticConfig& scene,
                                  const CampaignConfig& config,
                                  Simulator& simulator, GeneticTrace* trace) {
  config.Check();
  Rng rng(config.master_seed);
  CampaignRecorder recorder(Method::kGenetic, scene.driving_area, config);
  const size_t pop_size = config.genetic.population;
  const size_t keep = (pop_size + 1) / 2;
  std::optional<FitnessRecord> best;
  size_t generation = 0;

  auto evaluate = [&](std::vector<TestCase> cases) {
    const size_t room = config.iteration_budget - recorder.iterations();
    if (cases.size() > room) cases.resize(room);
    const std::vector<SimOutcome> outcomes =
        SimulateBatch(simulator, cases, config, recorder.iterations() + 1);
    std::vector<FitnessRecord> scored;
    for (size_t i = 0; i < cases.size(); ++i) {
      recorder.Record(cases[i], outcomes[i]);
      FitnessRecord r{cases[i], outcomes[i].min_obstacle_distance, generation};
      if (!best || r.fitness < best->fitness) best = r;
      scored.push_back(std::move(r));
    }
    return scored;
  };

  std::vector<FitnessRecord> population =
      evaluate(FreshCases(scene, config, rng, pop_size, "g-"));
  double reference = best ? best->fitness : kDistanceCap;
  size_t stall = 0;
  while (recorder.iterations() < config.iteration_budget) {
    if (trace != nullptr) trace->best_per_generation.push_back(best->fitness);
    std::stable_sort(population.begin(), population.end(),
                     [](const FitnessRecord& x, const FitnessRecord& y) {
                       return x.fitness < y.fitness;
                     });
    population.resize(std::min(keep, population.size()));
    std::vector<TestCase> children;
    while (population.size() + children.size() < pop_size) {
      const TestCase& a = population[rng.Below(population.size())].test_case;
      const TestCase& b = population[rng.Below(population.size())].test_case;
      if (std::optional<TestCase> c = MakeChild(a, b, config, rng)) {
        children.push_back(std::move(*c));
      } else {
        children.push_back(FreshCases(scene, config, rng, 1, "g-").front());
      }
    }
    ++generation;
    for (FitnessRecord& r : evaluate(std::move(children))) {
      population.push_back(std::move(r));
    }
    if (reference - best->fitness < config.genetic.min_improvement) {
      ++stall;
    } else {
      stall = 0;
      reference = best->fitness;
    }
    if (stall >= config.genetic.patience &&
        recorder.iterations() < config.iteration_budget) {
      recorder.CountRestart();
      if (trace != nullptr) trace->restart_generations.push_back(generation);
      population = {*best};
      for (FitnessRecord& r :
           evaluate(FreshCases(scene, config, rng, pop_size - 1, "g-"))) {
        population.push_back(std::move(r));
      }
      stall = 0;
      reference = best->fitness;
    }
  }
  return recorder.Finish();
}

}  // namespace scenefuzz
