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

#ifndef SCENEFUZZ_CORE_BASELINES_H_
#define SCENEFUZZ_CORE_BASELINES_H_

// Comparison fuzzers sharing the campaign report format: a feedback-free
// random fuzzer and a genetic fuzzer minimizing the ego's safety gap.

#include <vector>

#include "scenefuzz/campaign.h"
#include "scenefuzz/rng.h"
#include "scenefuzz/scenario.h"
#include "scenefuzz/sim_interface.h"

namespace scenefuzz {

// Every iteration simulates a fresh random dynamic configuration.
CampaignReport RunRandomCampaign(const StaticConfig& scene,
                                 const CampaignConfig& config,
                                 Simulator& simulator);

struct FitnessRecord {
  TestCase test_case;
  double fitness = kDistanceCap;  // min obstacle distance, lower is riskier
  size_t generation = 0;
};

// Population-based search. Each generation keeps the ceil(P/2) fittest and
// refills the population with crossover children, each mutated once. After
// `patience` generations improving the best fitness by less than
// min_improvement, the population is redrawn at random except for the best
// individual found so far. Stops after exactly iteration_budget simulations.
CampaignReport RunGeneticCampaign(const StaticConfig& scene,
                                  const CampaignConfig& config,
                                  Simulator& simulator);

// One-point crossover of the NPC lists: a prefix of `a`'s NPCs followed by a
// suffix of `b`'s, the suffix shortened from its front to stay within
// max_npcs. Everything else comes from `a`.
// Ids of `b`'s NPCs that clash with the prefix get a suffix.
TestCase Crossover(const TestCase& a, const TestCase& b, size_t max_npcs,
                   Rng& rng);

// Best fitness found so far at the start of every generation, and the
// generations at which the population was redrawn.
struct GeneticTrace {
  std::vector<double> best_per_generation;
  std::vector<size_t> restart_generations;
};
CampaignReport RunGeneticCampaign(const StaticConfig& scene,
                                  const CampaignConfig& config,
                                  Simulator& simulator, GeneticTrace* trace);

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_BASELINES_H_
