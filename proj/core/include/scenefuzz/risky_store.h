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

#ifndef SCENEFUZZ_CORE_RISKY_STORE_H_
#define SCENEFUZZ_CORE_RISKY_STORE_H_

// On-disk store of risky cases:
//
//   <root>/index.csv
//   <root>/<severity>/<iteration>_<case_id>/case.scene.json
//   <root>/<severity>/<iteration>_<case_id>/outcome.json
//
// outcome.json is SerializeOutcome of the stored outcome, so replaying
// case.scene.json reproduces it byte for byte.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scenefuzz/campaign.h"

namespace scenefuzz {

inline constexpr std::string_view kIndexHeader =
    "iteration,case_id,severity,rule,min_distance_m,hit_speed_kmh,hit_object,"
    "path";

class StorageFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IndexRow {
  size_t iteration = 0;
  std::string case_id;
  std::string severity;
  std::string rule;
  std::string min_distance_m;
  std::string hit_speed_kmh;
  std::string hit_object;
  std::string path;  // relative to the store root
};

// Rule reported for a stored case: the first verdict clearing the ego, else
// the first verdict; empty without a crash.
std::string StoredRule(const SimOutcome& outcome);

// Stores `risky` under `root` and returns its directory. Storing a case_id
// that the index already lists is a no-op returning the existing directory.
// Throws StorageFailure on I/O errors or when the severity is not risky.
std::filesystem::path StoreRisky(const RiskyCase& risky,
                                 const std::filesystem::path& root);

// Rows of <root>/index.csv; empty when the store does not exist yet.
std::vector<IndexRow> ReadIndex(const std::filesystem::path& root);

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_RISKY_STORE_H_
