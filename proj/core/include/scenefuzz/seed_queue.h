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

#ifndef SCENEFUZZ_CORE_SEED_QUEUE_H_
#define SCENEFUZZ_CORE_SEED_QUEUE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "scenefuzz/scenario.h"

namespace scenefuzz {

struct QueueEntry {
  TestCase test_case;
  int64_t priority = 0;
  uint64_t insertion_index = 0;
};

// Max-priority queue of seeds; equal priorities leave in insertion order.
// A case id is held at most once at a time.
class SeedQueue {
 public:
  // Returns false, leaving the queue unchanged, if a case with the same id is
  // already queued.
  bool Push(TestCase test_case, int64_t priority);
  std::optional<QueueEntry> Pop();

  size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }
  bool Contains(const std::string& case_id) const {
    return ids_.count(case_id) != 0;
  }

 private:
  std::vector<QueueEntry> heap_;
  std::unordered_set<std::string> ids_;
  uint64_t next_index_ = 0;
};

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_SEED_QUEUE_H_
