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

#include "scenefuzz/seed_queue.h"

#include <algorithm>

namespace scenefuzz {
namespace {

// std heap functions build a max-heap under "less"; an entry is "less" when
// it should leave later.
bool LeavesLater(const QueueEntry& a, const QueueEntry& b) {
  if (a.priority != b.priority) return a.priority < b.priority;
  return a.insertion_index > b.insertion_index;
}

}  // namespace

bool SeedQueue::Push(TestCase test_case, int64_t priority) {
  if (!ids_.insert(test_case.case_id).second) return false;
  heap_.push_back({std::move(test_case), priority, next_index_++});
  std::push_heap(heap_.begin(), heap_.end(), LeavesLater);
  return true;
}

std::optional<QueueEntry> SeedQueue::Pop() {
  if (heap_.empty()) return std::nullopt;
  std::pop_heap(heap_.begin(), heap_.end(), LeavesLater);
  QueueEntry top = std::move(heap_.back());
  heap_.pop_back();
  ids_.erase(top.test_case.case_id);
  return top;
}

}  // namespace scenefuzz
