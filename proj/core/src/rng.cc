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

#include "scenefuzz/rng.h"

#include <cinttypes>
#include <cstdio>
#include <limits>

namespace scenefuzz {

size_t Rng::Below(size_t n) {
  // Rejection sampling keeps the draw unbiased.
  const uint64_t bound = static_cast<uint64_t>(n);
  const uint64_t limit =
      std::numeric_limits<uint64_t>::max() -
      std::numeric_limits<uint64_t>::max() % bound;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<size_t>(x % bound);
}

size_t Rng::Weighted(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w > 0.0 ? w : 0.0;
  if (!(total > 0.0)) return weights.size();
  double r = Uniform01() * total;
  size_t last_positive = weights.size();
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) continue;
    last_positive = i;
    if (r < weights[i]) return i;
    r -= weights[i];
  }
  return last_positive;
}

std::string HexId(std::string_view prefix, uint64_t value, int digits) {
  char buf[32];
  const uint64_t mask =
      digits >= 16 ? ~uint64_t{0} : (uint64_t{1} << (4 * digits)) - 1;
  std::snprintf(buf, sizeof(buf), "%0*" PRIx64, digits, value & mask);
  return std::string(prefix) + buf;
}

}  // namespace scenefuzz
