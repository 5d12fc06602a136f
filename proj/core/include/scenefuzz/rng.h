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

#ifndef SCENEFUZZ_CORE_RNG_H_
#define SCENEFUZZ_CORE_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace scenefuzz {

// Deterministic PRNG used everywhere a campaign draws randomness.
//
// The standard distributions are implementation-defined, so all draws are
// derived here from the raw 64-bit engine output. Results are therefore
// reproducible across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1).
  double Uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi]; returns lo when the range is empty.
  double Uniform(double lo, double hi) {
    if (!(hi > lo)) return lo;
    return lo + (hi - lo) * Uniform01();
  }

  // Uniform integer in [0, n). n must be positive.
  size_t Below(size_t n);

  // Uniform integer in [lo, hi].
  int64_t IntIn(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(Below(static_cast<size_t>(hi - lo) + 1));
  }

  bool Bernoulli(double p) { return Uniform01() < p; }

  // Index drawn proportionally to non-negative `weights`. Returns
  // weights.size() when every weight is zero.
  size_t Weighted(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

// `prefix` followed by the low `digits` hex digits of `value`.
std::string HexId(std::string_view prefix, uint64_t value, int digits);

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_RNG_H_
