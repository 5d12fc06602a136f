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

#ifndef SCENEFUZZ_TOOLS_CLI_H_
#define SCENEFUZZ_TOOLS_CLI_H_

#include <ostream>

namespace scenefuzz::cli {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCollision = 2;  // fuzz found a collision case

// Entry point of the scenefuzz tool: subcommands fuzz, replay, compare,
// mutate, validate and serve. Human-readable output goes to `out`,
// diagnostics to `err`.
int Main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err);

}  // namespace scenefuzz::cli

#endif  // SCENEFUZZ_TOOLS_CLI_H_
