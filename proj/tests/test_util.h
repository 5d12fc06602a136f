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


#ifndef SCENEFUZZ_TESTS_TEST_UTIL_H_
#define SCENEFUZZ_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <filesystem>
#include <string>

#include "scenefuzz/scenario.h"

namespace scenefuzz::testing {

inline std::string FixturePath(const std::string& name) {
  return std::string(SCENEFUZZ_FIXTURE_DIR) + "/" + name;
}

inline std::string DemoScenePath() {
  return std::string(SCENEFUZZ_SCENE_DIR) + "/demo.scene.json";
}

inline TestCase LoadFixture(const std::string& name) {
  return LoadTestCase(FixturePath(name + ".scene.json"));
}

inline TestCase DemoCase() { return LoadTestCase(DemoScenePath()); }

// Bounds of the demo scene's driving area.
inline constexpr DrivingArea kDemoArea{553029.90, 4181687.30, 553153.89,
                                       4181749.28};

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("scenefuzz_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace scenefuzz::testing

#endif  // SCENEFUZZ_TESTS_TEST_UTIL_H_
