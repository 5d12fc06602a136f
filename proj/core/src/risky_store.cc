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

#include "scenefuzz/risky_store.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "scenefuzz/report_io.h"

namespace scenefuzz {

namespace fs = std::filesystem;

namespace {

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

// Case ids and kind names never hold commas; anything else is replaced so the
// index stays a plain CSV.
std::string Sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = '_';
  }
  return s;
}

}  // namespace

std::string StoredRule(const SimOutcome& outcome) {
  for (const LiabilityVerdict& v : outcome.verdicts) {
    if (!v.ego_at_fault) return v.rule;
  }
  return outcome.verdicts.empty() ? "" : outcome.verdicts.front().rule;
}

std::vector<IndexRow> ReadIndex(const fs::path& root) {
  std::vector<IndexRow> rows;
  const fs::path index = root / "index.csv";
  std::error_code ec;
  if (!fs::exists(index, ec)) return rows;
  std::ifstream in(index);
  if (!in) throw StorageFailure("cannot read " + index.string());
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kIndexHeader) {
        throw StorageFailure(index.string() + " has an unexpected header");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 8) {
      throw StorageFailure(index.string() + ":" + std::to_string(line_no) +
                           ": expected 8 fields");
    }
    IndexRow row;
    try {
      row.iteration = std::stoul(f[0]);
    } catch (const std::exception&) {
      throw StorageFailure(index.string() + ":" + std::to_string(line_no) +
                           ": bad iteration");
    }
    row.case_id = f[1];
    row.severity = f[2];
    row.rule = f[3];
    row.min_distance_m = f[4];
    row.hit_speed_kmh = f[5];
    row.hit_object = f[6];
    row.path = f[7];
    rows.push_back(std::move(row));
  }
  return rows;
}

fs::path StoreRisky(const RiskyCase& risky, const fs::path& root) {
  if (!IsRisky(risky.severity)) {
    throw StorageFailure("case " + risky.test_case.case_id +
                         " has no risky severity");
  }
  const std::string case_id = Sanitize(risky.test_case.case_id);
  for (const IndexRow& row : ReadIndex(root)) {
    if (row.case_id == case_id) return root / row.path;
  }

  const fs::path relative = fs::path(std::string(SeverityName(risky.severity))) /
                            (std::to_string(risky.iteration) + "_" + case_id);
  const fs::path dir = root / relative;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw StorageFailure("cannot create " + dir.string() + ": " + ec.message());
  }
  try {
    WriteFile((dir / "case.scene.json").string(),
              SerializeTestCase(risky.test_case));
    WriteFile((dir / "outcome.json").string(), SerializeOutcome(risky.outcome));
  } catch (const std::exception& e) {
    throw StorageFailure(e.what());
  }

  const fs::path index = root / "index.csv";
  const bool fresh = !fs::exists(index, ec);
  std::ofstream out(index, std::ios::app);
  if (!out) throw StorageFailure("cannot append to " + index.string());
  if (fresh) out << kIndexHeader << '\n';
  const SimOutcome& o = risky.outcome;
  std::string hit_speed, hit_object;
  if (o.HasCrash()) {
    hit_speed = Fixed(o.crashes.front().relative_speed_kmh, 2);
    hit_object = Sanitize(HitObject(risky.test_case, o.crashes.front()));
  }
  out << risky.iteration << ',' << case_id << ','
      << SeverityName(risky.severity) << ',' << StoredRule(o) << ','
      << Fixed(o.min_obstacle_distance, 3) << ',' << hit_speed << ','
      << hit_object << ',' << relative.generic_string() << '\n';
  out.flush();
  if (!out) throw StorageFailure("cannot append to " + index.string());
  return dir;
}

}  // namespace scenefuzz
