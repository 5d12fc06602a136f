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

#ifndef SCENEFUZZ_CORE_REPORT_IO_H_
#define SCENEFUZZ_CORE_REPORT_IO_H_

// Campaign artifacts on disk: report.csv, grid.pgm, and the comparison
// outputs (coverage curves as CSV and SVG, risky-case summary table).

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scenefuzz/campaign.h"
#include "scenefuzz/coverage_grid.h"

namespace scenefuzz {

inline constexpr std::string_view kReportHeader =
    "method,iteration,case_id,parent_id,strategy,new_blocks,total_blocks,"
    "severity,min_distance_m,hit_speed_kmh,hit_object";

class ReportFormatError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One line per record after the header. Distances are printed with 3
// decimals and hit speeds with 2; hit_speed_kmh is empty without a crash.
std::string FormatReportCsv(const std::vector<IterationRecord>& records);
// Inverse of FormatReportCsv up to the printed precision. Throws
// ReportFormatError naming the line on any malformed input.
std::vector<IterationRecord> ParseReportCsv(std::string_view text);

// Plain PGM (P2), one pixel per block, north up: covered blocks are 255.
std::string FormatGridPgm(const CoverageGrid& grid);

struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<int> pixels;  // row-major, top row first
};
PgmImage ParseGridPgm(std::string_view text);

// Cumulative coverage after each iteration of one report.
struct CoverageCurve {
  std::string method;
  std::vector<size_t> total_blocks;
};

// Throws ReportFormatError when the reports are empty, of unequal length, or
// a report mixes methods.
std::vector<CoverageCurve> CurvesFromReports(
    const std::vector<std::vector<IterationRecord>>& reports);

// "iteration,<method>,<method>..." with one row per iteration.
std::string FormatCurvesCsv(const std::vector<CoverageCurve>& curves);
// Self-contained SVG line chart of the curves.
std::string RenderCurvesSvg(const std::vector<CoverageCurve>& curves);

// Markdown table of the risky cases of every report (severity, min distance,
// hit speed, hit object), then per-method counts.
std::string FormatRiskySummary(
    const std::vector<std::vector<IterationRecord>>& reports);

std::string ReadFile(const std::string& path);
// Writes to `path`.tmp, then renames over `path`.
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace scenefuzz

#endif  // SCENEFUZZ_CORE_REPORT_IO_H_
