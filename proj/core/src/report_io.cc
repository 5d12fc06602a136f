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

#include "scenefuzz/report_io.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace scenefuzz {

namespace {

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

void AppendField(std::string& out, std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

std::vector<std::string> SplitCsvLine(std::string_view line, size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c != '"') {
        fields.back() += c;
      } else if (i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else {
        quoted = false;
      }
    } else if (c == '"' && fields.back().empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) {
    throw ReportFormatError("line " + std::to_string(line_no) +
                           ": unterminated quote");
  }
  return fields;
}

template <typename T>
T ParseNumber(const std::string& field, size_t line_no, const char* column) {
  T value{};
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ReportFormatError("line " + std::to_string(line_no) + ": bad " +
                            column + " '" + field + "'");
  }
  return value;
}

std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

}  // namespace

std::string FormatReportCsv(const std::vector<IterationRecord>& records) {
  std::string out(kReportHeader);
  out += '\n';
  for (const IterationRecord& r : records) {
    AppendField(out, r.method);
    out += ',' + std::to_string(r.iteration) + ',';
    AppendField(out, r.case_id);
    out += ',';
    AppendField(out, r.parent_id);
    out += ',';
    AppendField(out, r.strategy);
    out += ',' + std::to_string(r.new_blocks) + ',' +
           std::to_string(r.total_blocks) + ',';
    out += SeverityName(r.severity);
    out += ',' + Fixed(r.min_distance, 3) + ',';
    if (r.hit_speed_kmh) out += Fixed(*r.hit_speed_kmh, 2);
    out += ',';
    AppendField(out, r.hit_object);
    out += '\n';
  }
  return out;
}

std::vector<IterationRecord> ParseReportCsv(std::string_view text) {
  const std::vector<std::string_view> lines = Lines(text);
  if (lines.empty() || lines[0] != kReportHeader) {
    throw ReportFormatError("line 1: not a report.csv header");
  }
  std::vector<IterationRecord> records;
  for (size_t i = 1; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (lines[i].empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(lines[i], line_no);
    if (f.size() != 11) {
      throw ReportFormatError("line " + std::to_string(line_no) + ": expected " +
                              "11 fields, got " + std::to_string(f.size()));
    }
    IterationRecord r;
    r.method = f[0];
    r.iteration = ParseNumber<size_t>(f[1], line_no, "iteration");
    r.case_id = f[2];
    r.parent_id = f[3];
    r.strategy = f[4];
    r.new_blocks = ParseNumber<size_t>(f[5], line_no, "new_blocks");
    r.total_blocks = ParseNumber<size_t>(f[6], line_no, "total_blocks");
    const std::optional<Severity> severity = SeverityFromName(f[7]);
    if (!severity) {
      throw ReportFormatError("line " + std::to_string(line_no) +
                              ": bad severity '" + f[7] + "'");
    }
    r.severity = *severity;
    r.min_distance = ParseNumber<double>(f[8], line_no, "min_distance_m");
    if (!f[9].empty()) {
      r.hit_speed_kmh = ParseNumber<double>(f[9], line_no, "hit_speed_kmh");
    }
    r.hit_object = f[10];
    records.push_back(std::move(r));
  }
  return records;
}

std::string FormatGridPgm(const CoverageGrid& grid) {
  std::string out = "P2\n" + std::to_string(grid.cols()) + " " +
                    std::to_string(grid.rows()) + "\n255\n";
  for (int row = grid.rows() - 1; row >= 0; --row) {
    for (int col = 0; col < grid.cols(); ++col) {
      if (col > 0) out += ' ';
      out += grid.IsCovered(grid.Index(col, row)) ? "255" : "0";
    }
    out += '\n';
  }
  return out;
}

PgmImage ParseGridPgm(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic;
  int max_value = 0;
  PgmImage image;
  if (!(in >> magic >> image.width >> image.height >> max_value) ||
      magic != "P2" || image.width <= 0 || image.height <= 0 ||
      max_value <= 0) {
    throw ReportFormatError("not a plain PGM image");
  }
  const size_t n = static_cast<size_t>(image.width) * image.height;
  image.pixels.reserve(n);
  int v;
  while (image.pixels.size() < n && in >> v) {
    if (v < 0 || v > max_value) throw ReportFormatError("PGM value out of range");
    image.pixels.push_back(v);
  }
  if (image.pixels.size() != n) throw ReportFormatError("PGM is truncated");
  return image;
}

std::vector<CoverageCurve> CurvesFromReports(
    const std::vector<std::vector<IterationRecord>>& reports) {
  if (reports.empty()) throw ReportFormatError("no reports");
  std::vector<CoverageCurve> curves;
  for (const std::vector<IterationRecord>& report : reports) {
    if (report.empty()) throw ReportFormatError("report has no records");
    if (report.size() != reports.front().size()) {
      throw ReportFormatError(
          "reports have different budgets (" +
          std::to_string(reports.front().size()) + " vs " +
          std::to_string(report.size()) + " iterations)");
    }
    CoverageCurve curve;
    curve.method = report.front().method;
    for (const IterationRecord& r : report) {
      if (r.method != curve.method) {
        throw ReportFormatError("report mixes methods " + curve.method +
                                " and " + r.method);
      }
      curve.total_blocks.push_back(r.total_blocks);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::string FormatCurvesCsv(const std::vector<CoverageCurve>& curves) {
  std::string out = "iteration";
  for (const CoverageCurve& c : curves) {
    out += ',';
    AppendField(out, c.method);
  }
  out += '\n';
  const size_t n = curves.empty() ? 0 : curves.front().total_blocks.size();
  for (size_t i = 0; i < n; ++i) {
    out += std::to_string(i + 1);
    for (const CoverageCurve& c : curves) {
      out += ',' + std::to_string(c.total_blocks.at(i));
    }
    out += '\n';
  }
  return out;
}

std::string RenderCurvesSvg(const std::vector<CoverageCurve>& curves) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 60, kRight = 20, kTop = 20, kBottom = 50;
  constexpr const char* kColors[] = {"#d62728", "#1f77b4", "#2ca02c",
                                     "#ff7f0e", "#9467bd", "#8c564b"};
  size_t n = 1, top = 1;
  for (const CoverageCurve& c : curves) {
    n = std::max(n, c.total_blocks.size());
    for (size_t v : c.total_blocks) top = std::max(top, v);
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_of = [&](size_t i) {
    return kLeft + (n == 1 ? 0.0 : plot_w * static_cast<double>(i) / (n - 1));
  };
  auto y_of = [&](size_t v) {
    return kTop + plot_h * (1.0 - static_cast<double>(v) / top);
  };

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" "
                "height=\"%g\" font-family=\"sans-serif\" font-size=\"12\">\n",
                kWidth, kHeight);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<path d=\"M%.1f %.1f V%.1f H%.1f\" stroke=\"black\" "
                "fill=\"none\"/>\n",
                kLeft, kTop, kTop + plot_h, kLeft + plot_w);
  out += buf;
  for (int k = 0; k <= 4; ++k) {
    const size_t v = top * k / 4;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%zu</text>\n",
                  kLeft - 6, y_of(v) + 4, v);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">1</text>\n"
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%zu</text>\n"
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">"
                "iteration</text>\n",
                x_of(0), kTop + plot_h + 16, x_of(n - 1), kTop + plot_h + 16, n,
                kLeft + plot_w / 2, kHeight - 10);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "<text transform=\"translate(14 %.1f) rotate(-90)\" "
                "text-anchor=\"middle\">covered blocks</text>\n",
                kTop + plot_h / 2);
  out += buf;
  for (size_t c = 0; c < curves.size(); ++c) {
    const char* color = kColors[c % std::size(kColors)];
    out += "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"";
    out += color;
    out += "\" points=\"";
    for (size_t i = 0; i < curves[c].total_blocks.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.1f,%.1f", i ? " " : "", x_of(i),
                    y_of(curves[c].total_blocks[i]));
      out += buf;
    }
    out += "\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">%s</text>\n",
                  kLeft + 10, kTop + 14 + 16.0 * c, color,
                  curves[c].method.c_str());
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

std::string FormatRiskySummary(
    const std::vector<std::vector<IterationRecord>>& reports) {
  std::string out =
      "| method | iteration | case_id | severity | min distance (m) | "
      "hit speed (km/h) | hit object |\n"
      "|---|---|---|---|---|---|---|\n";
  std::string counts = "\n| method | collisions | near collisions |\n"
                       "|---|---|---|\n";
  for (const std::vector<IterationRecord>& report : reports) {
    size_t collisions = 0, near = 0;
    for (const IterationRecord& r : report) {
      if (!IsRisky(r.severity)) continue;
      (r.severity == Severity::kCollision ? collisions : near)++;
      out += "| " + r.method + " | " + std::to_string(r.iteration) + " | " +
             r.case_id + " | " + std::string(SeverityName(r.severity)) + " | " +
             Fixed(r.min_distance, 2) + " | " +
             (r.hit_speed_kmh ? Fixed(*r.hit_speed_kmh, 2) : "-") + " | " +
             (r.hit_object.empty() ? "-" : r.hit_object) + " |\n";
    }
    const std::string method = report.empty() ? "?" : report.front().method;
    counts += "| " + method + " | " + std::to_string(collisions) + " | " +
              std::to_string(near) + " |\n";
  }
  return out + counts;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("cannot write " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot write " + path + ": " + ec.message());
}

}  // namespace scenefuzz
