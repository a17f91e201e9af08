// Copyright 2026 The binmut Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "binmut/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace binmut {

namespace {

using ordered_json = nlohmann::ordered_json;

bool reason_matches_kind(VerdictKind kind, VerdictReason reason) {
  switch (kind) {
    case VerdictKind::Passed:
      return reason == VerdictReason::None;
    case VerdictKind::Killed:
      return reason == VerdictReason::OutputMismatch ||
             reason == VerdictReason::ExitMismatch ||
             reason == VerdictReason::Timeout ||
             reason == VerdictReason::CrashDuringTest;
    case VerdictKind::Trivial:
      return reason == VerdictReason::HealthCrash ||
             reason == VerdictReason::HealthMismatch ||
             reason == VerdictReason::ExecFailure;
  }
  return false;
}

std::string pct_or(const std::optional<std::string>& pct, const char* fallback) {
  return pct ? *pct : fallback;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

std::string svg_chart(const RunReport& run) {
  // Stacked bars, one per category: killed / passed / trivial.
  constexpr int kWidth = 640;
  constexpr int kHeight = 400;
  constexpr int kMarginLeft = 56;
  constexpr int kMarginBottom = 48;
  constexpr int kMarginTop = 48;
  constexpr int kBarGap = 24;

  size_t max_count = 1;
  for (const CategoryRow& row : run.breakdown) {
    max_count = std::max(max_count, row.killed + row.passed + row.trivial);
  }
  int plot_h = kHeight - kMarginTop - kMarginBottom;
  int plot_w = kWidth - kMarginLeft - 16;
  int n = int(run.breakdown.size());
  int bar_w = n > 0 ? (plot_w - kBarGap * (n + 1)) / n : 0;

  char buf[512];
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
         "viewBox=\"0 0 640 400\">\n";
  std::snprintf(buf, sizeof(buf),
                "  <text x=\"%d\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
                "%s / %s: mutants by category and outcome</text>\n",
                kMarginLeft, run.binary_name.c_str(), run.input_set.c_str());
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "  <line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#333\"/>\n",
                kMarginLeft, kHeight - kMarginBottom, kWidth - 16,
                kHeight - kMarginBottom);
  svg += buf;

  struct Slice {
    const char* color;
    size_t count;
  };
  for (int i = 0; i < n; ++i) {
    const CategoryRow& row = run.breakdown[i];
    int x = kMarginLeft + kBarGap + i * (bar_w + kBarGap);
    int y = kHeight - kMarginBottom;
    Slice slices[3] = {{"#c0392b", row.killed},
                       {"#27ae60", row.passed},
                       {"#95a5a6", row.trivial}};
    for (const Slice& s : slices) {
      if (s.count == 0) continue;
      int h = int(double(s.count) / double(max_count) * plot_h);
      h = std::max(h, 1);
      y -= h;
      std::snprintf(buf, sizeof(buf),
                    "  <rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                    "fill=\"%s\"/>\n",
                    x, y, bar_w, h, s.color);
      svg += buf;
    }
    size_t total = row.killed + row.passed + row.trivial;
    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
                  "font-size=\"12\" text-anchor=\"middle\">%zu</text>\n",
                  x + bar_w / 2, y - 6, total);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
                  "font-size=\"12\" text-anchor=\"middle\">%s</text>\n",
                  x + bar_w / 2, kHeight - kMarginBottom + 18, row.category.c_str());
    svg += buf;
  }

  const char* legend[3][2] = {{"#c0392b", "killed"},
                              {"#27ae60", "passed"},
                              {"#95a5a6", "trivial"}};
  for (int i = 0; i < 3; ++i) {
    int x = kMarginLeft + i * 110;
    std::snprintf(buf, sizeof(buf),
                  "  <rect x=\"%d\" y=\"%d\" width=\"12\" height=\"12\" fill=\"%s\"/>\n"
                  "  <text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" "
                  "font-size=\"12\">%s</text>\n",
                  x, kHeight - 20, legend[i][0], x + 16, kHeight - 10, legend[i][1]);
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

std::optional<double> MutationScore::raw_score() const {
  if (sampled == 0) return std::nullopt;
  return double(killed) / double(sampled);
}

std::optional<double> MutationScore::adjusted_score() const {
  if (killed + passed == 0) return std::nullopt;
  return double(killed) / double(killed + passed);
}

std::optional<std::string> format_pct(uint64_t numerator, uint64_t denominator) {
  if (denominator == 0) return std::nullopt;
  // Percentage in tenths: numerator * 1000 / denominator, half-even.
  uint64_t scaled = numerator * 1000;
  uint64_t q = scaled / denominator;
  uint64_t r = scaled % denominator;
  if (2 * r > denominator || (2 * r == denominator && (q & 1))) ++q;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%llu.%llu",
                static_cast<unsigned long long>(q / 10),
                static_cast<unsigned long long>(q % 10));
  return std::string(buf);
}

std::string category_of(const MutantRecord& record) {
  if (record.variant == MutationVariant::Skip) return "skip";
  return std::string(class_name(record.cls));
}

MutationScore score(const std::vector<VerdictRecord>& verdicts) {
  MutationScore s;
  s.sampled = verdicts.size();
  for (const VerdictRecord& rec : verdicts) {
    if (!reason_matches_kind(rec.verdict.kind, rec.verdict.reason)) {
      throw std::runtime_error("verdict for mutant " +
                               std::to_string(rec.mutant_id) +
                               " has an inconsistent reason");
    }
    switch (rec.verdict.kind) {
      case VerdictKind::Passed: ++s.passed; break;
      case VerdictKind::Killed: ++s.killed; break;
      case VerdictKind::Trivial: ++s.trivial; break;
    }
  }
  return s;
}

std::vector<CategoryRow> breakdown(const std::vector<MutantRecord>& sampled,
                                   const std::vector<VerdictRecord>& verdicts) {
  std::unordered_map<uint32_t, const MutantRecord*> by_id;
  for (const MutantRecord& rec : sampled) by_id[rec.mutant_id] = &rec;

  std::vector<CategoryRow> rows;
  for (const char* name : kCategories) rows.push_back({name, 0, 0, 0, 0});
  auto row_of = [&rows](const std::string& category) -> CategoryRow& {
    for (CategoryRow& row : rows) {
      if (row.category == category) return row;
    }
    throw std::logic_error("unknown category " + category);
  };

  for (const MutantRecord& rec : sampled) ++row_of(category_of(rec)).sampled;
  for (const VerdictRecord& v : verdicts) {
    auto it = by_id.find(v.mutant_id);
    if (it == by_id.end()) {
      throw UnknownMutantIdError("verdict references unsampled mutant id " +
                                 std::to_string(v.mutant_id));
    }
    CategoryRow& row = row_of(category_of(*it->second));
    switch (v.verdict.kind) {
      case VerdictKind::Passed: ++row.passed; break;
      case VerdictKind::Killed: ++row.killed; break;
      case VerdictKind::Trivial: ++row.trivial; break;
    }
  }
  return rows;
}

RunReport make_report(const std::string& binary_name, const std::string& input_set,
                      const std::vector<MutantRecord>& sampled,
                      const std::vector<VerdictRecord>& verdicts) {
  RunReport run;
  run.binary_name = binary_name;
  run.input_set = input_set;
  run.score = score(verdicts);
  run.breakdown = breakdown(sampled, verdicts);
  return run;
}

std::vector<std::filesystem::path> emit_report(
    const std::vector<RunReport>& runs, const std::filesystem::path& out_dir,
    const std::set<ReportFormat>& formats) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  if (formats.count(ReportFormat::Csv)) {
    std::string score_csv =
        "binary,input_set,sampled,killed,passed,trivial,raw_score_pct,"
        "adjusted_score_pct\n";
    std::string breakdown_csv =
        "binary,input_set,category,sampled,killed,passed,trivial\n";
    for (const RunReport& run : runs) {
      const MutationScore& s = run.score;
      std::ostringstream line;
      line << run.binary_name << "," << run.input_set << "," << s.sampled << ","
           << s.killed << "," << s.passed << "," << s.trivial << ","
           << pct_or(format_pct(s.killed, s.sampled), "undefined") << ","
           << pct_or(format_pct(s.killed, s.killed + s.passed), "undefined")
           << "\n";
      score_csv += line.str();
      for (const CategoryRow& row : run.breakdown) {
        std::ostringstream bl;
        bl << run.binary_name << "," << run.input_set << "," << row.category
           << "," << row.sampled << "," << row.killed << "," << row.passed
           << "," << row.trivial << "\n";
        breakdown_csv += bl.str();
      }
    }
    auto score_path = out_dir / "score.csv";
    auto breakdown_path = out_dir / "breakdown.csv";
    write_text(score_path, score_csv);
    write_text(breakdown_path, breakdown_csv);
    written.push_back(score_path);
    written.push_back(breakdown_path);
  }

  if (formats.count(ReportFormat::Json)) {
    ordered_json doc = ordered_json::array();
    for (const RunReport& run : runs) {
      const MutationScore& s = run.score;
      ordered_json j;
      j["binary"] = run.binary_name;
      j["input_set"] = run.input_set;
      j["sampled"] = s.sampled;
      j["killed"] = s.killed;
      j["passed"] = s.passed;
      j["trivial"] = s.trivial;
      auto raw = format_pct(s.killed, s.sampled);
      auto adjusted = format_pct(s.killed, s.killed + s.passed);
      j["raw_score_pct"] = raw ? ordered_json(std::stod(*raw)) : ordered_json(nullptr);
      j["adjusted_score_pct"] =
          adjusted ? ordered_json(std::stod(*adjusted)) : ordered_json(nullptr);
      j["breakdown"] = ordered_json::array();
      for (const CategoryRow& row : run.breakdown) {
        ordered_json jr;
        jr["category"] = row.category;
        jr["sampled"] = row.sampled;
        jr["killed"] = row.killed;
        jr["passed"] = row.passed;
        jr["trivial"] = row.trivial;
        j["breakdown"].push_back(std::move(jr));
      }
      doc.push_back(std::move(j));
    }
    auto json_path = out_dir / "score.json";
    write_text(json_path, doc.dump(2) + "\n");
    written.push_back(json_path);
  }

  if (formats.count(ReportFormat::Svg)) {
    for (const RunReport& run : runs) {
      auto svg_path = out_dir / ("chart-" + run.input_set + ".svg");
      write_text(svg_path, svg_chart(run));
      written.push_back(svg_path);
    }
  }
  return written;
}

}  // namespace binmut
