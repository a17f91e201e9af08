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

#ifndef BINMUT_REPORT_HPP
#define BINMUT_REPORT_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "binmut/harness.hpp"
#include "binmut/mutagen.hpp"

namespace binmut {

class UnknownMutantIdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MutationScore {
  size_t sampled = 0;
  size_t killed = 0;
  size_t passed = 0;
  size_t trivial = 0;

  // killed / sampled; undefined when nothing was sampled.
  std::optional<double> raw_score() const;
  // killed / (killed + passed); trivial mutants drop out of the base.
  std::optional<double> adjusted_score() const;

  bool operator==(const MutationScore&) const = default;
};

// Percentage num/den, half-even rounded to one decimal place, e.g. "56.4".
// Exact integer arithmetic so ties break identically on every platform.
std::optional<std::string> format_pct(uint64_t numerator, uint64_t denominator);

// Reporting category: the operator class, except that skip mutants form
// their own fifth bucket.
std::string category_of(const MutantRecord& record);
inline constexpr std::array<const char*, 5> kCategories = {
    "arithmetic", "logical", "conditional", "constant", "skip"};

struct CategoryRow {
  std::string category;
  size_t sampled = 0;
  size_t killed = 0;
  size_t passed = 0;
  size_t trivial = 0;

  bool operator==(const CategoryRow&) const = default;
};

struct RunReport {
  std::string binary_name;
  std::string input_set;
  MutationScore score;
  std::vector<CategoryRow> breakdown;  // one row per category, fixed order

  bool operator==(const RunReport&) const = default;
};

// Tallies verdicts into the three outcome buckets. Throws on a verdict
// whose kind/reason combination is inconsistent.
MutationScore score(const std::vector<VerdictRecord>& verdicts);

// Per-category tallies. Every verdict must reference a sampled mutant id;
// otherwise UnknownMutantIdError.
std::vector<CategoryRow> breakdown(const std::vector<MutantRecord>& sampled,
                                   const std::vector<VerdictRecord>& verdicts);

RunReport make_report(const std::string& binary_name, const std::string& input_set,
                      const std::vector<MutantRecord>& sampled,
                      const std::vector<VerdictRecord>& verdicts);

enum class ReportFormat { Csv, Json, Svg };

// Writes score.csv / breakdown.csv, score.json, and one bar chart per run
// into out_dir, according to the format set. Returns the files written.
std::vector<std::filesystem::path> emit_report(
    const std::vector<RunReport>& runs, const std::filesystem::path& out_dir,
    const std::set<ReportFormat>& formats);

}  // namespace binmut

#endif  // BINMUT_REPORT_HPP
