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

#ifndef BINMUT_HARNESS_HPP
#define BINMUT_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace binmut {

class ManifestParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ManifestValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BaselineFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One command line; "{bin}" in argv expands to the binary under test.
struct CommandSpec {
  std::vector<std::string> argv;
  std::optional<std::filesystem::path> stdin_file;
  std::optional<std::filesystem::path> cwd;

  bool operator==(const CommandSpec&) const = default;
};

enum class CompareMode { Exact, NormalizedWhitespace };

struct TestCase {
  std::string name;
  CommandSpec command;
  std::optional<std::string> expected_stdout;              // inline golden
  std::optional<std::filesystem::path> expected_stdout_file;  // file golden
  std::optional<int> expected_exit;  // unchecked when absent
  CompareMode compare = CompareMode::Exact;

  bool operator==(const TestCase&) const = default;
};

struct TestManifest {
  std::string input_set_name = "default";
  double timeout_factor = 2.0;
  std::optional<uint64_t> address_space_limit_mb;
  CommandSpec health;
  std::vector<TestCase> tests;

  bool operator==(const TestManifest&) const = default;
};

// Original-binary measurements the verdicts are judged against.
struct BaselineProfile {
  struct Entry {
    double runtime_seconds = 0;
    uint64_t output_digest = 0;
    int exit_code = 0;
  };
  Entry health;
  std::vector<Entry> per_test;  // index-aligned with TestManifest::tests

  // max(timeout_factor * baseline runtime, 1.0): a floor keeps very fast
  // baselines from producing sub-scheduler-quantum timeouts.
  double timeout_for(double baseline_runtime, double factor) const;
};

enum class VerdictKind { Passed, Killed, Trivial };

enum class VerdictReason {
  None,             // Passed
  OutputMismatch,   // Killed
  ExitMismatch,     // Killed
  Timeout,          // Killed
  CrashDuringTest,  // Killed
  HealthCrash,      // Trivial
  HealthMismatch,   // Trivial
  ExecFailure,      // Trivial
};

struct Verdict {
  VerdictKind kind = VerdictKind::Passed;
  VerdictReason reason = VerdictReason::None;
  std::string test;  // first diverging test, empty otherwise

  bool operator==(const Verdict&) const = default;
};

struct VerdictRecord {
  uint32_t mutant_id = 0;
  Verdict verdict;
  std::map<std::string, double> wall_times;  // by test name, plus "health"

  bool operator==(const VerdictRecord&) const = default;
};

std::string_view verdict_kind_name(VerdictKind kind);
std::string_view verdict_reason_name(VerdictReason reason);
std::optional<VerdictKind> verdict_kind_from_name(std::string_view name);
std::optional<VerdictReason> verdict_reason_from_name(std::string_view name);

// Manifest I/O. Relative paths inside the manifest resolve against
// base_dir (for load_manifest, the manifest's own directory).
TestManifest parse_manifest(const std::string& text,
                            const std::filesystem::path& base_dir);
TestManifest load_manifest(const std::filesystem::path& path);
std::string serialize_manifest(const TestManifest& manifest);

// Runs the original binary through health and every test, recording
// runtimes and golden digests. Throws BaselineFailureError when the
// original crashes, times out against the manifest goldens, or mismatches
// an expected output.
BaselineProfile baseline(const TestManifest& manifest,
                         const std::filesystem::path& original,
                         const std::filesystem::path& scratch_dir);

// Health gate: nullopt when the mutant is healthy enough to test, or the
// Trivial verdict that disqualifies it.
std::optional<Verdict> health_check(const std::filesystem::path& mutant,
                                    const TestManifest& manifest,
                                    const BaselineProfile& profile,
                                    const std::filesystem::path& scratch_dir,
                                    double* wall_seconds = nullptr);

// Runs tests in manifest order, stopping at the first divergence.
Verdict run_tests(const std::filesystem::path& mutant, const TestManifest& manifest,
                  const BaselineProfile& profile,
                  const std::filesystem::path& scratch_dir,
                  std::map<std::string, double>* wall_times = nullptr);

// health_check then run_tests, as one verdict.
Verdict evaluate_one(const std::filesystem::path& mutant,
                     const TestManifest& manifest, const BaselineProfile& profile,
                     const std::filesystem::path& scratch_dir,
                     std::map<std::string, double>* wall_times = nullptr);

// Evaluates many mutants across a worker pool. Results come back indexed
// like the input, independent of scheduling order.
std::vector<VerdictRecord> evaluate_all(
    const std::vector<std::pair<uint32_t, std::filesystem::path>>& mutants,
    const TestManifest& manifest, const BaselineProfile& profile,
    const std::filesystem::path& work_dir, unsigned workers);

// JSONL serialization. Verdict files carry only deterministic fields;
// wall times go in a separate timings file.
void write_verdicts(const std::vector<VerdictRecord>& records,
                    const std::filesystem::path& path);
void write_timings(const std::vector<VerdictRecord>& records,
                   const std::filesystem::path& path);
std::vector<VerdictRecord> read_verdicts(const std::filesystem::path& path);

}  // namespace binmut

#endif  // BINMUT_HARNESS_HPP
