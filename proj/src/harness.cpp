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

#include "binmut/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "binmut/bytes.hpp"
#include "binmut/subprocess.hpp"

namespace binmut {

namespace {

using ordered_json = nlohmann::ordered_json;

// Cap for baseline runs of the original binary; anything slower is a
// harness configuration problem, not a mutation result.
constexpr double kBaselineTimeoutSeconds = 60.0;

std::string substitute_bin(const std::string& arg, const std::string& bin) {
  std::string out;
  size_t pos = 0;
  for (;;) {
    size_t hit = arg.find("{bin}", pos);
    if (hit == std::string::npos) {
      out.append(arg, pos, std::string::npos);
      return out;
    }
    out.append(arg, pos, hit - pos);
    out.append(bin);
    pos = hit + 5;
  }
}

std::string normalize_whitespace(const std::string& text) {
  std::string out;
  bool in_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

uint64_t output_digest(const std::filesystem::path& file, CompareMode mode) {
  std::string text = read_file_text(file);
  if (mode == CompareMode::NormalizedWhitespace) text = normalize_whitespace(text);
  return fnv1a64(text);
}

uint64_t golden_digest(const TestCase& test) {
  std::string text = test.expected_stdout
                         ? *test.expected_stdout
                         : read_file_text(*test.expected_stdout_file);
  if (test.compare == CompareMode::NormalizedWhitespace) {
    text = normalize_whitespace(text);
  }
  return fnv1a64(text);
}

RunRequest make_request(const CommandSpec& cmd, const std::string& bin,
                        const std::filesystem::path& stdout_file,
                        const std::filesystem::path& scratch_dir,
                        double timeout_seconds,
                        const TestManifest& manifest) {
  RunRequest req;
  for (const std::string& arg : cmd.argv) req.argv.push_back(substitute_bin(arg, bin));
  req.stdin_file = cmd.stdin_file;
  req.stdout_file = stdout_file;
  req.cwd = cmd.cwd ? *cmd.cwd : scratch_dir;
  req.timeout_seconds = timeout_seconds;
  if (manifest.address_space_limit_mb) {
    req.address_space_limit_bytes = *manifest.address_space_limit_mb << 20;
  }
  return req;
}

std::optional<std::filesystem::path> parse_optional_path(
    const ordered_json& j, const char* key, const std::filesystem::path& base_dir) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  std::filesystem::path p = j.at(key).get<std::string>();
  if (p.is_relative()) p = base_dir / p;
  return p;
}

CommandSpec parse_command(const ordered_json& j,
                          const std::filesystem::path& base_dir) {
  CommandSpec cmd;
  cmd.argv = j.at("argv").get<std::vector<std::string>>();
  cmd.stdin_file = parse_optional_path(j, "stdin_file", base_dir);
  cmd.cwd = parse_optional_path(j, "cwd", base_dir);
  return cmd;
}

ordered_json command_to_json(const CommandSpec& cmd) {
  ordered_json j;
  j["argv"] = cmd.argv;
  if (cmd.stdin_file) j["stdin_file"] = cmd.stdin_file->string();
  if (cmd.cwd) j["cwd"] = cmd.cwd->string();
  return j;
}

void validate(const TestManifest& m) {
  if (m.input_set_name.empty()) {
    throw ManifestValidationError("input_set_name must not be empty");
  }
  if (m.timeout_factor < 1.0) {
    throw ManifestValidationError("timeout_factor must be at least 1");
  }
  if (m.health.argv.empty()) {
    throw ManifestValidationError("health command must have a non-empty argv");
  }
  if (m.tests.empty()) {
    throw ManifestValidationError("manifest defines no tests");
  }
  std::set<std::string> names;
  for (const TestCase& t : m.tests) {
    if (t.name.empty()) throw ManifestValidationError("test with empty name");
    if (!names.insert(t.name).second) {
      throw ManifestValidationError("duplicate test name: " + t.name);
    }
    if (t.command.argv.empty()) {
      throw ManifestValidationError(t.name + ": empty argv");
    }
    if (t.expected_stdout.has_value() == t.expected_stdout_file.has_value()) {
      throw ManifestValidationError(
          t.name + ": exactly one of expected_stdout / expected_stdout_file required");
    }
    if (t.expected_stdout_file &&
        !std::filesystem::exists(*t.expected_stdout_file)) {
      throw ManifestValidationError(t.name + ": golden file missing: " +
                                    t.expected_stdout_file->string());
    }
    if (t.command.stdin_file && !std::filesystem::exists(*t.command.stdin_file)) {
      throw ManifestValidationError(t.name + ": stdin file missing: " +
                                    t.command.stdin_file->string());
    }
  }
}

}  // namespace

double BaselineProfile::timeout_for(double baseline_runtime, double factor) const {
  return std::max(factor * baseline_runtime, 1.0);
}

std::string_view verdict_kind_name(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Passed: return "passed";
    case VerdictKind::Killed: return "killed";
    case VerdictKind::Trivial: return "trivial";
  }
  return "passed";
}

std::string_view verdict_reason_name(VerdictReason reason) {
  switch (reason) {
    case VerdictReason::None: return "none";
    case VerdictReason::OutputMismatch: return "output-mismatch";
    case VerdictReason::ExitMismatch: return "exit-mismatch";
    case VerdictReason::Timeout: return "timeout";
    case VerdictReason::CrashDuringTest: return "crash-during-test";
    case VerdictReason::HealthCrash: return "health-crash";
    case VerdictReason::HealthMismatch: return "health-mismatch";
    case VerdictReason::ExecFailure: return "exec-failure";
  }
  return "none";
}

std::optional<VerdictKind> verdict_kind_from_name(std::string_view name) {
  for (int i = 0; i <= int(VerdictKind::Trivial); ++i) {
    if (verdict_kind_name(VerdictKind(i)) == name) return VerdictKind(i);
  }
  return std::nullopt;
}

std::optional<VerdictReason> verdict_reason_from_name(std::string_view name) {
  for (int i = 0; i <= int(VerdictReason::ExecFailure); ++i) {
    if (verdict_reason_name(VerdictReason(i)) == name) return VerdictReason(i);
  }
  return std::nullopt;
}

TestManifest parse_manifest(const std::string& text,
                            const std::filesystem::path& base_dir) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ManifestParseError(std::string("manifest is not valid JSON: ") + e.what());
  }

  TestManifest m;
  try {
    if (j.contains("input_set_name")) {
      m.input_set_name = j.at("input_set_name").get<std::string>();
    }
    if (j.contains("timeout_factor")) {
      m.timeout_factor = j.at("timeout_factor").get<double>();
    }
    if (j.contains("address_space_limit_mb") && !j.at("address_space_limit_mb").is_null()) {
      m.address_space_limit_mb = j.at("address_space_limit_mb").get<uint64_t>();
    }
    m.health = parse_command(j.at("health"), base_dir);
    for (const ordered_json& jt : j.at("tests")) {
      TestCase t;
      t.name = jt.at("name").get<std::string>();
      t.command = parse_command(jt.at("command"), base_dir);
      if (jt.contains("expected_stdout") && !jt.at("expected_stdout").is_null()) {
        t.expected_stdout = jt.at("expected_stdout").get<std::string>();
      }
      t.expected_stdout_file =
          parse_optional_path(jt, "expected_stdout_file", base_dir);
      if (jt.contains("expected_exit") && !jt.at("expected_exit").is_null()) {
        t.expected_exit = jt.at("expected_exit").get<int>();
      }
      if (jt.contains("compare")) {
        std::string mode = jt.at("compare").get<std::string>();
        if (mode == "exact") {
          t.compare = CompareMode::Exact;
        } else if (mode == "normalized-whitespace") {
          t.compare = CompareMode::NormalizedWhitespace;
        } else {
          throw ManifestValidationError("unknown compare mode: " + mode);
        }
      }
      m.tests.push_back(std::move(t));
    }
  } catch (const ManifestValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ManifestParseError(std::string("manifest structure invalid: ") + e.what());
  }

  validate(m);
  return m;
}

TestManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file_text(path),
                        std::filesystem::absolute(path).parent_path());
}

std::string serialize_manifest(const TestManifest& m) {
  ordered_json j;
  j["input_set_name"] = m.input_set_name;
  j["timeout_factor"] = m.timeout_factor;
  if (m.address_space_limit_mb) j["address_space_limit_mb"] = *m.address_space_limit_mb;
  j["health"] = command_to_json(m.health);
  j["tests"] = ordered_json::array();
  for (const TestCase& t : m.tests) {
    ordered_json jt;
    jt["name"] = t.name;
    jt["command"] = command_to_json(t.command);
    if (t.expected_stdout) jt["expected_stdout"] = *t.expected_stdout;
    if (t.expected_stdout_file) {
      jt["expected_stdout_file"] = t.expected_stdout_file->string();
    }
    if (t.expected_exit) jt["expected_exit"] = *t.expected_exit;
    jt["compare"] = t.compare == CompareMode::Exact ? "exact" : "normalized-whitespace";
    j["tests"].push_back(std::move(jt));
  }
  return j.dump(2) + "\n";
}

BaselineProfile baseline(const TestManifest& manifest,
                         const std::filesystem::path& original,
                         const std::filesystem::path& scratch_dir) {
  std::filesystem::create_directories(scratch_dir);
  std::string bin = std::filesystem::absolute(original).string();
  BaselineProfile profile;

  auto out_file = scratch_dir / "baseline-health.out";
  RunRequest req = make_request(manifest.health, bin, out_file, scratch_dir,
                                kBaselineTimeoutSeconds, manifest);
  RunResult res = run_process(req);
  if (res.outcome != RunOutcome::Exited) {
    throw BaselineFailureError("health command failed on the original binary");
  }
  profile.health.runtime_seconds = res.wall_seconds;
  profile.health.exit_code = res.exit_code;
  profile.health.output_digest = output_digest(out_file, CompareMode::Exact);

  for (size_t i = 0; i < manifest.tests.size(); ++i) {
    const TestCase& t = manifest.tests[i];
    auto test_out = scratch_dir / ("baseline-" + std::to_string(i) + ".out");
    req = make_request(t.command, bin, test_out, scratch_dir,
                       kBaselineTimeoutSeconds, manifest);
    res = run_process(req);
    if (res.outcome != RunOutcome::Exited) {
      throw BaselineFailureError(t.name + ": original binary did not run to completion");
    }
    if (t.expected_exit && res.exit_code != *t.expected_exit) {
      throw BaselineFailureError(t.name + ": original exit code " +
                                 std::to_string(res.exit_code) + " != expected " +
                                 std::to_string(*t.expected_exit));
    }
    uint64_t got = output_digest(test_out, t.compare);
    if (got != golden_digest(t)) {
      throw BaselineFailureError(t.name + ": original output does not match the golden");
    }
    profile.per_test.push_back({res.wall_seconds, got, res.exit_code});
  }
  return profile;
}

std::optional<Verdict> health_check(const std::filesystem::path& mutant,
                                    const TestManifest& manifest,
                                    const BaselineProfile& profile,
                                    const std::filesystem::path& scratch_dir,
                                    double* wall_seconds) {
  std::filesystem::create_directories(scratch_dir);
  std::string bin = std::filesystem::absolute(mutant).string();
  auto out_file = scratch_dir / "health.out";
  double timeout = profile.timeout_for(profile.health.runtime_seconds,
                                       manifest.timeout_factor);
  RunRequest req = make_request(manifest.health, bin, out_file, scratch_dir,
                                timeout, manifest);
  RunResult res = run_process(req);
  if (wall_seconds) *wall_seconds = res.wall_seconds;

  switch (res.outcome) {
    case RunOutcome::ExecFailed:
      return Verdict{VerdictKind::Trivial, VerdictReason::ExecFailure, "health"};
    case RunOutcome::Signaled:
      return Verdict{VerdictKind::Trivial, VerdictReason::HealthCrash, "health"};
    case RunOutcome::TimedOut:
      return Verdict{VerdictKind::Trivial, VerdictReason::HealthMismatch, "health"};
    case RunOutcome::Exited:
      break;
  }
  if (res.exit_code != profile.health.exit_code ||
      output_digest(out_file, CompareMode::Exact) != profile.health.output_digest) {
    return Verdict{VerdictKind::Trivial, VerdictReason::HealthMismatch, "health"};
  }
  return std::nullopt;
}

Verdict run_tests(const std::filesystem::path& mutant, const TestManifest& manifest,
                  const BaselineProfile& profile,
                  const std::filesystem::path& scratch_dir,
                  std::map<std::string, double>* wall_times) {
  std::filesystem::create_directories(scratch_dir);
  std::string bin = std::filesystem::absolute(mutant).string();

  for (size_t i = 0; i < manifest.tests.size(); ++i) {
    const TestCase& t = manifest.tests[i];
    const BaselineProfile::Entry& ref = profile.per_test.at(i);
    auto out_file = scratch_dir / ("test-" + std::to_string(i) + ".out");
    double timeout = profile.timeout_for(ref.runtime_seconds, manifest.timeout_factor);
    RunRequest req = make_request(t.command, bin, out_file, scratch_dir,
                                  timeout, manifest);
    RunResult res = run_process(req);
    if (wall_times) (*wall_times)[t.name] = res.wall_seconds;

    switch (res.outcome) {
      case RunOutcome::ExecFailed:
        return {VerdictKind::Trivial, VerdictReason::ExecFailure, t.name};
      case RunOutcome::TimedOut:
        return {VerdictKind::Killed, VerdictReason::Timeout, t.name};
      case RunOutcome::Signaled:
        return {VerdictKind::Killed, VerdictReason::CrashDuringTest, t.name};
      case RunOutcome::Exited:
        break;
    }
    if (output_digest(out_file, t.compare) != ref.output_digest) {
      return {VerdictKind::Killed, VerdictReason::OutputMismatch, t.name};
    }
    int expected_exit = t.expected_exit ? *t.expected_exit : ref.exit_code;
    if (res.exit_code != expected_exit) {
      return {VerdictKind::Killed, VerdictReason::ExitMismatch, t.name};
    }
  }
  return {VerdictKind::Passed, VerdictReason::None, ""};
}

Verdict evaluate_one(const std::filesystem::path& mutant,
                     const TestManifest& manifest, const BaselineProfile& profile,
                     const std::filesystem::path& scratch_dir,
                     std::map<std::string, double>* wall_times) {
  double health_wall = 0;
  auto gate = health_check(mutant, manifest, profile, scratch_dir, &health_wall);
  if (wall_times) (*wall_times)["health"] = health_wall;
  if (gate) return *gate;
  return run_tests(mutant, manifest, profile, scratch_dir, wall_times);
}

std::vector<VerdictRecord> evaluate_all(
    const std::vector<std::pair<uint32_t, std::filesystem::path>>& mutants,
    const TestManifest& manifest, const BaselineProfile& profile,
    const std::filesystem::path& work_dir, unsigned workers) {
  std::filesystem::create_directories(work_dir);
  std::vector<VerdictRecord> results(mutants.size());
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= mutants.size()) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      const auto& [id, path] = mutants[i];
      auto scratch = work_dir / ("m" + std::to_string(id));
      try {
        VerdictRecord rec;
        rec.mutant_id = id;
        rec.verdict = evaluate_one(path, manifest, profile, scratch, &rec.wall_times);
        results[i] = std::move(rec);
        std::error_code ec;
        std::filesystem::remove_all(scratch, ec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  unsigned count = std::max(1u, workers);
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

void write_verdicts(const std::vector<VerdictRecord>& records,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (const VerdictRecord& rec : records) {
    ordered_json j;
    j["mutant_id"] = rec.mutant_id;
    j["verdict"] = verdict_kind_name(rec.verdict.kind);
    if (rec.verdict.reason != VerdictReason::None) {
      j["reason"] = verdict_reason_name(rec.verdict.reason);
    }
    if (!rec.verdict.test.empty()) j["test"] = rec.verdict.test;
    out << j.dump() << "\n";
  }
}

void write_timings(const std::vector<VerdictRecord>& records,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (const VerdictRecord& rec : records) {
    ordered_json j;
    j["mutant_id"] = rec.mutant_id;
    j["wall_times"] = ordered_json::object();
    for (const auto& [name, secs] : rec.wall_times) j["wall_times"][name] = secs;
    out << j.dump() << "\n";
  }
}

std::vector<VerdictRecord> read_verdicts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<VerdictRecord> records;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": bad JSON: " + e.what());
    }
    VerdictRecord rec;
    rec.mutant_id = j.at("mutant_id").get<uint32_t>();
    auto kind = verdict_kind_from_name(j.at("verdict").get<std::string>());
    if (!kind) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": unknown verdict");
    }
    rec.verdict.kind = *kind;
    if (j.contains("reason")) {
      auto reason = verdict_reason_from_name(j.at("reason").get<std::string>());
      if (!reason) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": unknown reason");
      }
      rec.verdict.reason = *reason;
    }
    if (j.contains("test")) rec.verdict.test = j.at("test").get<std::string>();
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace binmut
