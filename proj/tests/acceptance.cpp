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

// Acceptance gate: eleven end-to-end checks against the bundled corpus,
// one pass/fail line each. Budgets and tolerances are pinned here, next
// to the checks that use them.

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "binmut/bytes.hpp"
#include "binmut/elf_image.hpp"
#include "binmut/forge.hpp"
#include "binmut/harness.hpp"
#include "binmut/insn.hpp"
#include "binmut/mutagen.hpp"
#include "binmut/report.hpp"
#include "support/oracle.hpp"
#include "support/testutil.hpp"

using namespace binmut;
using namespace binmut::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Budgets, pinned.
constexpr double kDecodeOracleBudgetSeconds = 30.0;
constexpr double kTimeoutKillBudgetSeconds = 10.0;
constexpr double kEndToEndBudgetSeconds = 600.0;
constexpr double kDensityLow = 0.15;
constexpr double kDensityHigh = 0.60;

const char* const kCorpusBinaries[] = {
    "abs-O0",       "abs-O1",       "abs-O2",      "countdown-O0",
    "countdown-O1", "countdown-O2", "checksum-O0", "checksum-O1",
    "checksum-O2",  "primes-O0",    "primes-O1",   "primes-O2",
    "matmul-O0",    "matmul-O1",    "matmul-O2",   "stats-O0",
    "stats-O1",     "stats-O2",     "strkit-O0",   "strkit-O1",
    "strkit-O2",
};

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool condition, const std::string& detail) {
  if (!condition) throw CheckFailure(detail);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1fs", s);
  return buf;
}

// Runs the command-line tool; throws on a nonzero exit.
std::string cli(const std::string& args) {
  return run_capture(cli_path().string() + " " + args + " 2>/dev/null");
}

std::vector<uint8_t> slurp(const fs::path& path) { return read_file_bytes(path); }

void expect_same_bytes(const fs::path& a, const fs::path& b) {
  expect(fs::exists(a), "missing file: " + a.string());
  expect(fs::exists(b), "missing file: " + b.string());
  expect(slurp(a) == slurp(b),
         "files differ: " + a.string() + " vs " + b.string());
}

// Absolute target of a relative branch, straight from the encoded bytes.
// Legacy prefixes are skipped; `vaddr` addresses the first byte.
uint64_t branch_target(uint64_t vaddr, std::span<const uint8_t> raw) {
  size_t i = 0;
  auto is_prefix = [](uint8_t b) {
    switch (b) {
      case 0x26: case 0x2e: case 0x36: case 0x3e:
      case 0x64: case 0x65: case 0x66: case 0x67:
      case 0xf0: case 0xf2: case 0xf3:
        return true;
      default:
        return false;
    }
  };
  while (i < raw.size() && is_prefix(raw[i])) ++i;
  expect(i < raw.size(), "branch bytes are all prefixes");
  uint8_t op = raw[i];
  if (op == 0xeb || (op >= 0x70 && op <= 0x7f)) {
    expect(i + 2 <= raw.size(), "truncated rel8 branch");
    int8_t rel = int8_t(raw[i + 1]);
    return vaddr + i + 2 + uint64_t(int64_t(rel));
  }
  if (op == 0xe9 || (op == 0x0f && i + 1 < raw.size() && (raw[i + 1] & 0xf0) == 0x80)) {
    size_t disp_at = op == 0xe9 ? i + 1 : i + 2;
    expect(disp_at + 4 <= raw.size(), "truncated rel32 branch");
    int32_t rel = int32_t(uint32_t(raw[disp_at]) | uint32_t(raw[disp_at + 1]) << 8 |
                          uint32_t(raw[disp_at + 2]) << 16 |
                          uint32_t(raw[disp_at + 3]) << 24);
    return vaddr + disp_at + 4 + uint64_t(int64_t(rel));
  }
  throw CheckFailure("not a relative branch opcode");
}

FunctionSymbol symbol_named(const LoadedBinary& binary, const std::string& name) {
  for (const FunctionSymbol& sym : binary.symbols) {
    if (sym.name == name) return sym;
  }
  throw CheckFailure("symbol not found: " + name);
}

std::vector<MutationSite> sites_in(const LoadedBinary& binary,
                                   const std::string& symbol) {
  FunctionSymbol sym = symbol_named(binary, symbol);
  std::vector<MutationSite> hits;
  for (const MutationSite& site : enumerate_sites(binary)) {
    if (site.vaddr >= sym.vaddr && site.vaddr < sym.vaddr + sym.size) {
      hits.push_back(site);
    }
  }
  return hits;
}

fs::path emit_variant(const LoadedBinary& binary, const MutationSite& site,
                      MutationVariant variant, std::optional<Op> target,
                      uint32_t id, const fs::path& out_dir) {
  for (const MutationOperator& op : candidates_for(site)) {
    if (op.variant != variant) continue;
    if (target && op.target != target) continue;
    return emit_mutant(binary, to_record(instantiate(site, op, id)), out_dir);
  }
  throw CheckFailure("no matching mutation candidate at the site");
}

MutationSite abs_sign_branch(const LoadedBinary& binary) {
  std::vector<MutationSite> jccs;
  for (const MutationSite& site : sites_in(binary, "iabs")) {
    if (site.insn.kind == InstKind::Jcc8) jccs.push_back(site);
  }
  expect(jccs.size() == 1, "expected exactly one conditional branch in iabs");
  return jccs.front();
}

MutationSite countdown_decrement(const LoadedBinary& binary) {
  std::vector<MutationSite> subs;
  for (const MutationSite& site : sites_in(binary, "burn")) {
    if (site.insn.op == Op::Sub) subs.push_back(site);
  }
  expect(subs.size() == 1, "expected exactly one SUB in burn");
  return subs.front();
}

// --- criterion bodies -------------------------------------------------

// 1: linear-sweep decode of every function region matches objdump lengths.
std::string check_decoder_oracle() {
  auto start = Clock::now();
  size_t instructions = 0;
  for (const char* name : kCorpusBinaries) {
    fs::path path = corpus_binary(name);
    LoadedBinary binary = load_binary(path);
    std::map<uint64_t, RefInsn> oracle = objdump_elf(path);
    for (const CodeRegion& region : code_regions(binary)) {
      uint64_t vaddr = region.vaddr;
      uint64_t end = region.vaddr + region.length;
      size_t offset = size_t(region.file_offset);
      while (vaddr < end) {
        std::span<const uint8_t> window(binary.image.data() + offset,
                                        size_t(end - vaddr));
        Instruction insn = decode(window, vaddr);  // throws on garbage
        auto it = oracle.find(vaddr);
        expect(it != oracle.end(),
               std::string(name) + ": objdump has no instruction at " +
                   to_hex(insn.raw()));
        expect(it->second.length == insn.length,
               std::string(name) + ": length mismatch at vaddr " +
                   std::to_string(vaddr) + " (" + to_hex(insn.raw()) + ")");
        ++instructions;
        vaddr += insn.length;
        offset += insn.length;
      }
    }
  }
  double elapsed = seconds_since(start);
  expect(instructions > 5000, "suspiciously small sweep: " +
                                  std::to_string(instructions) + " instructions");
  expect(elapsed < kDecodeOracleBudgetSeconds,
         "oracle sweep took " + format_seconds(elapsed));
  return std::to_string(instructions) + " instructions, 0 mismatches, " +
         format_seconds(elapsed);
}

// 2: every enumerated mutant is length-exact, different, re-decodable,
// and force-take rewrites preserve the absolute branch target.
std::string check_replacement_soundness() {
  size_t mutants = 0;
  size_t force_takes = 0;
  for (const char* name : kCorpusBinaries) {
    LoadedBinary binary = load_binary(corpus_binary(name));
    for (const Mutant& mutant : enumerate_all(binary)) {
      MutantRecord rec = to_record(mutant);
      expect(rec.patch.size() == rec.original.size(),
             std::string(name) + ": patch length drifted at mutant " +
                 std::to_string(rec.mutant_id));
      expect(rec.patch != rec.original,
             std::string(name) + ": identity patch at mutant " +
                 std::to_string(rec.mutant_id));

      // The patched window must decode cleanly to its exact end.
      size_t at = 0;
      while (at < rec.patch.size()) {
        std::span<const uint8_t> window(rec.patch.data() + at,
                                        rec.patch.size() - at);
        Instruction insn = decode(window, rec.vaddr + at);
        at += insn.length;
      }
      expect(at == rec.patch.size(),
             std::string(name) + ": redecode overran the patch window");

      if (rec.variant == MutationVariant::ForceTake) {
        ++force_takes;
        uint64_t before = branch_target(rec.vaddr, rec.original);
        uint64_t after = branch_target(rec.vaddr, rec.patch);
        expect(before == after,
               std::string(name) + ": force-take retargeted " +
                   std::to_string(before) + " to " + std::to_string(after));
      }
      ++mutants;
    }
  }
  expect(force_takes > 50, "too few force-take mutants to claim coverage");
  return std::to_string(mutants) + " mutants sound (" +
         std::to_string(force_takes) + " force-take targets checked)";
}

// 3: emitted mutant files equal the original everywhere but the patch.
std::string check_single_site_diff() {
  TempDir tmp;
  size_t emitted = 0;
  struct Job {
    const char* name;
    size_t sample;  // 0 means the whole population
  };
  const Job jobs[] = {{"abs-O0", 0},    {"countdown-O1", 0}, {"primes-O2", 0},
                      {"matmul-O0", 0}, {"stats-O2", 0},     {"strkit-O1", 0},
                      {"checksum-O0", 1000}};
  for (const Job& job : jobs) {
    fs::path path = corpus_binary(job.name);
    LoadedBinary binary = load_binary(path);
    std::vector<MutantRecord> records;
    for (const Mutant& m : enumerate_all(binary)) records.push_back(to_record(m));
    if (job.sample != 0) records = sample_records(records, {42, job.sample});

    fs::path out_dir = tmp.path() / job.name;
    fs::create_directories(out_dir);
    uintmax_t original_size = fs::file_size(path);
    for (const MutantRecord& rec : records) {
      fs::path mutant = emit_mutant(binary, rec, out_dir);
      expect(fs::file_size(mutant) == original_size,
             std::string(job.name) + ": size drifted for mutant " +
                 std::to_string(rec.mutant_id));
      expect(verify_diff(path, mutant, rec),
             std::string(job.name) + ": diff check failed for mutant " +
                 std::to_string(rec.mutant_id));
      ++emitted;
    }
    fs::remove_all(out_dir);
  }
  return std::to_string(emitted) + " emitted files verified";
}

// 4: the pipeline is a pure function of (binary, manifest, seed).
std::string check_determinism(fs::path& kept_run_dir, TempDir& tmp) {
  fs::path bin = corpus_binary("abs-O0");
  fs::path tests = manifest_dir() / "abs.json";
  auto run = [&](const std::string& label, unsigned workers) {
    fs::path out = tmp.path() / label;
    cli("all " + bin.string() + " --tests " + tests.string() +
        " --seed 42 --workers " + std::to_string(workers) + " --out " +
        out.string());
    return out;
  };

  fs::path a = run("runa", 2);
  fs::path b = run("runb", 2);
  fs::path c = run("runc", 7);  // only the worker count differs

  for (const fs::path& other : {b, c}) {
    expect_same_bytes(a / "manifest.jsonl", other / "manifest.jsonl");
    expect_same_bytes(a / "mutants" / "manifest.jsonl",
                      other / "mutants" / "manifest.jsonl");
    expect_same_bytes(a / "verdicts-test.jsonl", other / "verdicts-test.jsonl");
    expect_same_bytes(a / "report" / "score.csv", other / "report" / "score.csv");
  }

  size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a / "mutants")) {
    if (entry.path().extension() != ".bin") continue;
    expect_same_bytes(entry.path(), b / "mutants" / entry.path().filename());
    expect_same_bytes(entry.path(), c / "mutants" / entry.path().filename());
    ++files;
  }
  expect(files > 0, "no mutant files were emitted");

  kept_run_dir = a;
  return "3 runs byte-identical across " + std::to_string(files) +
         " mutant files and all reports";
}

// 5: forcing the abs sign branch is caught by the output comparison.
std::string check_known_kill(TempDir& tmp) {
  fs::path original = corpus_binary("abs-O0");
  LoadedBinary binary = load_binary(original);
  TestManifest manifest = load_manifest(manifest_dir() / "abs.json");
  BaselineProfile profile = baseline(manifest, original, tmp.path() / "k-base");
  MutationSite branch = abs_sign_branch(binary);

  fs::path ff = emit_variant(binary, branch, MutationVariant::ForceFallthrough,
                             std::nullopt, 1, tmp.path());
  Verdict verdict = run_tests(ff, manifest, profile, tmp.path() / "k-ff");
  expect(verdict.kind == VerdictKind::Killed &&
             verdict.reason == VerdictReason::OutputMismatch,
         "force-fallthrough verdict was " +
             std::string(verdict_reason_name(verdict.reason)));
  expect(verdict.test == "neg", "force-fallthrough died on test " + verdict.test);

  fs::path ft = emit_variant(binary, branch, MutationVariant::ForceTake,
                             std::nullopt, 2, tmp.path());
  verdict = run_tests(ft, manifest, profile, tmp.path() / "k-ft");
  expect(verdict.kind == VerdictKind::Killed,
         "force-take on +5 was not killed");
  expect(verdict.test == "pos", "force-take died on test " + verdict.test);
  return "fallthrough killed on -5, take killed on +5";
}

// 6: the runaway-loop mutant dies by timeout within twice the baseline
// plus one second of grace.
std::string check_timeout_kill(TempDir& tmp) {
  auto start = Clock::now();
  fs::path original = corpus_binary("countdown-O0");
  LoadedBinary binary = load_binary(original);
  TestManifest manifest = load_manifest(manifest_dir() / "countdown.json");
  BaselineProfile profile = baseline(manifest, original, tmp.path() / "t-base");

  MutationSite site = countdown_decrement(binary);
  fs::path mutant = emit_variant(binary, site, MutationVariant::ArithSwap,
                                 Op::Add, 1, tmp.path());

  std::map<std::string, double> walls;
  Verdict verdict =
      run_tests(mutant, manifest, profile, tmp.path() / "t-run", &walls);
  expect(verdict.kind == VerdictKind::Killed &&
             verdict.reason == VerdictReason::Timeout,
         "expected a timeout kill, got " +
             std::string(verdict_reason_name(verdict.reason)));

  double baseline_runtime = profile.per_test.at(0).runtime_seconds;
  double wall = walls.at(verdict.test);
  double bound = manifest.timeout_factor * baseline_runtime + 1.0;
  // The enforced timeout has a one-second floor; the bound must still
  // cover it when the baseline is fast.
  bound = std::max(bound,
                   profile.timeout_for(baseline_runtime, manifest.timeout_factor) +
                       1.0);
  expect(wall <= bound, "kill took " + format_seconds(wall) +
                            ", bound was " + format_seconds(bound));
  double elapsed = seconds_since(start);
  expect(elapsed < kTimeoutKillBudgetSeconds,
         "criterion took " + format_seconds(elapsed));
  return "SUB->ADD killed by timeout in " + format_seconds(wall) + " (bound " +
         format_seconds(bound) + ")";
}

// 7: verdicts partition their samples; identity binaries pass.
std::string check_partition(const fs::path& abs_run, const fs::path& checksum_run,
                            TempDir& tmp) {
  expect(!abs_run.empty() && fs::exists(abs_run),
         "determinism run artifacts unavailable");
  expect(!checksum_run.empty() && fs::exists(checksum_run),
         "end-to-end run artifacts unavailable");

  struct RunFiles {
    fs::path sample;
    fs::path verdicts;
  };
  std::vector<RunFiles> runs = {
      {abs_run / "mutants" / "manifest.jsonl", abs_run / "verdicts-test.jsonl"}};
  for (const char* set : {"test", "train", "ref"}) {
    runs.push_back({checksum_run / "mutants" / "manifest.jsonl",
                    checksum_run / ("verdicts-" + std::string(set) + ".jsonl")});
  }

  size_t checked = 0;
  for (const RunFiles& run : runs) {
    std::vector<MutantRecord> sampled = read_mutant_records(run.sample);
    std::vector<VerdictRecord> verdicts = read_verdicts(run.verdicts);
    expect(verdicts.size() == sampled.size(),
           run.verdicts.string() + ": verdict count != sample size");
    MutationScore s = score(verdicts);
    expect(s.killed + s.passed + s.trivial == s.sampled,
           run.verdicts.string() + ": outcome buckets do not partition");

    size_t by_class = 0;
    for (const CategoryRow& row : breakdown(sampled, verdicts)) {
      by_class += row.sampled;
    }
    expect(by_class == sampled.size(),
           run.verdicts.string() + ": per-class sample counts drift");
    ++checked;
  }

  // The unmutated binary always classifies Passed.
  for (const char* pair : {"abs-O0:abs.json", "checksum-O0:checksum-test.json"}) {
    std::string spec(pair);
    auto colon = spec.find(':');
    fs::path bin = corpus_binary(spec.substr(0, colon));
    TestManifest manifest = load_manifest(manifest_dir() / spec.substr(colon + 1));
    BaselineProfile profile =
        baseline(manifest, bin, tmp.path() / ("p-" + spec.substr(0, colon)));
    Verdict verdict = evaluate_one(bin, manifest, profile,
                                   tmp.path() / ("pi-" + spec.substr(0, colon)));
    expect(verdict.kind == VerdictKind::Passed,
           spec + ": identity binary did not pass");
  }
  return std::to_string(checked) + " runs partition cleanly, identities pass";
}

// 8: 564 kills out of 1000 reports exactly "56.4".
std::string check_score_formatting() {
  auto pct = format_pct(564, 1000);
  expect(pct.has_value() && *pct == "56.4",
         "format_pct(564, 1000) gave " + (pct ? *pct : "nothing"));

  std::vector<VerdictRecord> verdicts;
  uint32_t id = 0;
  for (int i = 0; i < 564; ++i) {
    verdicts.push_back(
        {id++, {VerdictKind::Killed, VerdictReason::OutputMismatch, "t"}, {}});
  }
  for (int i = 0; i < 300; ++i) {
    verdicts.push_back({id++, {VerdictKind::Passed, VerdictReason::None, ""}, {}});
  }
  for (int i = 0; i < 136; ++i) {
    verdicts.push_back(
        {id++, {VerdictKind::Trivial, VerdictReason::HealthCrash, "health"}, {}});
  }
  MutationScore s = score(verdicts);
  auto raw = format_pct(s.killed, s.sampled);
  expect(raw.has_value() && *raw == "56.4", "scored run formatted as " +
                                                (raw ? *raw : "nothing"));
  return "564/1000 formats as 56.4";
}

// 9: replacement candidates for an immediate follow the fixed law.
std::string check_constant_law() {
  std::vector<int64_t> five = constant_candidates(5, 4);
  std::vector<int64_t> expected = {-1, 0, 1, -5, 6, 4};
  expect(five == expected, "candidates for 5 were " + [&] {
    std::string s;
    for (int64_t v : five) s += std::to_string(v) + " ";
    return s;
  }());

  auto fits = [](__int128 v, uint8_t width) {
    __int128 lo = -(__int128(1) << (width * 8 - 1));
    __int128 hi = (__int128(1) << (width * 8 - 1)) - 1;
    return v >= lo && v <= hi;
  };

  std::mt19937_64 rng(20260825);
  size_t trials = 0;
  for (uint8_t width : {uint8_t(1), uint8_t(2), uint8_t(4), uint8_t(8)}) {
    __int128 lo = -(__int128(1) << (width * 8 - 1));
    __int128 hi = (__int128(1) << (width * 8 - 1)) - 1;
    for (int i = 0; i < 2000; ++i) {
      // The full-width span does not fit in 64 bits; draw directly there.
      int64_t c = width == 8 ? int64_t(rng())
                             : int64_t(lo + __int128(rng() % uint64_t(hi - lo + 1)));
      std::vector<int64_t> want;
      for (__int128 candidate :
           {__int128(-1), __int128(0), __int128(1), -__int128(c),
            __int128(c) + 1, __int128(c) - 1}) {
        if (candidate == c || !fits(candidate, width)) continue;
        bool dup = false;
        for (int64_t have : want) dup = dup || have == candidate;
        if (!dup) want.push_back(int64_t(candidate));
      }
      std::vector<int64_t> got = constant_candidates(c, width);
      expect(got == want,
             "candidate law violated for value " + std::to_string(c) +
                 " width " + std::to_string(width));
      ++trials;
    }
  }
  return "exact set for 5; " + std::to_string(trials) + " random laws hold";
}

// 10: fraction of decoded instructions with at least one candidate.
std::string check_density_band() {
  std::string details;
  for (const char* name : {"abs-O2", "countdown-O2", "checksum-O2", "primes-O2",
                           "matmul-O2", "stats-O2", "strkit-O2"}) {
    LoadedBinary binary = load_binary(corpus_binary(name));
    size_t instructions = 0;
    for (const CodeRegion& region : code_regions(binary)) {
      uint64_t vaddr = region.vaddr;
      uint64_t end = region.vaddr + region.length;
      size_t offset = size_t(region.file_offset);
      while (vaddr < end) {
        Instruction insn =
            decode(std::span<const uint8_t>(binary.image.data() + offset,
                                            size_t(end - vaddr)),
                   vaddr);
        ++instructions;
        vaddr += insn.length;
        offset += insn.length;
      }
    }
    size_t sites = enumerate_sites(binary).size();
    double density = double(sites) / double(instructions);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s %.0f%% ", name, density * 100.0);
    details += buf;
    expect(density >= kDensityLow && density <= kDensityHigh,
           std::string(name) + ": density " + std::to_string(density) +
               " outside [0.15, 0.60]");
  }
  return details;
}

// 11: the whole pipeline on the largest corpus program, three input
// sets, a 1000-mutant sample, under the wall-clock budget.
std::string check_end_to_end(fs::path& kept_run_dir, TempDir& tmp) {
  auto start = Clock::now();
  fs::path bin = corpus_binary("checksum-O0");
  fs::path out = tmp.path() / "checksum-run";
  std::string tests;
  for (const char* set : {"test", "train", "ref"}) {
    tests += " --tests " +
             (manifest_dir() / ("checksum-" + std::string(set) + ".json")).string();
  }
  cli("all " + bin.string() + tests +
      " --seed 42 --sample-size 1000 --workers 4 --out " + out.string());
  double elapsed = seconds_since(start);

  std::vector<MutantRecord> sampled =
      read_mutant_records(out / "mutants" / "manifest.jsonl");
  expect(sampled.size() == 1000, "sample size was " +
                                     std::to_string(sampled.size()));
  std::string csv = read_file_text(out / "report" / "score.csv");
  size_t rows = size_t(std::count(csv.begin(), csv.end(), '\n'));
  expect(rows == 4, "score.csv should hold a header and three runs");
  for (const char* set : {"test", "train", "ref"}) {
    expect(csv.find("," + std::string(set) + ",1000,") != std::string::npos,
           std::string("score.csv lacks a 1000-mutant row for ") + set);
  }
  expect(elapsed < kEndToEndBudgetSeconds,
         "pipeline took " + format_seconds(elapsed));

  kept_run_dir = out;
  return "3 input sets, 1000 mutants in " + format_seconds(elapsed);
}

}  // namespace

int main() {
  TempDir tmp;
  fs::path abs_run_dir;
  fs::path checksum_run_dir;

  struct Criterion {
    int number;
    const char* title;
    std::function<std::string()> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "decoder lengths match the reference disassembler over the corpus",
       [] { return check_decoder_oracle(); }},
      {2, "enumerated mutants are length-exact, distinct and re-decodable",
       [] { return check_replacement_soundness(); }},
      {3, "emitted mutants differ from the original only inside the patch",
       [] { return check_single_site_diff(); }},
      {4, "seed-42 pipeline reruns are byte-identical, workers change nothing",
       [&] { return check_determinism(abs_run_dir, tmp); }},
      {5, "forced abs sign branches are killed through golden output",
       [&] { return check_known_kill(tmp); }},
      {6, "runaway loop mutant dies by the doubled-baseline timeout",
       [&] { return check_timeout_kill(tmp); }},
      {11, "end-to-end pipeline on the largest program meets its budget",
       [&] { return check_end_to_end(checksum_run_dir, tmp); }},
      {7, "verdicts partition every sample and identity binaries pass",
       [&] { return check_partition(abs_run_dir, checksum_run_dir, tmp); }},
      {8, "a 564-of-1000 kill count reports a 56.4 raw score",
       [] { return check_score_formatting(); }},
      {9, "constant replacement candidates follow the fixed law",
       [] { return check_constant_law(); }},
      {10, "mutable-instruction density at -O2 stays in the sanity band",
       [] { return check_density_band(); }},
  };

  std::map<int, std::pair<bool, std::string>> results;
  for (const Criterion& criterion : criteria) {
    std::fprintf(stderr, "[acceptance] running criterion %d...\n",
                 criterion.number);
    try {
      std::string detail = criterion.body();
      results[criterion.number] = {
          true, std::string(criterion.title) + "  [" + detail + "]"};
    } catch (const std::exception& e) {
      results[criterion.number] = {
          false, std::string(criterion.title) + ": " + e.what()};
    }
  }

  bool all_ok = true;
  for (const auto& [number, result] : results) {
    const auto& [ok, text] = result;
    std::printf("%s %2d  %s\n", ok ? "pass" : "FAIL", number, text.c_str());
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
