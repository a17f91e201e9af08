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

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "binmut/elf_image.hpp"
#include "binmut/forge.hpp"
#include "binmut/harness.hpp"
#include "binmut/mutagen.hpp"
#include "binmut/report.hpp"

namespace fs = std::filesystem;
using namespace binmut;

namespace {

std::set<ReportFormat> parse_formats(const std::string& spec) {
  std::set<ReportFormat> formats;
  std::string item;
  std::istringstream in(spec);
  while (std::getline(in, item, ',')) {
    if (item == "csv") {
      formats.insert(ReportFormat::Csv);
    } else if (item == "json") {
      formats.insert(ReportFormat::Json);
    } else if (item == "svg") {
      formats.insert(ReportFormat::Svg);
    } else if (!item.empty()) {
      throw CLI::ValidationError("--formats", "unknown format: " + item);
    }
  }
  if (formats.empty()) {
    throw CLI::ValidationError("--formats", "no output formats selected");
  }
  return formats;
}

void print_population_summary(const std::vector<MutantRecord>& records) {
  std::map<std::string, size_t> by_category;
  for (const MutantRecord& rec : records) ++by_category[category_of(rec)];
  std::cout << records.size() << " mutants";
  if (!records.empty()) {
    std::cout << " (";
    bool first = true;
    for (const char* cat : kCategories) {
      auto it = by_category.find(cat);
      if (it == by_category.end()) continue;
      if (!first) std::cout << ", ";
      std::cout << it->second << " " << cat;
      first = false;
    }
    std::cout << ")";
  }
  std::cout << "\n";
}

void print_verdict_summary(const std::string& input_set,
                           const std::vector<VerdictRecord>& verdicts) {
  MutationScore s = score(verdicts);
  std::cout << input_set << ": " << s.sampled << " evaluated, " << s.killed
            << " killed, " << s.passed << " passed, " << s.trivial << " trivial";
  if (auto pct = format_pct(s.killed, s.sampled)) std::cout << "; raw " << *pct << "%";
  if (auto pct = format_pct(s.killed, s.killed + s.passed)) {
    std::cout << ", adjusted " << *pct << "%";
  }
  std::cout << "\n";
}

std::vector<std::pair<uint32_t, fs::path>> scan_mutant_dir(const fs::path& dir) {
  std::vector<std::pair<uint32_t, fs::path>> mutants;
  if (!fs::is_directory(dir)) {
    throw std::runtime_error(dir.string() + " is not a directory");
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".bin") continue;
    const std::string stem = entry.path().stem().string();
    if (stem.empty() ||
        !std::all_of(stem.begin(), stem.end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
      continue;
    }
    mutants.emplace_back(uint32_t(std::stoul(stem)), entry.path());
  }
  std::sort(mutants.begin(), mutants.end());
  return mutants;
}

std::vector<MutantRecord> enumerate_records(const fs::path& binary_path) {
  LoadedBinary binary = load_binary(binary_path);
  std::vector<MutantRecord> records;
  for (const Mutant& m : enumerate_all(binary)) records.push_back(to_record(m));
  return records;
}

int cmd_enumerate(const fs::path& binary_path, const fs::path& out_path) {
  std::vector<MutantRecord> records = enumerate_records(binary_path);
  write_mutant_records(records, out_path);
  print_population_summary(records);
  std::cerr << "wrote " << out_path.string() << "\n";
  return 0;
}

int cmd_forge(const fs::path& binary_path, const fs::path& manifest_path,
              uint64_t seed, size_t sample_size, const fs::path& out_dir) {
  LoadedBinary binary = load_binary(binary_path);
  std::vector<MutantRecord> all = read_mutant_records(manifest_path);
  std::vector<MutantRecord> sampled = sample_records(all, {seed, sample_size});
  fs::create_directories(out_dir);
  write_mutant_records(sampled, out_dir / "manifest.jsonl");
  for (const MutantRecord& rec : sampled) {
    fs::path out = emit_mutant(binary, rec, out_dir);
    if (!verify_diff(binary_path, out, rec)) {
      throw std::runtime_error("mutant " + std::to_string(rec.mutant_id) +
                               " failed the single-site diff check");
    }
  }
  std::cout << "emitted " << sampled.size() << " of " << all.size()
            << " mutants into " << out_dir.string() << "\n";
  return 0;
}

int cmd_run(const fs::path& binary_path, const fs::path& mutants_dir,
            const fs::path& tests_path, unsigned workers, const fs::path& out_path,
            const fs::path& timings_path, fs::path scratch_dir) {
  TestManifest manifest = load_manifest(tests_path);
  if (scratch_dir.empty()) scratch_dir = out_path.parent_path() / "scratch";
  BaselineProfile profile =
      baseline(manifest, binary_path, scratch_dir / "baseline");

  std::vector<std::pair<uint32_t, fs::path>> mutants = scan_mutant_dir(mutants_dir);
  std::vector<VerdictRecord> verdicts =
      evaluate_all(mutants, manifest, profile, scratch_dir, workers);
  write_verdicts(verdicts, out_path);
  if (!timings_path.empty()) write_timings(verdicts, timings_path);
  print_verdict_summary(manifest.input_set_name, verdicts);
  std::cerr << "wrote " << out_path.string() << "\n";
  return 0;
}

int cmd_report(const fs::path& sample_path,
               const std::vector<std::string>& run_specs,
               const std::string& binary_name, const std::string& formats_spec,
               const fs::path& out_dir) {
  std::vector<MutantRecord> sampled = read_mutant_records(sample_path);
  std::vector<RunReport> runs;
  for (const std::string& spec : run_specs) {
    size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw std::runtime_error("--run expects NAME=VERDICTS_FILE, got: " + spec);
    }
    std::string input_set = spec.substr(0, eq);
    fs::path verdicts_path = spec.substr(eq + 1);
    std::vector<VerdictRecord> verdicts = read_verdicts(verdicts_path);
    if (verdicts.empty()) {
      std::cerr << "warning: " << verdicts_path.string()
                << " holds no verdicts; skipping run " << input_set << "\n";
      continue;
    }
    runs.push_back(make_report(binary_name, input_set, sampled, verdicts));
    print_verdict_summary(input_set, verdicts);
  }
  auto written = emit_report(runs, out_dir, parse_formats(formats_spec));
  for (const fs::path& p : written) std::cerr << "wrote " << p.string() << "\n";
  return 0;
}

int cmd_all(const fs::path& binary_path, const std::vector<fs::path>& tests_paths,
            uint64_t seed, size_t sample_size, unsigned workers,
            const std::string& formats_spec, const fs::path& out_dir) {
  // Validate every manifest before any heavy work or file emission.
  std::vector<TestManifest> manifests;
  for (const fs::path& p : tests_paths) manifests.push_back(load_manifest(p));
  {
    std::set<std::string> names;
    for (const TestManifest& m : manifests) {
      if (!names.insert(m.input_set_name).second) {
        throw std::runtime_error("duplicate input_set_name: " + m.input_set_name);
      }
    }
  }
  auto formats = parse_formats(formats_spec);

  LoadedBinary binary = load_binary(binary_path);
  std::vector<MutantRecord> all;
  for (const Mutant& m : enumerate_all(binary)) all.push_back(to_record(m));
  fs::create_directories(out_dir);
  write_mutant_records(all, out_dir / "manifest.jsonl");
  print_population_summary(all);

  std::vector<MutantRecord> sampled = sample_records(all, {seed, sample_size});
  fs::path mutants_dir = out_dir / "mutants";
  fs::create_directories(mutants_dir);
  write_mutant_records(sampled, mutants_dir / "manifest.jsonl");
  std::vector<std::pair<uint32_t, fs::path>> mutant_files;
  for (const MutantRecord& rec : sampled) {
    mutant_files.emplace_back(rec.mutant_id, emit_mutant(binary, rec, mutants_dir));
  }
  std::cout << "emitted " << sampled.size() << " mutants\n";

  std::vector<RunReport> runs;
  for (const TestManifest& manifest : manifests) {
    const std::string& set = manifest.input_set_name;
    fs::path scratch = out_dir / "scratch" / set;
    BaselineProfile profile = baseline(manifest, binary_path, scratch / "baseline");
    std::vector<VerdictRecord> verdicts =
        evaluate_all(mutant_files, manifest, profile, scratch, workers);
    write_verdicts(verdicts, out_dir / ("verdicts-" + set + ".jsonl"));
    write_timings(verdicts, out_dir / ("timings-" + set + ".jsonl"));
    print_verdict_summary(set, verdicts);
    runs.push_back(
        make_report(binary_path.filename().string(), set, sampled, verdicts));
    std::error_code ec;
    fs::remove_all(scratch, ec);
  }

  auto written = emit_report(runs, out_dir / "report", formats);
  for (const fs::path& p : written) std::cerr << "wrote " << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mutation testing for x86-64 ELF binaries"};
  app.require_subcommand(1);

  unsigned default_workers = std::max(1u, std::thread::hardware_concurrency());

  // enumerate
  fs::path enum_binary, enum_out = "manifest.jsonl";
  CLI::App* enumerate = app.add_subcommand(
      "enumerate", "list every first-order mutant of a binary");
  enumerate->add_option("binary", enum_binary, "ELF executable to mutate")
      ->required()
      ->check(CLI::ExistingFile);
  enumerate->add_option("--out", enum_out, "output JSONL path");

  // forge
  fs::path forge_binary, forge_manifest, forge_out;
  uint64_t forge_seed = 42;
  size_t forge_size = 1000;
  CLI::App* forge = app.add_subcommand(
      "forge", "sample mutants and write the mutant binaries");
  forge->add_option("binary", forge_binary, "ELF executable to mutate")
      ->required()
      ->check(CLI::ExistingFile);
  forge->add_option("manifest", forge_manifest, "mutant population JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  forge->add_option("--seed", forge_seed, "sampling seed");
  forge->add_option("--sample-size", forge_size, "number of mutants to draw");
  forge->add_option("--out", forge_out, "output directory")->required();

  // run
  fs::path run_binary, run_mutants, run_tests_path, run_out = "verdicts.jsonl";
  fs::path run_timings, run_scratch;
  unsigned run_workers = default_workers;
  CLI::App* run = app.add_subcommand(
      "run", "evaluate mutant binaries against a test manifest");
  run->add_option("binary", run_binary, "original (unmutated) binary")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--mutants", run_mutants, "directory of <id>.bin mutants")
      ->required()
      ->check(CLI::ExistingDirectory);
  run->add_option("--tests", run_tests_path, "test manifest (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--workers", run_workers, "parallel evaluation workers");
  run->add_option("--out", run_out, "verdict JSONL path");
  run->add_option("--timings", run_timings, "wall-time JSONL path");
  run->add_option("--scratch", run_scratch, "scratch directory");

  // report
  fs::path report_sample, report_out = "report";
  std::vector<std::string> report_runs;
  std::string report_binary_name = "binary";
  std::string report_formats = "csv,json,svg";
  CLI::App* report = app.add_subcommand(
      "report", "aggregate verdicts into scores, tables and charts");
  report->add_option("--sample", report_sample, "sampled mutant manifest JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--run", report_runs, "NAME=VERDICTS_FILE (repeatable)")
      ->required();
  report->add_option("--binary-name", report_binary_name, "label for the binary");
  report->add_option("--formats", report_formats, "comma-separated: csv,json,svg");
  report->add_option("--out", report_out, "output directory");

  // all
  fs::path all_binary, all_out;
  std::vector<fs::path> all_tests;
  uint64_t all_seed = 42;
  size_t all_size = 1000;
  unsigned all_workers = default_workers;
  std::string all_formats = "csv,json,svg";
  CLI::App* all = app.add_subcommand(
      "all", "enumerate, forge, run and report in one pass");
  all->add_option("binary", all_binary, "ELF executable to mutate")
      ->required()
      ->check(CLI::ExistingFile);
  all->add_option("--tests", all_tests, "test manifest (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  all->add_option("--seed", all_seed, "sampling seed");
  all->add_option("--sample-size", all_size, "number of mutants to draw");
  all->add_option("--workers", all_workers, "parallel evaluation workers");
  all->add_option("--formats", all_formats, "comma-separated: csv,json,svg");
  all->add_option("--out", all_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (enumerate->parsed()) return cmd_enumerate(enum_binary, enum_out);
    if (forge->parsed()) {
      return cmd_forge(forge_binary, forge_manifest, forge_seed, forge_size,
                       forge_out);
    }
    if (run->parsed()) {
      return cmd_run(run_binary, run_mutants, run_tests_path, run_workers,
                     run_out, run_timings, run_scratch);
    }
    if (report->parsed()) {
      return cmd_report(report_sample, report_runs, report_binary_name,
                        report_formats, report_out);
    }
    if (all->parsed()) {
      return cmd_all(all_binary, all_tests, all_seed, all_size, all_workers,
                     all_formats, all_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
