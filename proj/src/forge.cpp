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

#include "binmut/forge.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "binmut/bytes.hpp"

namespace binmut {

namespace {

// Rejection-sampled uniform draw in [0, bound]. std::uniform_int_distribution
// is implementation-defined, which would break cross-machine determinism.
uint64_t draw_uniform(std::mt19937_64& rng, uint64_t bound) {
  uint64_t range = bound + 1;
  uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % range;
}

}  // namespace

std::vector<uint32_t> sample_ids(std::vector<uint32_t> ids, const SamplePlan& plan) {
  if (ids.empty()) throw EmptyPopulationError("no mutants to sample from");
  std::sort(ids.begin(), ids.end());
  if (ids.size() <= plan.size) return ids;

  // Floyd's algorithm: k draws, no shuffle of the full population.
  std::mt19937_64 rng(plan.seed);
  size_t n = ids.size();
  size_t k = plan.size;
  std::unordered_set<size_t> chosen;
  chosen.reserve(k);
  for (size_t j = n - k; j < n; ++j) {
    size_t t = size_t(draw_uniform(rng, j));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<uint32_t> out;
  out.reserve(k);
  for (size_t idx : chosen) out.push_back(ids[idx]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<MutantRecord> sample_records(const std::vector<MutantRecord>& all,
                                         const SamplePlan& plan) {
  std::vector<uint32_t> ids;
  ids.reserve(all.size());
  std::unordered_map<uint32_t, const MutantRecord*> by_id;
  for (const MutantRecord& rec : all) {
    ids.push_back(rec.mutant_id);
    by_id[rec.mutant_id] = &rec;
  }
  if (by_id.size() != all.size()) {
    throw std::runtime_error("duplicate mutant ids in population");
  }
  std::vector<MutantRecord> out;
  for (uint32_t id : sample_ids(std::move(ids), plan)) {
    out.push_back(*by_id.at(id));
  }
  return out;
}

std::filesystem::path emit_mutant(const LoadedBinary& original,
                                  const MutantRecord& record,
                                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::path out = out_dir / (std::to_string(record.mutant_id) + ".bin");
  write_patched(original, {{record.file_offset, record.patch}}, out);
  return out;
}

bool verify_diff(const std::filesystem::path& original,
                 const std::filesystem::path& mutant, const MutantRecord& record) {
  std::vector<uint8_t> a = read_file_bytes(original);
  std::vector<uint8_t> b = read_file_bytes(mutant);
  if (a.size() != b.size()) return false;
  size_t lo = record.file_offset;
  size_t hi = record.file_offset + record.patch.size();
  if (hi > a.size()) return false;
  size_t changed = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    if (i < lo || i >= hi) return false;
    ++changed;
  }
  return changed > 0;
}

}  // namespace binmut
