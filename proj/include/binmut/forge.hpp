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

#ifndef BINMUT_FORGE_HPP
#define BINMUT_FORGE_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "binmut/elf_image.hpp"
#include "binmut/mutagen.hpp"

namespace binmut {

class EmptyPopulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplePlan {
  uint64_t seed = 42;
  size_t size = 1000;
};

// Uniform sample without replacement, deterministic for a given seed and
// id set (the ids are sorted before selection, so input order is
// irrelevant). Returns all ids when the population is not larger than the
// requested size. Throws EmptyPopulationError on an empty population.
std::vector<uint32_t> sample_ids(std::vector<uint32_t> ids, const SamplePlan& plan);

// The record-level version; output is sorted by mutant_id.
std::vector<MutantRecord> sample_records(const std::vector<MutantRecord>& all,
                                         const SamplePlan& plan);

// Writes the mutant binary for one record as <mutant_id>.bin in out_dir.
// Returns the path written.
std::filesystem::path emit_mutant(const LoadedBinary& original,
                                  const MutantRecord& record,
                                  const std::filesystem::path& out_dir);

// Confirms a mutant file differs from the original only inside the
// record's patch window, with at least one byte changed.
bool verify_diff(const std::filesystem::path& original,
                 const std::filesystem::path& mutant, const MutantRecord& record);

}  // namespace binmut

#endif  // BINMUT_FORGE_HPP
