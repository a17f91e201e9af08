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

#ifndef BINMUT_MUTAGEN_HPP
#define BINMUT_MUTAGEN_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "binmut/elf_image.hpp"
#include "binmut/insn.hpp"

namespace binmut {

enum class MutationVariant : uint8_t {
  ArithSwap,
  LogicSwap,
  ForceTake,
  ForceFallthrough,
  ConstReplace,
  Skip,
};

std::string_view variant_name(MutationVariant variant);
std::optional<MutationVariant> variant_from_name(std::string_view name);

// Small set over the four operator classes.
class ClassSet {
 public:
  void add(OperatorClass cls) { bits_ |= uint8_t(1u << unsigned(cls)); }
  bool contains(OperatorClass cls) const {
    return (bits_ & (1u << unsigned(cls))) != 0;
  }
  bool empty() const { return bits_ == 0; }
  bool operator==(const ClassSet&) const = default;

 private:
  uint8_t bits_ = 0;
};

struct MutationSite {
  uint32_t site_id = 0;
  uint64_t vaddr = 0;
  uint64_t file_offset = 0;
  Instruction insn;
  ClassSet classes;
};

struct MutationOperator {
  OperatorClass cls = OperatorClass::Arithmetic;
  MutationVariant variant = MutationVariant::Skip;
  std::optional<Op> target;     // swaps only
  std::optional<int64_t> value;  // constant replacement only
};

struct Mutant {
  uint32_t mutant_id = 0;
  MutationSite site;
  MutationOperator op;
  std::vector<uint8_t> patch;
};

// Flat, serializable form of a Mutant; what the downstream stages consume.
struct MutantRecord {
  uint32_t mutant_id = 0;
  uint64_t vaddr = 0;
  uint64_t file_offset = 0;
  OperatorClass cls = OperatorClass::Arithmetic;
  MutationVariant variant = MutationVariant::Skip;
  std::optional<Op> target;
  std::optional<int64_t> value;
  std::vector<uint8_t> original;
  std::vector<uint8_t> patch;

  bool operator==(const MutantRecord&) const = default;
};

class UnencodableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IdenticalBytesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Replacement values tried for an immediate holding `value`: -1, 0, 1,
// -value, value+1, value-1, in that order, dropping the original value,
// duplicates, and anything outside the field's signed range.
std::vector<int64_t> constant_candidates(int64_t value, uint8_t width);

// Decodes every code region and returns the mutation sites in address
// order. Regions that fail to decode are skipped with a warning.
std::vector<MutationSite> enumerate_sites(const LoadedBinary& binary);

// The mutation operators applicable to one site, in a fixed order:
// arithmetic swaps, logical swaps, force-take, force-fallthrough,
// constant replacements, skip.
std::vector<MutationOperator> candidates_for(const MutationSite& site);

// Materializes one mutant. Throws UnencodableError when the rewrite does
// not preserve length and IdenticalBytesError when it changes nothing.
Mutant instantiate(const MutationSite& site, const MutationOperator& op,
                   uint32_t mutant_id);

// Full first-order mutant population, deduplicated per site by patch
// bytes, with dense ids assigned in generation order.
std::vector<Mutant> enumerate_all(const LoadedBinary& binary);

MutantRecord to_record(const Mutant& mutant);

void write_mutant_records(const std::vector<MutantRecord>& records,
                          std::ostream& out);
void write_mutant_records(const std::vector<MutantRecord>& records,
                          const std::filesystem::path& path);
std::vector<MutantRecord> read_mutant_records(const std::filesystem::path& path);

}  // namespace binmut

#endif  // BINMUT_MUTAGEN_HPP
