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

#ifndef BINMUT_ELF_IMAGE_HPP
#define BINMUT_ELF_IMAGE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace binmut {

enum class ElfFault {
  NotElf,            // magic missing or file too small to carry it
  UnsupportedClass,  // not 64-bit little-endian x86-64 EXEC/DYN
  Truncated,         // headers or section data reach past end of file
};

class ElfError : public std::runtime_error {
 public:
  ElfError(ElfFault fault, const std::string& message)
      : std::runtime_error(message), fault_(fault) {}
  ElfFault fault() const { return fault_; }

 private:
  ElfFault fault_;
};

// Raised when a binary carries no usable function symbols (e.g. stripped).
class NoSymbolsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PatchFault { OutOfBounds, Overlapping };

class PatchError : public std::runtime_error {
 public:
  PatchError(PatchFault fault, const std::string& message)
      : std::runtime_error(message), fault_(fault) {}
  PatchFault fault() const { return fault_; }

 private:
  PatchFault fault_;
};

// A section that occupies bytes in the file (SHT_NOBITS is skipped).
struct Section {
  std::string name;
  uint64_t vaddr = 0;
  uint64_t file_offset = 0;
  uint64_t size = 0;
  bool executable = false;
};

// A defined STT_FUNC symbol with a nonzero size, fully inside one
// executable section.
struct FunctionSymbol {
  std::string name;
  uint64_t vaddr = 0;
  uint64_t size = 0;
};

// A maximal run of function bytes, addressable both by vaddr and by
// file offset. Regions never overlap and are sorted by vaddr.
struct CodeRegion {
  uint64_t vaddr = 0;
  uint64_t file_offset = 0;
  uint64_t length = 0;
};

struct LoadedBinary {
  std::filesystem::path path;
  std::vector<uint8_t> image;  // the whole file
  std::vector<Section> sections;
  std::vector<FunctionSymbol> symbols;
  uint64_t entry = 0;

  const Section* section_containing(uint64_t vaddr, uint64_t size) const;
  std::optional<uint64_t> vaddr_to_offset(uint64_t vaddr) const;
};

struct Patch {
  uint64_t file_offset = 0;
  std::vector<uint8_t> bytes;
};

// Parses the file into a LoadedBinary. Throws ElfError on anything that
// is not a well-formed x86-64 ELF executable or shared object.
LoadedBinary load_binary(const std::filesystem::path& path);

// Derives the sorted, merged list of function-byte regions.
// Throws NoSymbolsError when the symbol table yields no functions.
std::vector<CodeRegion> code_regions(const LoadedBinary& binary);

// Writes a copy of the image with the given byte patches applied.
// The output file has the same length as the input and keeps its
// permission bits. Throws PatchError on out-of-range or overlapping
// patches; the output file is not created in that case.
void write_patched(const LoadedBinary& binary, const std::vector<Patch>& patches,
                   const std::filesystem::path& out_path);

}  // namespace binmut

#endif  // BINMUT_ELF_IMAGE_HPP
