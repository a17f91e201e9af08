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

#include "binmut/elf_image.hpp"

#include <elf.h>

#include <algorithm>
#include <cstring>

#include "binmut/bytes.hpp"

namespace binmut {

namespace {

// Reads a POD header out of the image with an explicit bounds check.
template <typename T>
const T* view_at(const std::vector<uint8_t>& image, uint64_t offset) {
  if (offset > image.size() || image.size() - offset < sizeof(T)) return nullptr;
  return reinterpret_cast<const T*>(image.data() + offset);
}

std::string string_at(const std::vector<uint8_t>& image, uint64_t table_offset,
                      uint64_t table_size, uint32_t index) {
  if (index >= table_size) return {};
  uint64_t start = table_offset + index;
  uint64_t end = table_offset + table_size;
  if (start >= image.size()) return {};
  end = std::min<uint64_t>(end, image.size());
  const char* base = reinterpret_cast<const char*>(image.data());
  size_t len = ::strnlen(base + start, end - start);
  return std::string(base + start, len);
}

}  // namespace

const Section* LoadedBinary::section_containing(uint64_t vaddr, uint64_t size) const {
  for (const Section& sec : sections) {
    if (vaddr >= sec.vaddr && vaddr + size <= sec.vaddr + sec.size) return &sec;
  }
  return nullptr;
}

std::optional<uint64_t> LoadedBinary::vaddr_to_offset(uint64_t vaddr) const {
  for (const Section& sec : sections) {
    if (vaddr >= sec.vaddr && vaddr < sec.vaddr + sec.size) {
      return sec.file_offset + (vaddr - sec.vaddr);
    }
  }
  return std::nullopt;
}

LoadedBinary load_binary(const std::filesystem::path& path) {
  LoadedBinary binary;
  binary.path = path;
  binary.image = read_file_bytes(path);
  const auto& image = binary.image;

  if (image.size() < SELFMAG || std::memcmp(image.data(), ELFMAG, SELFMAG) != 0) {
    throw ElfError(ElfFault::NotElf, path.string() + ": not an ELF file");
  }
  const auto* ehdr = view_at<Elf64_Ehdr>(image, 0);
  if (ehdr == nullptr) {
    throw ElfError(ElfFault::Truncated, path.string() + ": truncated ELF header");
  }
  if (ehdr->e_ident[EI_CLASS] != ELFCLASS64 || ehdr->e_ident[EI_DATA] != ELFDATA2LSB) {
    throw ElfError(ElfFault::UnsupportedClass,
                   path.string() + ": only 64-bit little-endian ELF is supported");
  }
  if (ehdr->e_machine != EM_X86_64) {
    throw ElfError(ElfFault::UnsupportedClass,
                   path.string() + ": only x86-64 binaries are supported");
  }
  if (ehdr->e_type != ET_EXEC && ehdr->e_type != ET_DYN) {
    throw ElfError(ElfFault::UnsupportedClass,
                   path.string() + ": not an executable or shared object");
  }
  binary.entry = ehdr->e_entry;

  if (ehdr->e_shentsize != sizeof(Elf64_Shdr) || ehdr->e_shnum == 0) {
    throw ElfError(ElfFault::Truncated, path.string() + ": missing section headers");
  }
  uint64_t shdr_bytes = uint64_t(ehdr->e_shnum) * sizeof(Elf64_Shdr);
  if (ehdr->e_shoff > image.size() || image.size() - ehdr->e_shoff < shdr_bytes) {
    throw ElfError(ElfFault::Truncated, path.string() + ": section headers out of range");
  }
  const auto* shdrs = reinterpret_cast<const Elf64_Shdr*>(image.data() + ehdr->e_shoff);

  if (ehdr->e_shstrndx >= ehdr->e_shnum) {
    throw ElfError(ElfFault::Truncated, path.string() + ": bad section name table index");
  }
  const Elf64_Shdr& shstr = shdrs[ehdr->e_shstrndx];

  for (uint16_t i = 0; i < ehdr->e_shnum; ++i) {
    const Elf64_Shdr& sh = shdrs[i];
    if (sh.sh_type == SHT_NULL || sh.sh_type == SHT_NOBITS) continue;
    if (sh.sh_offset > image.size() || image.size() - sh.sh_offset < sh.sh_size) {
      throw ElfError(ElfFault::Truncated,
                     path.string() + ": section data out of range");
    }
    Section sec;
    sec.name = string_at(image, shstr.sh_offset, shstr.sh_size, sh.sh_name);
    sec.vaddr = sh.sh_addr;
    sec.file_offset = sh.sh_offset;
    sec.size = sh.sh_size;
    sec.executable = (sh.sh_flags & SHF_ALLOC) != 0 && (sh.sh_flags & SHF_EXECINSTR) != 0;
    binary.sections.push_back(std::move(sec));
  }

  // Collect defined function symbols from .symtab only; a stripped binary
  // keeps .dynsym but that is not enough to sweep code safely.
  for (uint16_t i = 0; i < ehdr->e_shnum; ++i) {
    const Elf64_Shdr& sh = shdrs[i];
    if (sh.sh_type != SHT_SYMTAB) continue;
    if (sh.sh_entsize != sizeof(Elf64_Sym) || sh.sh_link >= ehdr->e_shnum) continue;
    const Elf64_Shdr& str = shdrs[sh.sh_link];
    uint64_t count = sh.sh_size / sizeof(Elf64_Sym);
    const auto* syms = reinterpret_cast<const Elf64_Sym*>(image.data() + sh.sh_offset);
    for (uint64_t s = 0; s < count; ++s) {
      const Elf64_Sym& sym = syms[s];
      if (ELF64_ST_TYPE(sym.st_info) != STT_FUNC) continue;
      if (sym.st_size == 0) continue;
      if (sym.st_shndx == SHN_UNDEF || sym.st_shndx >= SHN_LORESERVE) continue;
      const Section* home = binary.section_containing(sym.st_value, sym.st_size);
      if (home == nullptr || !home->executable) continue;
      FunctionSymbol fn;
      fn.name = string_at(image, str.sh_offset, str.sh_size, sym.st_name);
      fn.vaddr = sym.st_value;
      fn.size = sym.st_size;
      binary.symbols.push_back(std::move(fn));
    }
  }

  return binary;
}

std::vector<CodeRegion> code_regions(const LoadedBinary& binary) {
  if (binary.symbols.empty()) {
    throw NoSymbolsError(binary.path.string() +
                         ": no sized function symbols (stripped binary?)");
  }
  std::vector<CodeRegion> raw;
  raw.reserve(binary.symbols.size());
  for (const FunctionSymbol& fn : binary.symbols) {
    auto off = binary.vaddr_to_offset(fn.vaddr);
    if (!off) continue;  // load_binary already filtered these, belt and braces
    raw.push_back({fn.vaddr, *off, fn.size});
  }
  std::sort(raw.begin(), raw.end(), [](const CodeRegion& a, const CodeRegion& b) {
    return a.vaddr < b.vaddr;
  });

  std::vector<CodeRegion> merged;
  for (const CodeRegion& r : raw) {
    if (!merged.empty()) {
      CodeRegion& last = merged.back();
      if (r.vaddr < last.vaddr + last.length) {
        // Aliased or overlapping symbols fold into one region.
        uint64_t end = std::max(last.vaddr + last.length, r.vaddr + r.length);
        last.length = end - last.vaddr;
        continue;
      }
    }
    merged.push_back(r);
  }
  return merged;
}

void write_patched(const LoadedBinary& binary, const std::vector<Patch>& patches,
                   const std::filesystem::path& out_path) {
  std::vector<std::pair<uint64_t, uint64_t>> ranges;  // [start, end)
  for (const Patch& p : patches) {
    if (p.file_offset > binary.image.size() ||
        binary.image.size() - p.file_offset < p.bytes.size()) {
      throw PatchError(PatchFault::OutOfBounds, "patch reaches past end of image");
    }
    if (!p.bytes.empty()) {
      ranges.emplace_back(p.file_offset, p.file_offset + p.bytes.size());
    }
  }
  std::sort(ranges.begin(), ranges.end());
  for (size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].first < ranges[i - 1].second) {
      throw PatchError(PatchFault::Overlapping, "patches overlap");
    }
  }

  std::vector<uint8_t> out = binary.image;
  for (const Patch& p : patches) {
    std::copy(p.bytes.begin(), p.bytes.end(), out.begin() + long(p.file_offset));
  }
  write_file_bytes(out_path, out);

  std::error_code ec;
  if (!binary.path.empty()) {
    auto st = std::filesystem::status(binary.path, ec);
    if (!ec) std::filesystem::permissions(out_path, st.permissions(), ec);
  }
}

}  // namespace binmut
