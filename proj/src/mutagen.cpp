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

#include "binmut/mutagen.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "binmut/bytes.hpp"
#include "binmut/encode.hpp"

namespace binmut {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr Op kArithTargets[] = {Op::Add, Op::Sub, Op::Adc, Op::Sbb, Op::Mul,
                                Op::Imul, Op::Div, Op::Idiv, Op::Inc, Op::Dec};
constexpr Op kLogicTargets[] = {Op::And, Op::Or,  Op::Xor, Op::Shl,
                                Op::Shr, Op::Sar, Op::Not, Op::Neg};

}  // namespace

std::string_view variant_name(MutationVariant variant) {
  switch (variant) {
    case MutationVariant::ArithSwap: return "arith-swap";
    case MutationVariant::LogicSwap: return "logic-swap";
    case MutationVariant::ForceTake: return "force-take";
    case MutationVariant::ForceFallthrough: return "force-fallthrough";
    case MutationVariant::ConstReplace: return "const-replace";
    case MutationVariant::Skip: return "skip";
  }
  return "skip";
}

std::optional<MutationVariant> variant_from_name(std::string_view name) {
  for (int i = 0; i <= int(MutationVariant::Skip); ++i) {
    if (variant_name(MutationVariant(i)) == name) return MutationVariant(i);
  }
  return std::nullopt;
}

std::vector<int64_t> constant_candidates(int64_t value, uint8_t width) {
  // Compute in 128 bits so the negation/offset of INT64_MIN-ish values
  // cannot wrap before the range check.
  __int128 c = value;
  const __int128 raw[6] = {-1, 0, 1, -c, c + 1, c - 1};
  std::vector<int64_t> out;
  for (__int128 v : raw) {
    if (v == c) continue;
    if (v < INT64_MIN || v > INT64_MAX) continue;
    int64_t v64 = int64_t(v);
    if (!fits_signed(v64, width)) continue;
    if (std::find(out.begin(), out.end(), v64) != out.end()) continue;
    out.push_back(v64);
  }
  return out;
}

std::vector<MutationSite> enumerate_sites(const LoadedBinary& binary) {
  std::vector<MutationSite> sites;
  uint32_t next_id = 0;
  for (const CodeRegion& region : code_regions(binary)) {
    std::vector<MutationSite> region_sites;
    uint64_t off = 0;
    bool ok = true;
    while (off < region.length) {
      std::span<const uint8_t> rest(binary.image.data() + region.file_offset + off,
                                    region.length - off);
      Instruction insn;
      try {
        insn = decode(rest, region.vaddr + off);
      } catch (const DecodeError& e) {
        std::cerr << "warning: skipping region at 0x" << std::hex << region.vaddr
                  << std::dec << " (+" << off << "): " << e.what() << "\n";
        ok = false;
        break;
      }
      ClassSet classes;
      if (auto cls = classify(insn)) classes.add(*cls);
      if (insn.imm.has_value()) classes.add(OperatorClass::Constant);
      if (insn.kind != InstKind::Opaque && !classes.empty()) {
        MutationSite site;
        site.vaddr = region.vaddr + off;
        site.file_offset = region.file_offset + off;
        site.insn = insn;
        site.classes = classes;
        region_sites.push_back(std::move(site));
      }
      off += insn.length;
    }
    if (!ok) continue;
    for (MutationSite& site : region_sites) {
      site.site_id = next_id++;
      sites.push_back(std::move(site));
    }
  }
  return sites;
}

std::vector<MutationOperator> candidates_for(const MutationSite& site) {
  std::vector<MutationOperator> out;
  const Instruction& insn = site.insn;

  if (site.classes.contains(OperatorClass::Arithmetic)) {
    for (Op target : kArithTargets) {
      if (target == insn.op) continue;
      if (encode_swap(insn, target).has_value()) {
        out.push_back({OperatorClass::Arithmetic, MutationVariant::ArithSwap,
                       target, std::nullopt});
      }
    }
  }
  if (site.classes.contains(OperatorClass::Logical)) {
    for (Op target : kLogicTargets) {
      if (target == insn.op) continue;
      if (encode_swap(insn, target).has_value()) {
        out.push_back({OperatorClass::Logical, MutationVariant::LogicSwap,
                       target, std::nullopt});
      }
    }
  }
  if (site.classes.contains(OperatorClass::Conditional) &&
      (insn.kind == InstKind::Jcc8 || insn.kind == InstKind::Jcc32)) {
    if (encode_force_jump(insn).has_value()) {
      out.push_back({OperatorClass::Conditional, MutationVariant::ForceTake,
                     std::nullopt, std::nullopt});
    }
    out.push_back({OperatorClass::Conditional, MutationVariant::ForceFallthrough,
                   std::nullopt, std::nullopt});
  }
  if (site.classes.contains(OperatorClass::Constant) && insn.imm.has_value()) {
    for (int64_t v : constant_candidates(insn.imm->value, insn.imm->width)) {
      out.push_back({OperatorClass::Constant, MutationVariant::ConstReplace,
                     std::nullopt, v});
    }
  }
  for (OperatorClass cls : {OperatorClass::Arithmetic, OperatorClass::Logical,
                            OperatorClass::Conditional}) {
    if (site.classes.contains(cls)) {
      out.push_back({cls, MutationVariant::Skip, std::nullopt, std::nullopt});
      break;
    }
  }
  return out;
}

Mutant instantiate(const MutationSite& site, const MutationOperator& op,
                   uint32_t mutant_id) {
  const Instruction& insn = site.insn;
  std::optional<std::vector<uint8_t>> patch;
  switch (op.variant) {
    case MutationVariant::ArithSwap:
    case MutationVariant::LogicSwap:
      patch = encode_swap(insn, op.target.value());
      break;
    case MutationVariant::ForceTake:
      patch = encode_force_jump(insn);
      break;
    case MutationVariant::ForceFallthrough:
    case MutationVariant::Skip:
      patch = encode_nop(insn.length);
      break;
    case MutationVariant::ConstReplace:
      patch = patch_immediate(insn, op.value.value());
      break;
  }
  if (!patch.has_value()) {
    throw UnencodableError("mutation is not encodable at this site");
  }
  if (patch->size() != insn.length) {
    throw UnencodableError("rewrite does not preserve instruction length");
  }
  if (std::equal(patch->begin(), patch->end(), insn.raw().begin(), insn.raw().end())) {
    throw IdenticalBytesError("rewrite leaves the bytes unchanged");
  }
  Mutant m;
  m.mutant_id = mutant_id;
  m.site = site;
  m.op = op;
  m.patch = std::move(*patch);
  return m;
}

std::vector<Mutant> enumerate_all(const LoadedBinary& binary) {
  std::vector<Mutant> mutants;
  uint32_t next_id = 0;
  for (const MutationSite& site : enumerate_sites(binary)) {
    std::set<std::vector<uint8_t>> seen;
    for (const MutationOperator& op : candidates_for(site)) {
      Mutant m = instantiate(site, op, next_id);
      if (!seen.insert(m.patch).second) continue;  // duplicate patch bytes
      ++next_id;
      mutants.push_back(std::move(m));
    }
  }
  return mutants;
}

MutantRecord to_record(const Mutant& mutant) {
  MutantRecord rec;
  rec.mutant_id = mutant.mutant_id;
  rec.vaddr = mutant.site.vaddr;
  rec.file_offset = mutant.site.file_offset;
  rec.cls = mutant.op.cls;
  rec.variant = mutant.op.variant;
  rec.target = mutant.op.target;
  rec.value = mutant.op.value;
  rec.original.assign(mutant.site.insn.raw().begin(), mutant.site.insn.raw().end());
  rec.patch = mutant.patch;
  return rec;
}

void write_mutant_records(const std::vector<MutantRecord>& records,
                          std::ostream& out) {
  for (const MutantRecord& rec : records) {
    ordered_json j;
    j["mutant_id"] = rec.mutant_id;
    j["vaddr"] = rec.vaddr;
    j["file_offset"] = rec.file_offset;
    j["class"] = class_name(rec.cls);
    j["variant"] = variant_name(rec.variant);
    if (rec.target) j["target"] = op_name(*rec.target);
    if (rec.value) j["value"] = *rec.value;
    j["original"] = to_hex(rec.original);
    j["patch"] = to_hex(rec.patch);
    out << j.dump() << "\n";
  }
}

void write_mutant_records(const std::vector<MutantRecord>& records,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_mutant_records(records, out);
}

std::vector<MutantRecord> read_mutant_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<MutantRecord> records;
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
    MutantRecord rec;
    rec.mutant_id = j.at("mutant_id").get<uint32_t>();
    rec.vaddr = j.at("vaddr").get<uint64_t>();
    rec.file_offset = j.at("file_offset").get<uint64_t>();
    auto cls = class_from_name(j.at("class").get<std::string>());
    auto variant = variant_from_name(j.at("variant").get<std::string>());
    if (!cls || !variant) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": unknown class or variant");
    }
    rec.cls = *cls;
    rec.variant = *variant;
    if (j.contains("target")) {
      auto target = op_from_name(j.at("target").get<std::string>());
      if (!target) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": unknown target op");
      }
      rec.target = *target;
    }
    if (j.contains("value")) rec.value = j.at("value").get<int64_t>();
    rec.original = from_hex(j.at("original").get<std::string>());
    rec.patch = from_hex(j.at("patch").get<std::string>());
    if (rec.patch.size() != rec.original.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": patch length differs from original");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace binmut
