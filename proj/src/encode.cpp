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

#include "binmut/encode.hpp"

#include <climits>

namespace binmut {

namespace {

// One-byte ALU family index (bits 5..3 of the opcode, or ModRM.reg for
// the 80/81/83 group).
std::optional<uint8_t> alu_family(Op op) {
  switch (op) {
    case Op::Add: return 0;
    case Op::Or: return 1;
    case Op::Adc: return 2;
    case Op::Sbb: return 3;
    case Op::And: return 4;
    case Op::Sub: return 5;
    case Op::Xor: return 6;
    default: return std::nullopt;  // CMP is never a swap participant
  }
}

std::optional<uint8_t> group3_reg(Op op) {
  switch (op) {
    case Op::Not: return 2;
    case Op::Neg: return 3;
    case Op::Mul: return 4;
    case Op::Imul: return 5;
    case Op::Div: return 6;
    case Op::Idiv: return 7;
    default: return std::nullopt;
  }
}

std::optional<uint8_t> shift_reg(Op op) {
  switch (op) {
    case Op::Shl: return 4;
    case Op::Shr: return 5;
    case Op::Sar: return 7;
    default: return std::nullopt;
  }
}

std::optional<OperatorClass> class_of_op(Op op) {
  switch (op) {
    case Op::Add: case Op::Adc: case Op::Sbb: case Op::Sub:
    case Op::Mul: case Op::Imul: case Op::Div: case Op::Idiv:
    case Op::Inc: case Op::Dec:
      return OperatorClass::Arithmetic;
    case Op::And: case Op::Or: case Op::Xor:
    case Op::Not: case Op::Neg:
    case Op::Shl: case Op::Shr: case Op::Sar:
      return OperatorClass::Logical;
    default:
      return std::nullopt;
  }
}

std::vector<uint8_t> with_modrm_reg(const Instruction& insn, uint8_t reg) {
  std::vector<uint8_t> out(insn.raw().begin(), insn.raw().end());
  out[insn.modrm_offset] = uint8_t((insn.modrm() & 0xC7) | (reg << 3));
  return out;
}

}  // namespace

bool fits_signed(int64_t value, uint8_t width) {
  if (width >= 8) return true;
  int64_t hi = (int64_t(1) << (8 * width - 1)) - 1;
  int64_t lo = -hi - 1;
  return value >= lo && value <= hi;
}

std::optional<std::vector<uint8_t>> encode_swap(const Instruction& insn, Op target) {
  if (target == insn.op) return std::nullopt;
  auto src_class = class_of_op(insn.op);
  auto dst_class = class_of_op(target);
  if (!src_class || !dst_class || *src_class != *dst_class) return std::nullopt;

  switch (insn.kind) {
    case InstKind::AluRM: {
      auto src = alu_family(insn.op);
      auto dst = alu_family(target);
      if (!src || !dst) return std::nullopt;
      std::vector<uint8_t> out(insn.raw().begin(), insn.raw().end());
      uint8_t old = out[insn.opcode_offset];
      out[insn.opcode_offset] = uint8_t((*dst << 3) | (old & 7));
      return out;
    }
    case InstKind::AluImm: {
      auto src = alu_family(insn.op);
      auto dst = alu_family(target);
      if (!src || !dst) return std::nullopt;
      if (insn.has_modrm()) return with_modrm_reg(insn, *dst);  // 80/81/83
      // Accumulator form: the family lives in the opcode byte.
      std::vector<uint8_t> out(insn.raw().begin(), insn.raw().end());
      uint8_t old = out[insn.opcode_offset];
      out[insn.opcode_offset] = uint8_t((*dst << 3) | (old & 7));
      return out;
    }
    case InstKind::MulDivGroup: {
      auto src = group3_reg(insn.op);
      auto dst = group3_reg(target);
      if (!src || !dst) return std::nullopt;
      // TEST forms carry an immediate the unary ops would misparse.
      if (insn.imm.has_value()) return std::nullopt;
      return with_modrm_reg(insn, *dst);
    }
    case InstKind::ShiftGroup: {
      auto src = shift_reg(insn.op);
      auto dst = shift_reg(target);
      if (!src || !dst) return std::nullopt;
      return with_modrm_reg(insn, *dst);
    }
    case InstKind::IncDec: {
      if (insn.op == Op::Inc && target == Op::Dec) return with_modrm_reg(insn, 1);
      if (insn.op == Op::Dec && target == Op::Inc) return with_modrm_reg(insn, 0);
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

std::optional<std::vector<uint8_t>> encode_force_jump(const Instruction& insn) {
  if (insn.kind == InstKind::Jcc8) {
    std::vector<uint8_t> out(insn.raw().begin(), insn.raw().end());
    out[insn.opcode_offset] = 0xEB;
    return out;
  }
  if (insn.kind == InstKind::Jcc32) {
    // 0F 8x d32 (6 bytes) -> E9 d32' 90. The jump shrinks by one byte, so
    // the displacement grows by one to hit the same target.
    size_t disp_off = size_t(insn.opcode_offset) + 1;
    int64_t disp = 0;
    {
      uint32_t raw = 0;
      for (int i = 0; i < 4; ++i) raw |= uint32_t(insn.bytes[disp_off + i]) << (8 * i);
      disp = int32_t(raw);
    }
    if (disp == INT32_MAX) return std::nullopt;
    uint32_t adjusted = uint32_t(int32_t(disp + 1));
    std::vector<uint8_t> out(insn.raw().begin(), insn.raw().end());
    size_t e9_off = size_t(insn.opcode_offset) - 1;  // overwrite the 0F byte
    out[e9_off] = 0xE9;
    for (int i = 0; i < 4; ++i) out[e9_off + 1 + i] = uint8_t(adjusted >> (8 * i));
    out[e9_off + 5] = 0x90;
    return out;
  }
  throw NotABranchError("not a conditional branch");
}

std::vector<uint8_t> encode_nop(size_t length) {
  if (length == 0) throw std::invalid_argument("cannot encode a zero-length NOP");
  return std::vector<uint8_t>(length, 0x90);
}

std::optional<std::vector<uint8_t>> patch_immediate(const Instruction& insn,
                                                    int64_t value) {
  if (!insn.imm.has_value()) throw NoImmediateError("instruction has no immediate");
  const ImmediateSlot& slot = *insn.imm;
  if (!fits_signed(value, slot.width)) return std::nullopt;
  std::vector<uint8_t> out(insn.raw().begin(), insn.raw().end());
  uint64_t raw = uint64_t(value);
  for (uint8_t i = 0; i < slot.width; ++i) {
    out[slot.offset + i] = uint8_t(raw >> (8 * i));
  }
  return out;
}

}  // namespace binmut
