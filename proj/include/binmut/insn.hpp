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

#ifndef BINMUT_INSN_HPP
#define BINMUT_INSN_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>

namespace binmut {

// Behavioural buckets a mutation site can belong to. A single site may
// carry several (an ADD with an immediate is both Arithmetic and Constant).
enum class OperatorClass : uint8_t { Arithmetic, Logical, Conditional, Constant };

// Encoding shape of an instruction, as far as the rewriters care.
enum class InstKind : uint8_t {
  AluRM,        // ADD/OR/ADC/SBB/AND/SUB/XOR/CMP r/m,r or r,r/m forms
  AluImm,       // the same family with an immediate (group-1 or accumulator)
  MulDivGroup,  // F6/F7 group: TEST/NOT/NEG/MUL/IMUL/DIV/IDIV
  ShiftGroup,   // C0/C1/D0-D3 group: ROL..SAR
  IncDec,       // FE/FF group reg 0/1
  Jcc8,         // 70+cc rel8
  Jcc32,        // 0F 80+cc rel32
  JmpRel,       // E9/EB unconditional relative
  MovImm,       // B0-BF, C6/C7
  PushImm,      // 68/6A
  ImulImm,      // 69/6B three-operand IMUL
  Setcc,        // 0F 90+cc
  Opaque,       // decodable, length known, semantics not modelled
};

// Operation identity. Finer grained than InstKind: one kind covers many ops.
enum class Op : uint8_t {
  Add, Or, Adc, Sbb, And, Sub, Xor, Cmp,
  Test, Not, Neg, Mul, Imul, Div, Idiv,
  Shl, Shr, Sar, Rol, Ror, Rcl, Rcr,
  Inc, Dec,
  Mov, Push, Jmp, Jcc, Setcc, Nop,
  Other,
};

// An immediate operand field inside the encoded bytes.
struct ImmediateSlot {
  int64_t value = 0;         // two's-complement reading of the field
  uint8_t width = 0;         // field width in bytes: 1, 2, 4 or 8
  uint8_t offset = 0;        // byte offset of the field inside the instruction
  bool sign_extended = false;  // CPU widens the field to a larger operand
};

struct ConditionCode {
  uint8_t cc = 0;  // x86 condition nibble, 0..15
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Instruction {
  uint64_t vaddr = 0;
  uint8_t length = 0;
  std::array<uint8_t, 15> bytes{};
  InstKind kind = InstKind::Opaque;
  Op op = Op::Other;
  std::optional<ImmediateSlot> imm;
  std::optional<ConditionCode> cond;

  // Geometry used by the rewriters. opcode_offset points at the byte that
  // selects the operation (the second opcode byte for 0F-escaped maps).
  uint8_t opcode_offset = 0;
  uint8_t modrm_offset = 0xff;

  std::span<const uint8_t> raw() const { return {bytes.data(), length}; }
  bool has_modrm() const { return modrm_offset != 0xff; }
  uint8_t modrm() const { return bytes[modrm_offset]; }
  uint8_t modrm_reg() const { return (modrm() >> 3) & 7; }
};

// Decodes exactly one instruction from the front of `code`. Throws
// DecodeError when the bytes do not form a complete instruction whose
// length can be established (including truncation by the span end).
Instruction decode(std::span<const uint8_t> code, uint64_t vaddr);

// Maps an instruction to the class of mutations that target its operation
// itself (the Constant class for immediates is tracked separately).
std::optional<OperatorClass> classify(const Instruction& insn);

std::string_view kind_name(InstKind kind);
std::string_view op_name(Op op);
std::string_view class_name(OperatorClass cls);
std::optional<OperatorClass> class_from_name(std::string_view name);
std::optional<Op> op_from_name(std::string_view name);

}  // namespace binmut

#endif  // BINMUT_INSN_HPP
