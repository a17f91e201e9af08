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

#include "binmut/insn.hpp"

#include <cstring>

namespace binmut {

namespace {

// Immediate field widths, resolved against the active prefixes.
enum ImmKind : uint8_t {
  IMM_NONE,
  IMM_B,   // 1 byte
  IMM_W,   // 2 bytes
  IMM_Z,   // 2 for 16-bit operands, else 4 (REX.W outranks 0x66)
  IMM_V,   // 8 with REX.W, else like Z
  IMM_O,   // memory offset: 4 with 0x67, else 8
  IMM_WB,  // 2 + 1 (ENTER)
};

struct OpSpec {
  bool valid = false;
  bool modrm = false;
  ImmKind imm = IMM_NONE;
};

constexpr OpSpec kInvalid{};
constexpr OpSpec plain() { return {true, false, IMM_NONE}; }
constexpr OpSpec rm() { return {true, true, IMM_NONE}; }
constexpr OpSpec rm_imm(ImmKind k) { return {true, true, k}; }
constexpr OpSpec imm_only(ImmKind k) { return {true, false, k}; }

constexpr std::array<OpSpec, 256> make_one_byte_map() {
  std::array<OpSpec, 256> t{};
  // ALU family block 00..3D. Per family: four r/m forms, then AL,imm8
  // and eAX,immz. The 0x06/0x07 style slots are invalid in 64-bit mode.
  for (int fam = 0; fam < 8; ++fam) {
    int base = fam * 8;
    for (int i = 0; i < 4; ++i) t[base + i] = rm();
    t[base + 4] = imm_only(IMM_B);
    t[base + 5] = imm_only(IMM_Z);
  }
  for (int b = 0x50; b <= 0x5F; ++b) t[b] = plain();
  t[0x63] = rm();  // MOVSXD
  t[0x68] = imm_only(IMM_Z);
  t[0x69] = rm_imm(IMM_Z);
  t[0x6A] = imm_only(IMM_B);
  t[0x6B] = rm_imm(IMM_B);
  for (int b = 0x6C; b <= 0x6F; ++b) t[b] = plain();
  for (int b = 0x70; b <= 0x7F; ++b) t[b] = imm_only(IMM_B);  // Jcc rel8
  t[0x80] = rm_imm(IMM_B);
  t[0x81] = rm_imm(IMM_Z);
  t[0x83] = rm_imm(IMM_B);
  for (int b = 0x84; b <= 0x8E; ++b) t[b] = rm();
  t[0x8F] = rm();
  for (int b = 0x90; b <= 0x99; ++b) t[b] = plain();
  for (int b = 0x9B; b <= 0x9F; ++b) t[b] = plain();
  for (int b = 0xA0; b <= 0xA3; ++b) t[b] = imm_only(IMM_O);  // MOV moffs
  for (int b = 0xA4; b <= 0xA7; ++b) t[b] = plain();
  t[0xA8] = imm_only(IMM_B);
  t[0xA9] = imm_only(IMM_Z);
  for (int b = 0xAA; b <= 0xAF; ++b) t[b] = plain();
  for (int b = 0xB0; b <= 0xB7; ++b) t[b] = imm_only(IMM_B);
  for (int b = 0xB8; b <= 0xBF; ++b) t[b] = imm_only(IMM_V);
  t[0xC0] = rm_imm(IMM_B);
  t[0xC1] = rm_imm(IMM_B);
  t[0xC2] = imm_only(IMM_W);
  t[0xC3] = plain();
  t[0xC6] = rm_imm(IMM_B);
  t[0xC7] = rm_imm(IMM_Z);
  t[0xC8] = imm_only(IMM_WB);  // ENTER imm16, imm8
  t[0xC9] = plain();
  t[0xCA] = imm_only(IMM_W);
  t[0xCB] = plain();
  t[0xCC] = plain();
  t[0xCD] = imm_only(IMM_B);
  t[0xCF] = plain();
  for (int b = 0xD0; b <= 0xD3; ++b) t[b] = rm();
  t[0xD7] = plain();
  for (int b = 0xD8; b <= 0xDF; ++b) t[b] = rm();  // x87
  for (int b = 0xE0; b <= 0xE7; ++b) t[b] = imm_only(IMM_B);
  t[0xE8] = imm_only(IMM_Z);
  t[0xE9] = imm_only(IMM_Z);
  t[0xEB] = imm_only(IMM_B);
  for (int b = 0xEC; b <= 0xEF; ++b) t[b] = plain();
  t[0xF1] = plain();
  t[0xF4] = plain();
  t[0xF5] = plain();
  t[0xF6] = rm();  // group 3: imm present for reg 0/1, resolved later
  t[0xF7] = rm();
  for (int b = 0xF8; b <= 0xFD; ++b) t[b] = plain();
  t[0xFE] = rm();
  t[0xFF] = rm();
  return t;
}

constexpr std::array<OpSpec, 256> make_two_byte_map() {
  std::array<OpSpec, 256> t{};
  for (int b = 0x00; b <= 0x03; ++b) t[b] = rm();
  t[0x05] = plain();  // SYSCALL
  for (int b = 0x06; b <= 0x09; ++b) t[b] = plain();
  t[0x0B] = plain();  // UD2
  t[0x0D] = rm();     // PREFETCH
  t[0x0E] = plain();  // FEMMS
  for (int b = 0x10; b <= 0x23; ++b) t[b] = rm();
  for (int b = 0x28; b <= 0x2F; ++b) t[b] = rm();
  for (int b = 0x30; b <= 0x35; ++b) t[b] = plain();
  t[0x37] = plain();
  for (int b = 0x40; b <= 0x4F; ++b) t[b] = rm();  // CMOVcc
  for (int b = 0x50; b <= 0x6F; ++b) t[b] = rm();
  for (int b = 0x70; b <= 0x73; ++b) t[b] = rm_imm(IMM_B);  // PSHUF*, shift groups
  for (int b = 0x74; b <= 0x76; ++b) t[b] = rm();
  t[0x77] = plain();  // EMMS
  t[0x78] = rm();
  t[0x79] = rm();
  for (int b = 0x7C; b <= 0x7F; ++b) t[b] = rm();
  for (int b = 0x80; b <= 0x8F; ++b) t[b] = imm_only(IMM_Z);  // Jcc rel32
  for (int b = 0x90; b <= 0x9F; ++b) t[b] = rm();             // SETcc
  t[0xA0] = plain();
  t[0xA1] = plain();
  t[0xA2] = plain();  // CPUID
  t[0xA3] = rm();
  t[0xA4] = rm_imm(IMM_B);  // SHLD imm8
  t[0xA5] = rm();
  t[0xA8] = plain();
  t[0xA9] = plain();
  t[0xAA] = plain();
  t[0xAB] = rm();
  t[0xAC] = rm_imm(IMM_B);  // SHRD imm8
  t[0xAD] = rm();
  t[0xAE] = rm();  // group 15, fences
  t[0xAF] = rm();  // IMUL r, r/m
  t[0xB0] = rm();
  t[0xB1] = rm();
  for (int b = 0xB2; b <= 0xB9; ++b) t[b] = rm();
  t[0xBA] = rm_imm(IMM_B);  // group 8 (BT/BTS/BTR/BTC imm8)
  for (int b = 0xBB; b <= 0xBF; ++b) t[b] = rm();
  t[0xC0] = rm();
  t[0xC1] = rm();
  t[0xC2] = rm_imm(IMM_B);  // CMPPS
  t[0xC3] = rm();
  t[0xC4] = rm_imm(IMM_B);
  t[0xC5] = rm_imm(IMM_B);
  t[0xC6] = rm_imm(IMM_B);  // SHUFPS
  t[0xC7] = rm();           // group 9
  for (int b = 0xC8; b <= 0xCF; ++b) t[b] = plain();  // BSWAP
  for (int b = 0xD0; b <= 0xFE; ++b) t[b] = rm();
  t[0xFF] = rm();  // UD0
  return t;
}

constexpr auto kOneByte = make_one_byte_map();
constexpr auto kTwoByte = make_two_byte_map();

struct Prefixes {
  bool osize = false;  // 0x66
  bool asize = false;  // 0x67
  uint8_t rex = 0;     // 0x40..0x4F, zero if absent or cancelled
  uint8_t rep = 0;     // 0xF2 or 0xF3
  bool lock = false;
  bool rex_w() const { return (rex & 0x08) != 0; }
};

struct Fetcher {
  std::span<const uint8_t> code;
  size_t pos = 0;

  uint8_t peek() const {
    if (pos >= code.size()) throw DecodeError("truncated instruction");
    if (pos >= 15) throw DecodeError("instruction exceeds 15 bytes");
    return code[pos];
  }
  uint8_t take() {
    uint8_t b = peek();
    ++pos;
    return b;
  }
  uint64_t take_le(size_t n) {
    uint64_t v = 0;
    for (size_t i = 0; i < n; ++i) v |= uint64_t(take()) << (8 * i);
    return v;
  }
};

bool is_legacy_prefix(uint8_t b) {
  switch (b) {
    case 0x26: case 0x2E: case 0x36: case 0x3E:
    case 0x64: case 0x65: case 0x66: case 0x67:
    case 0xF0: case 0xF2: case 0xF3:
      return true;
    default:
      return false;
  }
}

enum class Map { One, Two, Three38, Three3A };

constexpr Op kAluFamily[8] = {Op::Add, Op::Or,  Op::Adc, Op::Sbb,
                              Op::And, Op::Sub, Op::Xor, Op::Cmp};
constexpr Op kGroup3[8] = {Op::Test, Op::Test, Op::Not, Op::Neg,
                           Op::Mul,  Op::Imul, Op::Div, Op::Idiv};
constexpr Op kShiftGroup[8] = {Op::Rol, Op::Ror, Op::Rcl, Op::Rcr,
                               Op::Shl, Op::Shr, Op::Shl, Op::Sar};

int64_t sign_extend(uint64_t raw, size_t bytes) {
  if (bytes >= 8) return int64_t(raw);
  uint64_t shift = 64 - 8 * bytes;
  return int64_t(raw << shift) >> shift;
}

}  // namespace

Instruction decode(std::span<const uint8_t> code, uint64_t vaddr) {
  Fetcher f{code};
  Prefixes pfx;

  for (;;) {
    uint8_t b = f.peek();
    if (is_legacy_prefix(b)) {
      switch (b) {
        case 0x66: pfx.osize = true; break;
        case 0x67: pfx.asize = true; break;
        case 0xF0: pfx.lock = true; break;
        case 0xF2: case 0xF3: pfx.rep = b; break;
        default: break;  // segment overrides do not change layout
      }
      pfx.rex = 0;  // REX only counts immediately before the opcode
      f.take();
      continue;
    }
    if ((b & 0xF0) == 0x40) {
      pfx.rex = b;
      f.take();
      continue;
    }
    break;
  }

  Map map = Map::One;
  uint8_t opcode = 0;
  size_t opcode_off = 0;
  bool vex = false;
  bool vex_w = false;

  uint8_t first = f.take();
  if (first == 0xC4 && pfx.rex == 0) {  // three-byte VEX
    vex = true;
    uint8_t b1 = f.take();
    uint8_t b2 = f.take();
    vex_w = (b2 & 0x80) != 0;
    uint8_t pp = b2 & 3;
    if (pp == 1) pfx.osize = true;
    switch (b1 & 0x1F) {
      case 1: map = Map::Two; break;
      case 2: map = Map::Three38; break;
      case 3: map = Map::Three3A; break;
      default: throw DecodeError("unsupported VEX map");
    }
    opcode_off = f.pos;
    opcode = f.take();
  } else if (first == 0xC5 && pfx.rex == 0) {  // two-byte VEX
    vex = true;
    uint8_t b1 = f.take();
    if ((b1 & 3) == 1) pfx.osize = true;
    map = Map::Two;
    opcode_off = f.pos;
    opcode = f.take();
  } else if (first == 0x0F) {
    uint8_t second = f.take();
    if (second == 0x38) {
      map = Map::Three38;
      opcode_off = f.pos;
      opcode = f.take();
    } else if (second == 0x3A) {
      map = Map::Three3A;
      opcode_off = f.pos;
      opcode = f.take();
    } else {
      map = Map::Two;
      opcode_off = f.pos - 1;
      opcode = second;
    }
  } else {
    opcode_off = f.pos - 1;
    opcode = first;
  }

  OpSpec spec;
  switch (map) {
    case Map::One: spec = kOneByte[opcode]; break;
    case Map::Two: spec = kTwoByte[opcode]; break;
    case Map::Three38: spec = rm(); break;
    case Map::Three3A: spec = rm_imm(IMM_B); break;
  }
  if (!spec.valid) throw DecodeError("unknown opcode");

  size_t modrm_off = size_t(-1);
  uint8_t modrm = 0;
  if (spec.modrm) {
    modrm_off = f.pos;
    modrm = f.take();
    uint8_t mod = modrm >> 6;
    uint8_t rmf = modrm & 7;
    if (mod != 3) {
      uint8_t base = rmf;
      if (rmf == 4) base = f.take() & 7;  // SIB
      if (mod == 1) {
        f.take();
      } else if (mod == 2 || (mod == 0 && (rmf == 5 || (rmf == 4 && base == 5)))) {
        f.take_le(4);
      }
    }
  }
  uint8_t reg = (modrm >> 3) & 7;

  ImmKind ik = spec.imm;
  if (!vex && map == Map::One && (opcode == 0xF6 || opcode == 0xF7)) {
    if (reg <= 1) ik = (opcode == 0xF6) ? IMM_B : IMM_Z;
  }
  bool rex_w = vex ? vex_w : pfx.rex_w();
  // PUSH imm and relative branches default to 64-bit operands, so REX.W
  // never widens their immediate field.
  bool default64 = (map == Map::One && (opcode == 0x68 || opcode == 0xE8 || opcode == 0xE9)) ||
                   (map == Map::Two && opcode >= 0x80 && opcode <= 0x8F);
  size_t imm_len = 0;
  switch (ik) {
    case IMM_NONE: break;
    case IMM_B: imm_len = 1; break;
    case IMM_W: imm_len = 2; break;
    case IMM_Z: imm_len = (!default64 && rex_w) ? 4 : (pfx.osize ? 2 : 4); break;
    case IMM_V: imm_len = rex_w ? 8 : (pfx.osize ? 2 : 4); break;
    case IMM_O: imm_len = pfx.asize ? 4 : 8; break;
    case IMM_WB: imm_len = 3; break;
  }
  size_t imm_off = f.pos;
  uint64_t imm_raw = f.take_le(imm_len);

  Instruction insn;
  insn.vaddr = vaddr;
  insn.length = uint8_t(f.pos);
  std::memcpy(insn.bytes.data(), code.data(), f.pos);
  insn.opcode_offset = uint8_t(opcode_off);
  insn.modrm_offset = spec.modrm ? uint8_t(modrm_off) : uint8_t(0xff);
  insn.kind = InstKind::Opaque;
  insn.op = Op::Other;

  auto set_imm = [&](bool widened) {
    insn.imm = ImmediateSlot{sign_extend(imm_raw, imm_len), uint8_t(imm_len),
                             uint8_t(imm_off), widened};
  };

  if (vex) return insn;  // length only

  if (map == Map::One) {
    if (opcode <= 0x3D && (opcode & 7) <= 5) {
      uint8_t fam = opcode >> 3;
      uint8_t form = opcode & 7;
      insn.op = kAluFamily[fam];
      if (form <= 3) {
        insn.kind = InstKind::AluRM;
      } else {
        insn.kind = InstKind::AluImm;
        // AL,imm8 and eAX,immz forms: the field matches the operand except
        // for the 64-bit case, where imm32 is sign-extended.
        set_imm(form == 5 && rex_w);
      }
    } else if (opcode == 0x68) {
      insn.kind = InstKind::PushImm;
      insn.op = Op::Push;
      set_imm(!pfx.osize);  // imm32 widens to the 64-bit stack slot
    } else if (opcode == 0x6A) {
      insn.kind = InstKind::PushImm;
      insn.op = Op::Push;
      set_imm(true);
    } else if (opcode == 0x69 || opcode == 0x6B) {
      insn.kind = InstKind::ImulImm;
      insn.op = Op::Imul;
      set_imm(opcode == 0x6B || (rex_w));
    } else if (opcode >= 0x70 && opcode <= 0x7F) {
      insn.kind = InstKind::Jcc8;
      insn.op = Op::Jcc;
      insn.cond = ConditionCode{uint8_t(opcode & 15)};
    } else if (opcode == 0x80 || opcode == 0x81 || opcode == 0x83) {
      insn.kind = InstKind::AluImm;
      insn.op = kAluFamily[reg];
      bool widened = opcode == 0x83 || (opcode == 0x81 && rex_w);
      set_imm(widened);
    } else if (opcode == 0x84 || opcode == 0x85) {
      insn.op = Op::Test;
    } else if (opcode >= 0x88 && opcode <= 0x8B) {
      insn.op = Op::Mov;
    } else if (opcode == 0x90 && pfx.rep == 0 && (pfx.rex & 1) == 0) {
      insn.op = Op::Nop;
    } else if (opcode == 0xA8 || opcode == 0xA9) {
      insn.kind = InstKind::AluImm;
      insn.op = Op::Test;
      set_imm(opcode == 0xA9 && rex_w);
    } else if (opcode >= 0xB0 && opcode <= 0xB7) {
      insn.kind = InstKind::MovImm;
      insn.op = Op::Mov;
      set_imm(false);
    } else if (opcode >= 0xB8 && opcode <= 0xBF) {
      insn.kind = InstKind::MovImm;
      insn.op = Op::Mov;
      set_imm(false);  // the field always matches the destination width
    } else if (opcode == 0xC0 || opcode == 0xC1 || (opcode >= 0xD0 && opcode <= 0xD3)) {
      insn.kind = InstKind::ShiftGroup;
      insn.op = kShiftGroup[reg];
      if (ik != IMM_NONE) set_imm(false);  // shift count, masked by hardware
    } else if (opcode == 0xC6 || opcode == 0xC7) {
      if (reg != 0) throw DecodeError("unknown opcode");
      insn.kind = InstKind::MovImm;
      insn.op = Op::Mov;
      set_imm(opcode == 0xC7 && rex_w);
    } else if (opcode == 0xE9 || opcode == 0xEB) {
      insn.kind = InstKind::JmpRel;
      insn.op = Op::Jmp;
    } else if (opcode == 0xF6 || opcode == 0xF7) {
      insn.kind = InstKind::MulDivGroup;
      insn.op = kGroup3[reg];
      if (ik != IMM_NONE) set_imm(opcode == 0xF7 && rex_w);
    } else if (opcode == 0xFE || opcode == 0xFF) {
      if (opcode == 0xFE && reg > 1) throw DecodeError("unknown opcode");
      if (opcode == 0xFF && reg == 7) throw DecodeError("unknown opcode");
      if (reg <= 1) {
        insn.kind = InstKind::IncDec;
        insn.op = reg == 0 ? Op::Inc : Op::Dec;
      } else if (opcode == 0xFF && reg == 6) {
        insn.op = Op::Push;
      }
    }
  } else if (map == Map::Two) {
    if (opcode >= 0x80 && opcode <= 0x8F) {
      insn.kind = InstKind::Jcc32;
      insn.op = Op::Jcc;
      insn.cond = ConditionCode{uint8_t(opcode & 15)};
    } else if (opcode >= 0x90 && opcode <= 0x9F) {
      insn.kind = InstKind::Setcc;
      insn.op = Op::Setcc;
      insn.cond = ConditionCode{uint8_t(opcode & 15)};
    } else if (opcode == 0xAF) {
      insn.op = Op::Imul;  // two-operand form, not rewritable in place
    } else if (opcode >= 0xB6 && opcode <= 0xBF && spec.imm == IMM_NONE) {
      insn.op = Op::Mov;  // MOVZX/MOVSX and friends
    }
  }

  return insn;
}

std::optional<OperatorClass> classify(const Instruction& insn) {
  if (insn.kind == InstKind::Opaque) return std::nullopt;
  switch (insn.op) {
    case Op::Add: case Op::Adc: case Op::Sbb: case Op::Sub:
    case Op::Mul: case Op::Imul: case Op::Div: case Op::Idiv:
    case Op::Inc: case Op::Dec:
      return OperatorClass::Arithmetic;
    case Op::And: case Op::Or: case Op::Xor:
    case Op::Not: case Op::Neg:
    case Op::Shl: case Op::Shr: case Op::Sar:
      return OperatorClass::Logical;
    case Op::Jcc: case Op::Setcc:
      return OperatorClass::Conditional;
    default:
      return std::nullopt;
  }
}

std::string_view kind_name(InstKind kind) {
  switch (kind) {
    case InstKind::AluRM: return "alu-rm";
    case InstKind::AluImm: return "alu-imm";
    case InstKind::MulDivGroup: return "muldiv-group";
    case InstKind::ShiftGroup: return "shift-group";
    case InstKind::IncDec: return "inc-dec";
    case InstKind::Jcc8: return "jcc8";
    case InstKind::Jcc32: return "jcc32";
    case InstKind::JmpRel: return "jmp-rel";
    case InstKind::MovImm: return "mov-imm";
    case InstKind::PushImm: return "push-imm";
    case InstKind::ImulImm: return "imul-imm";
    case InstKind::Setcc: return "setcc";
    case InstKind::Opaque: return "opaque";
  }
  return "opaque";
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Add: return "add";
    case Op::Or: return "or";
    case Op::Adc: return "adc";
    case Op::Sbb: return "sbb";
    case Op::And: return "and";
    case Op::Sub: return "sub";
    case Op::Xor: return "xor";
    case Op::Cmp: return "cmp";
    case Op::Test: return "test";
    case Op::Not: return "not";
    case Op::Neg: return "neg";
    case Op::Mul: return "mul";
    case Op::Imul: return "imul";
    case Op::Div: return "div";
    case Op::Idiv: return "idiv";
    case Op::Shl: return "shl";
    case Op::Shr: return "shr";
    case Op::Sar: return "sar";
    case Op::Rol: return "rol";
    case Op::Ror: return "ror";
    case Op::Rcl: return "rcl";
    case Op::Rcr: return "rcr";
    case Op::Inc: return "inc";
    case Op::Dec: return "dec";
    case Op::Mov: return "mov";
    case Op::Push: return "push";
    case Op::Jmp: return "jmp";
    case Op::Jcc: return "jcc";
    case Op::Setcc: return "setcc";
    case Op::Nop: return "nop";
    case Op::Other: return "other";
  }
  return "other";
}

std::string_view class_name(OperatorClass cls) {
  switch (cls) {
    case OperatorClass::Arithmetic: return "arithmetic";
    case OperatorClass::Logical: return "logical";
    case OperatorClass::Conditional: return "conditional";
    case OperatorClass::Constant: return "constant";
  }
  return "arithmetic";
}

std::optional<OperatorClass> class_from_name(std::string_view name) {
  if (name == "arithmetic") return OperatorClass::Arithmetic;
  if (name == "logical") return OperatorClass::Logical;
  if (name == "conditional") return OperatorClass::Conditional;
  if (name == "constant") return OperatorClass::Constant;
  return std::nullopt;
}

std::optional<Op> op_from_name(std::string_view name) {
  for (int i = 0; i <= int(Op::Other); ++i) {
    if (op_name(Op(i)) == name) return Op(i);
  }
  return std::nullopt;
}

}  // namespace binmut
