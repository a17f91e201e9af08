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

#ifndef BINMUT_ENCODE_HPP
#define BINMUT_ENCODE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "binmut/insn.hpp"

namespace binmut {

class NotABranchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoImmediateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rewrites the instruction so it performs `target` instead of its own
// operation, keeping every operand and the byte length intact. Returns
// nullopt when the swap is not encodable in place, would cross an
// operator-class boundary, or is the identity.
std::optional<std::vector<uint8_t>> encode_swap(const Instruction& insn, Op target);

// Turns a conditional branch into an unconditional jump to the same
// target. Jcc rel8 becomes JMP rel8; Jcc rel32 becomes JMP rel32 plus a
// trailing NOP (the displacement is adjusted for the one-byte-shorter
// jump). Throws NotABranchError for non-Jcc instructions; returns nullopt
// in the single case where the adjusted displacement cannot be
// represented.
std::optional<std::vector<uint8_t>> encode_force_jump(const Instruction& insn);

// A NOP sled of exactly `length` bytes. `length` must be at least 1.
std::vector<uint8_t> encode_nop(size_t length);

// Replaces the instruction's immediate field with `value`. Throws
// NoImmediateError when the instruction has no immediate; returns nullopt
// when the value does not fit the field width.
std::optional<std::vector<uint8_t>> patch_immediate(const Instruction& insn,
                                                    int64_t value);

// True when `value` fits the signed range of a field of `width` bytes.
bool fits_signed(int64_t value, uint8_t width);

}  // namespace binmut

#endif  // BINMUT_ENCODE_HPP
