// Copyright 2026 The PatchIndex Authors
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

// Cross-word "delete one bit" kernels used by the sharded bitmap.
//
// Bits are numbered LSB-first: bit b of a range lives in word b / 64 at
// position b % 64. Every kernel removes the bit at `from_offset` and moves all
// higher bits of the range down by one position; the top bit of the last word
// becomes zero.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace patchindex {

enum class ShiftKernel : uint8_t {
  kScalar,            // word loop with mask/shift/carry
  kWideLaneEmulated,  // 4-lane shift/permute/blend, portable lane emulation
  kWideLaneAvx2,      // the same lane algorithm on 256-bit AVX2 registers
  kAuto,              // kWideLaneAvx2 when the CPU supports it, else kScalar
};

std::string_view to_string(ShiftKernel kernel);

// True when the AVX2 kernel was compiled in and the running CPU supports it.
bool avx2_available();

// Resolves kAuto (and kWideLaneAvx2 on CPUs without AVX2) to a concrete kernel.
ShiftKernel resolve_kernel(ShiftKernel requested);

// `words` must be non-empty and from_offset < 64 * words.size().
void shift_down_one_scalar(std::span<uint64_t> words, uint64_t from_offset);
void shift_down_one_lanes(std::span<uint64_t> words, uint64_t from_offset);
void shift_down_one_avx2(std::span<uint64_t> words, uint64_t from_offset);

void shift_down_one(ShiftKernel kernel, std::span<uint64_t> words,
                    uint64_t from_offset);

}  // namespace patchindex
