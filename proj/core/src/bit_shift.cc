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

#include "patchindex/bit_shift.h"

#include <array>
#include <cassert>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define PATCHINDEX_HAS_AVX2_KERNEL 1
#else
#define PATCHINDEX_HAS_AVX2_KERNEL 0
#endif

namespace patchindex {

namespace {

inline uint64_t low_mask(uint64_t bits) {
  return bits == 0 ? 0 : (~uint64_t{0} >> (64 - bits));
}

// Word holding `from_offset`: bits below the offset stay, the rest moves down
// and the top receives `carry`.
inline uint64_t shift_first_word(uint64_t word, uint64_t in_word_offset,
                                 uint64_t carry) {
  const uint64_t keep = low_mask(in_word_offset);
  return (word & keep) | ((word >> 1) & ~keep) | (carry << 63);
}

// Portable model of four 64-bit lanes with the AVX2 operations used below.
struct Lanes4 {
  std::array<uint64_t, 4> v{};

  static Lanes4 load(const uint64_t* p) { return {{p[0], p[1], p[2], p[3]}}; }
  void store(uint64_t* p) const {
    for (int i = 0; i < 4; ++i) p[i] = v[i];
  }
  Lanes4 shl(unsigned s) const {
    return {{v[0] << s, v[1] << s, v[2] << s, v[3] << s}};
  }
  Lanes4 shr(unsigned s) const {
    return {{v[0] >> s, v[1] >> s, v[2] >> s, v[3] >> s}};
  }
  Lanes4 operator|(const Lanes4& o) const {
    return {{v[0] | o.v[0], v[1] | o.v[1], v[2] | o.v[2], v[3] | o.v[3]}};
  }
  // _mm256_permute4x64_epi64: lane i takes lane (imm >> 2i) & 3.
  Lanes4 permute(unsigned imm) const {
    Lanes4 r;
    for (unsigned i = 0; i < 4; ++i) r.v[i] = v[(imm >> (2 * i)) & 3];
    return r;
  }
  // _mm256_blend_epi32: 32-bit half i comes from `b` when bit i of imm is set.
  static Lanes4 blend32(const Lanes4& a, const Lanes4& b, unsigned imm) {
    Lanes4 r;
    for (unsigned i = 0; i < 4; ++i) {
      const uint64_t lo = (imm >> (2 * i)) & 1 ? b.v[i] : a.v[i];
      const uint64_t hi = (imm >> (2 * i + 1)) & 1 ? b.v[i] : a.v[i];
      r.v[i] = (lo & 0xFFFFFFFFull) | (hi & 0xFFFFFFFF00000000ull);
    }
    return r;
  }
};

// Descending pass over the full words [first, end) in blocks of four. Returns
// the number of words left unprocessed at the low end; `carry` is the old bit 0
// of the lowest processed word (or the incoming carry if nothing ran).
size_t shift_blocks_lanes(uint64_t* words, size_t first, size_t end,
                          uint64_t& carry) {
  Lanes4 bits;
  bits.v[3] = carry << 63;
  size_t j = end;
  bool ran = false;
  while (j >= first + 4) {
    j -= 4;
    Lanes4 x = Lanes4::load(words + j);
    Lanes4 y = x.shl(63);
    bits = Lanes4::blend32(bits, y, 0x03);
    Lanes4 rotated = y.permute(0xF9);
    rotated = Lanes4::blend32(rotated, bits, 0xC0);
    bits = bits.permute(0x24);
    x = x.shr(1);
    x = x | rotated;
    x.store(words + j);
    ran = true;
  }
  if (ran) carry = bits.v[3] >> 63;
  return j - first;
}

#if PATCHINDEX_HAS_AVX2_KERNEL
__attribute__((target("avx2"))) size_t shift_blocks_avx2(uint64_t* words,
                                                         size_t first,
                                                         size_t end,
                                                         uint64_t& carry) {
  const __m256i shift63 = _mm256_set1_epi64x(63);
  const __m256i shift1 = _mm256_set1_epi64x(1);
  __m256i bits = _mm256_set_epi64x(static_cast<int64_t>(carry << 63), 0, 0, 0);
  size_t j = end;
  bool ran = false;
  while (j >= first + 4) {
    j -= 4;
    __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words + j));
    __m256i y = _mm256_sllv_epi64(x, shift63);
    bits = _mm256_blend_epi32(bits, y, 0x03);
    __m256i rotated = _mm256_permute4x64_epi64(y, 0xF9);
    rotated = _mm256_blend_epi32(rotated, bits, 0xC0);
    bits = _mm256_permute4x64_epi64(bits, 0x24);
    x = _mm256_srlv_epi64(x, shift1);
    x = _mm256_or_si256(x, rotated);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(words + j), x);
    ran = true;
  }
  if (ran) {
    carry = static_cast<uint64_t>(_mm256_extract_epi64(bits, 3)) >> 63;
  }
  return j - first;
}
#endif

using BlockFn = size_t (*)(uint64_t*, size_t, size_t, uint64_t&);

void shift_with_blocks(std::span<uint64_t> words, uint64_t from_offset,
                       BlockFn blocks) {
  assert(!words.empty() && from_offset < 64 * words.size());
  const size_t first_word = from_offset / 64;
  uint64_t* data = words.data();
  uint64_t carry = 0;
  size_t left = blocks(data, first_word + 1, words.size(), carry);
  for (size_t k = first_word + left; k > first_word; --k) {
    const uint64_t old = data[k];
    data[k] = (old >> 1) | (carry << 63);
    carry = old & 1;
  }
  data[first_word] = shift_first_word(data[first_word], from_offset % 64, carry);
}

}  // namespace

std::string_view to_string(ShiftKernel kernel) {
  switch (kernel) {
    case ShiftKernel::kScalar:
      return "scalar";
    case ShiftKernel::kWideLaneEmulated:
      return "widelane-emulated";
    case ShiftKernel::kWideLaneAvx2:
      return "widelane-avx2";
    case ShiftKernel::kAuto:
      return "auto";
  }
  return "unknown";
}

bool avx2_available() {
#if PATCHINDEX_HAS_AVX2_KERNEL
  static const bool available = __builtin_cpu_supports("avx2");
  return available;
#else
  return false;
#endif
}

ShiftKernel resolve_kernel(ShiftKernel requested) {
  switch (requested) {
    case ShiftKernel::kAuto:
      return avx2_available() ? ShiftKernel::kWideLaneAvx2 : ShiftKernel::kScalar;
    case ShiftKernel::kWideLaneAvx2:
      return avx2_available() ? ShiftKernel::kWideLaneAvx2
                              : ShiftKernel::kWideLaneEmulated;
    default:
      return requested;
  }
}

void shift_down_one_scalar(std::span<uint64_t> words, uint64_t from_offset) {
  assert(!words.empty() && from_offset < 64 * words.size());
  const size_t first_word = from_offset / 64;
  const size_t n = words.size();
  uint64_t* data = words.data();
  const uint64_t next = first_word + 1 < n ? data[first_word + 1] & 1 : 0;
  data[first_word] = shift_first_word(data[first_word], from_offset % 64, next);
  for (size_t k = first_word + 1; k + 1 < n; ++k) {
    data[k] = (data[k] >> 1) | (data[k + 1] << 63);
  }
  if (first_word + 1 < n) data[n - 1] >>= 1;
}

void shift_down_one_lanes(std::span<uint64_t> words, uint64_t from_offset) {
  shift_with_blocks(words, from_offset, &shift_blocks_lanes);
}

void shift_down_one_avx2(std::span<uint64_t> words, uint64_t from_offset) {
#if PATCHINDEX_HAS_AVX2_KERNEL
  if (avx2_available()) {
    shift_with_blocks(words, from_offset, &shift_blocks_avx2);
    return;
  }
#endif
  shift_with_blocks(words, from_offset, &shift_blocks_lanes);
}

void shift_down_one(ShiftKernel kernel, std::span<uint64_t> words,
                    uint64_t from_offset) {
  switch (resolve_kernel(kernel)) {
    case ShiftKernel::kWideLaneAvx2:
      shift_down_one_avx2(words, from_offset);
      return;
    case ShiftKernel::kWideLaneEmulated:
      shift_down_one_lanes(words, from_offset);
      return;
    default:
      shift_down_one_scalar(words, from_offset);
      return;
  }
}

}  // namespace patchindex
