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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "patchindex/bit_shift.h"

namespace patchindex {

class WorkerPool;

// Dense bitmap over logical positions that supports deleting a position
// (all later positions move down by one) without shifting the whole array.
//
// The word array is split into virtual shards of `shard_bits` bits. starts()[i]
// is the logical position of the first bit stored in shard i. A delete shifts
// bits inside one shard only and decrements the start of every later shard,
// leaving one dead slot at the end of the shard. Dead slots always hold 0.
// condense() repacks the shards and removes all dead slots.
//
// starts() is non-decreasing (a shard whose bits were all deleted has the same
// start as its successor) and starts()[i] <= i * shard_bits.
class ShardedBitmap {
 public:
  static constexpr uint64_t kDefaultShardBits = uint64_t{1} << 14;
  static constexpr double kDefaultCondenseThreshold = 0.9;

  ShardedBitmap() : ShardedBitmap(0) {}
  explicit ShardedBitmap(uint64_t logical_len,
                         uint64_t shard_bits = kDefaultShardBits);

  uint64_t size() const { return logical_len_; }
  bool empty() const { return logical_len_ == 0; }
  uint64_t shard_bits() const { return shard_bits_; }
  size_t shard_count() const { return starts_.size(); }
  uint64_t lost_bits() const { return lost_bits_; }
  uint64_t capacity_bits() const { return shard_count() * shard_bits_; }
  std::span<const uint64_t> starts() const { return starts_; }
  std::span<const uint64_t> words() const { return words_; }

  // Bits currently stored in shard i.
  uint64_t shard_fill(size_t shard) const;

  bool get(uint64_t pos) const;
  void set(uint64_t pos);
  void unset(uint64_t pos);
  void assign(uint64_t pos, bool value) { value ? set(pos) : unset(pos); }

  // Removes the bit at `pos`; later bits move down one position.
  void erase(uint64_t pos);

  // Removes every listed position. `descending` must be strictly decreasing and
  // in range; the result equals calling erase() for each position in order.
  // Shard-local shifts run as one work unit per affected shard on `pool`
  // (inline when null); starts are fixed afterwards in a single pass.
  void bulk_erase(std::span<const uint64_t> descending,
                  WorkerPool* pool = nullptr);

  // Removes the bit at `from_offset` of shard `shard` and shifts the rest of
  // the shard (dead slots included) down by one. Starts are not touched.
  void shift_range_left_by_one(size_t shard, uint64_t from_offset);

  // Adds `extra_bits` zero bits at the end.
  void append(uint64_t extra_bits);

  // Repacks all shards so starts()[i] == i * shard_bits() again.
  void condense();

  // Fraction of capacity not lost to dead slots (1.0 when freshly built).
  double utilization() const;
  size_t memory_bytes() const;

  // Number of set logical bits.
  uint64_t count() const;

  // Calls fn(pos) for every set bit in increasing logical order.
  template <typename Fn>
  void for_each_set(Fn&& fn) const;

  // Logical bits as a byte-per-bit vector.
  std::vector<uint8_t> to_bytes() const;

  void set_shift_kernel(ShiftKernel kernel) { kernel_ = resolve_kernel(kernel); }
  ShiftKernel shift_kernel() const { return kernel_; }

  // 0 disables automatic condensing. Checked after erase()/bulk_erase().
  void set_condense_threshold(double threshold) { condense_threshold_ = threshold; }

  // One line per shard: `shard <i> start=<s> bits=<hex words>`.
  std::string debug_dump() const;

  friend bool operator==(const ShardedBitmap& a, const ShardedBitmap& b) {
    return a.logical_len_ == b.logical_len_ && a.shard_bits_ == b.shard_bits_ &&
           a.lost_bits_ == b.lost_bits_ && a.starts_ == b.starts_ &&
           a.words_ == b.words_;
  }

 private:
  struct Location {
    size_t shard;
    uint64_t offset;
  };

  Location locate(uint64_t pos) const;
  void check_pos(uint64_t pos, const char* op) const;
  uint64_t* shard_words(size_t shard) { return words_.data() + shard * words_per_shard_; }
  const uint64_t* shard_words(size_t shard) const {
    return words_.data() + shard * words_per_shard_;
  }
  // Shift inside a shard limited to the words that hold stored bits.
  void shift_stored(size_t shard, uint64_t offset, uint64_t fill);
  // Words backing a shard: full shards own shard_bits / 64 words, the last
  // shard only the words its stored bits need.
  uint64_t shard_words_allocated(size_t shard) const;
  void fit_last_shard();
  void maybe_condense();

  std::vector<uint64_t> words_;
  std::vector<uint64_t> starts_;
  uint64_t logical_len_ = 0;
  uint64_t shard_bits_ = kDefaultShardBits;
  uint64_t words_per_shard_ = kDefaultShardBits / 64;
  unsigned shard_shift_ = 14;
  uint64_t lost_bits_ = 0;
  double condense_threshold_ = 0.0;
  ShiftKernel kernel_ = resolve_kernel(ShiftKernel::kAuto);
};

template <typename Fn>
void ShardedBitmap::for_each_set(Fn&& fn) const {
  for (size_t s = 0; s < starts_.size(); ++s) {
    const uint64_t fill = shard_fill(s);
    const uint64_t* w = shard_words(s);
    const uint64_t base = starts_[s];
    const uint64_t nwords = (fill + 63) / 64;
    for (uint64_t k = 0; k < nwords; ++k) {
      uint64_t bits = w[k];
      while (bits) {
        const uint64_t off = k * 64 + static_cast<uint64_t>(__builtin_ctzll(bits));
        fn(base + off);
        bits &= bits - 1;
      }
    }
  }
}

}  // namespace patchindex
