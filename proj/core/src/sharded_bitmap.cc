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

#include "patchindex/sharded_bitmap.h"

#include <bit>
#include <cstdio>
#include <string>

#include "patchindex/error.h"
#include "patchindex/worker_pool.h"

namespace patchindex {

ShardedBitmap::ShardedBitmap(uint64_t logical_len, uint64_t shard_bits)
    : logical_len_(logical_len), shard_bits_(shard_bits) {
  if (shard_bits < 64 || !std::has_single_bit(shard_bits)) {
    throw ConfigError("shard size must be a power of two >= 64, got " +
                      std::to_string(shard_bits));
  }
  words_per_shard_ = shard_bits / 64;
  shard_shift_ = static_cast<unsigned>(std::countr_zero(shard_bits));
  const uint64_t shards = logical_len == 0 ? 1 : (logical_len + shard_bits - 1) / shard_bits;
  starts_.resize(shards);
  for (uint64_t i = 0; i < shards; ++i) starts_[i] = i * shard_bits;
  words_.assign((logical_len + 63) / 64, 0);
}

uint64_t ShardedBitmap::shard_words_allocated(size_t shard) const {
  return shard + 1 < starts_.size() ? words_per_shard_ : words_.size() - shard * words_per_shard_;
}

void ShardedBitmap::fit_last_shard() {
  const size_t last = starts_.size() - 1;
  words_.resize(last * words_per_shard_ + (shard_fill(last) + 63) / 64, 0);
}

uint64_t ShardedBitmap::shard_fill(size_t shard) const {
  const uint64_t end = shard + 1 < starts_.size() ? starts_[shard + 1] : logical_len_;
  return end - starts_[shard];
}

void ShardedBitmap::check_pos(uint64_t pos, const char* op) const {
  if (pos >= logical_len_) {
    throw BoundsError(std::string(op) + ": position " + std::to_string(pos) +
                      " out of range for bitmap of " + std::to_string(logical_len_) +
                      " bits");
  }
}

ShardedBitmap::Location ShardedBitmap::locate(uint64_t pos) const {
  // Deletes only move bits towards lower shards' start values, so the shard
  // holding `pos` is never before pos / shard_bits.
  size_t shard = static_cast<size_t>(pos >> shard_shift_);
  const size_t n = starts_.size();
  while (shard + 1 < n && starts_[shard + 1] <= pos) ++shard;
  return {shard, pos - starts_[shard]};
}

bool ShardedBitmap::get(uint64_t pos) const {
  check_pos(pos, "get");
  const Location loc = locate(pos);
  return (shard_words(loc.shard)[loc.offset / 64] >> (loc.offset % 64)) & 1;
}

void ShardedBitmap::set(uint64_t pos) {
  check_pos(pos, "set");
  const Location loc = locate(pos);
  shard_words(loc.shard)[loc.offset / 64] |= uint64_t{1} << (loc.offset % 64);
}

void ShardedBitmap::unset(uint64_t pos) {
  check_pos(pos, "unset");
  const Location loc = locate(pos);
  shard_words(loc.shard)[loc.offset / 64] &= ~(uint64_t{1} << (loc.offset % 64));
}

void ShardedBitmap::shift_stored(size_t shard, uint64_t offset, uint64_t fill) {
  // Slots at or beyond `fill` are zero, so the shift can stop at the word
  // holding the last stored bit.
  const uint64_t nwords = (fill + 63) / 64;
  shift_down_one(kernel_, std::span<uint64_t>(shard_words(shard), nwords), offset);
}

void ShardedBitmap::shift_range_left_by_one(size_t shard, uint64_t from_offset) {
  if (shard >= starts_.size() || from_offset >= shard_words_allocated(shard) * 64) {
    throw BoundsError("shift_range_left_by_one: shard/offset out of range");
  }
  shift_down_one(kernel_, std::span<uint64_t>(shard_words(shard), shard_words_allocated(shard)),
                 from_offset);
}

void ShardedBitmap::erase(uint64_t pos) {
  check_pos(pos, "erase");
  const Location loc = locate(pos);
  shift_stored(loc.shard, loc.offset, shard_fill(loc.shard));
  const size_t n = starts_.size();
  for (size_t s = loc.shard + 1; s < n; ++s) --starts_[s];
  if (loc.shard + 1 < n) ++lost_bits_;
  --logical_len_;
  maybe_condense();
}

void ShardedBitmap::bulk_erase(std::span<const uint64_t> descending, WorkerPool* pool) {
  if (descending.empty()) return;
  if (descending.front() >= logical_len_) {
    throw BoundsError("bulk_erase: position " + std::to_string(descending.front()) +
                      " out of range for bitmap of " + std::to_string(logical_len_) +
                      " bits");
  }
  for (size_t i = 1; i < descending.size(); ++i) {
    if (descending[i] >= descending[i - 1]) {
      throw ContractError("bulk_erase: positions must be strictly descending");
    }
  }

  // Group positions by shard. Because the input is descending, a delete never
  // changes the start values used to locate the positions that follow it.
  struct Group {
    size_t shard;
    size_t begin;
    size_t end;
  };
  std::vector<Group> groups;
  size_t shard = locate(descending.front()).shard;
  size_t begin = 0;
  for (size_t i = 0; i < descending.size(); ++i) {
    const uint64_t pos = descending[i];
    if (pos < starts_[shard]) {
      groups.push_back({shard, begin, i});
      begin = i;
      while (starts_[shard] > pos) --shard;
    }
  }
  groups.push_back({shard, begin, descending.size()});

  auto shift_group = [&](size_t g) {
    const Group& group = groups[g];
    const uint64_t start = starts_[group.shard];
    uint64_t fill = shard_fill(group.shard);
    for (size_t i = group.begin; i < group.end; ++i) {
      shift_stored(group.shard, descending[i] - start, fill);
      --fill;
    }
  };
  if (pool != nullptr) {
    pool->run(groups.size(), shift_group);
  } else {
    for (size_t g = 0; g < groups.size(); ++g) shift_group(g);
  }

  // Single pass over the start values with a running sum of the deletions in
  // preceding shards.
  const size_t n = starts_.size();
  uint64_t running = 0;
  auto next = groups.rbegin();
  for (size_t s = 0; s < n; ++s) {
    starts_[s] -= running;
    if (next != groups.rend() && next->shard == s) {
      const uint64_t removed = next->end - next->begin;
      running += removed;
      if (s + 1 < n) lost_bits_ += removed;
      ++next;
    }
  }
  logical_len_ -= running;
  maybe_condense();
}

void ShardedBitmap::append(uint64_t extra_bits) {
  if (extra_bits == 0) return;
  const uint64_t last_fill = shard_fill(starts_.size() - 1);
  uint64_t take = std::min(shard_bits_ - last_fill, extra_bits);
  logical_len_ += take;
  extra_bits -= take;
  if (extra_bits == 0) {
    fit_last_shard();
    return;
  }
  const uint64_t new_shards = (extra_bits + shard_bits_ - 1) / shard_bits_;
  starts_.reserve(starts_.size() + new_shards);
  for (uint64_t i = 0; i < new_shards; ++i) {
    starts_.push_back(logical_len_);
    take = std::min(shard_bits_, extra_bits);
    logical_len_ += take;
    extra_bits -= take;
  }
  fit_last_shard();
}

void ShardedBitmap::condense() {
  const uint64_t shards =
      logical_len_ == 0 ? 1 : (logical_len_ + shard_bits_ - 1) / shard_bits_;
  std::vector<uint64_t> packed((logical_len_ + 63) / 64, 0);
  uint64_t dst = 0;
  for (size_t s = 0; s < starts_.size(); ++s) {
    const uint64_t fill = shard_fill(s);
    const uint64_t* src = shard_words(s);
    uint64_t copied = 0;
    while (copied < fill) {
      const uint64_t src_word = copied / 64;
      const uint64_t src_bit = copied % 64;
      // Take up to the end of the current source word.
      const uint64_t chunk = std::min<uint64_t>(64 - src_bit, fill - copied);
      uint64_t bits = src[src_word] >> src_bit;
      if (chunk < 64) bits &= (uint64_t{1} << chunk) - 1;
      const uint64_t dst_bit = dst % 64;
      packed[dst / 64] |= bits << dst_bit;
      if (dst_bit + chunk > 64 && dst / 64 + 1 < packed.size()) packed[dst / 64 + 1] |= bits >> (64 - dst_bit);
      dst += chunk;
      copied += chunk;
    }
  }
  words_ = std::move(packed);
  starts_.resize(shards);
  for (uint64_t i = 0; i < shards; ++i) starts_[i] = i * shard_bits_;
  lost_bits_ = 0;
}

void ShardedBitmap::maybe_condense() {
  if (condense_threshold_ > 0 && utilization() < condense_threshold_) condense();
}

double ShardedBitmap::utilization() const {
  const double capacity = static_cast<double>(capacity_bits());
  return (capacity - static_cast<double>(lost_bits_)) / capacity;
}

size_t ShardedBitmap::memory_bytes() const {
  return words_.size() * sizeof(uint64_t) + starts_.size() * sizeof(uint64_t) +
         sizeof(ShardedBitmap);
}

uint64_t ShardedBitmap::count() const {
  uint64_t total = 0;
  for (uint64_t w : words_) total += static_cast<uint64_t>(std::popcount(w));
  return total;
}

std::vector<uint8_t> ShardedBitmap::to_bytes() const {
  std::vector<uint8_t> out(logical_len_, 0);
  for_each_set([&](uint64_t pos) { out[pos] = 1; });
  return out;
}

std::string ShardedBitmap::debug_dump() const {
  std::string out;
  char buf[32];
  for (size_t s = 0; s < starts_.size(); ++s) {
    out += "shard " + std::to_string(s) + " start=" + std::to_string(starts_[s]) + " bits=";
    const uint64_t* w = shard_words(s);
    for (uint64_t k = 0; k < shard_words_allocated(s); ++k) {
      std::snprintf(buf, sizeof(buf), "%s%016llx", k ? " " : "",
                    static_cast<unsigned long long>(w[k]));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace patchindex
