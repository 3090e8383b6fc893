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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patchindex/column_store.h"
#include "patchindex/sharded_bitmap.h"
#include "patchindex/sorted_subsequence.h"

namespace patchindex {

class WorkerPool;

enum class ConstraintType : uint8_t { kNearlyUnique, kNearlySorted };

struct Constraint {
  ConstraintType type = ConstraintType::kNearlyUnique;
  SortOrder order = SortOrder::kAscending;  // kNearlySorted only

  static Constraint nearly_unique() { return {ConstraintType::kNearlyUnique, SortOrder::kAscending}; }
  static Constraint nearly_sorted(SortOrder order = SortOrder::kAscending) {
    return {ConstraintType::kNearlySorted, order};
  }
  bool is_unique() const { return type == ConstraintType::kNearlyUnique; }
  bool is_sorted() const { return type == ConstraintType::kNearlySorted; }

  friend bool operator==(const Constraint& a, const Constraint& b) {
    return a.type == b.type && (a.type == ConstraintType::kNearlyUnique || a.order == b.order);
  }
};

std::string to_string(const Constraint& c);

enum class StoreKind : uint8_t { kBitmap, kIdentifiers };

std::string_view to_string(StoreKind kind);

// Patch set of one partition, as a sharded bitmap over local rowIDs or as a
// sorted list of 64-bit local rowIDs.
class PatchStore {
 public:
  PatchStore(StoreKind kind, uint64_t rows,
             uint64_t shard_bits = ShardedBitmap::kDefaultShardBits);

  StoreKind kind() const { return kind_; }
  uint64_t row_count() const { return rows_; }
  uint64_t patch_count() const { return patches_; }

  bool is_patch(uint64_t row) const;
  // Rows may repeat and come in any order.
  void add_patches(std::span<const uint64_t> rows);
  void remove_patches(std::span<const uint64_t> rows);
  // Removes rows from the partition: surviving rowIDs above a removed row move
  // down. `descending` strictly decreasing.
  void drop_rows(std::span<const uint64_t> descending, WorkerPool* pool = nullptr);
  void grow(uint64_t new_rows);

  size_t memory_bytes() const;
  std::vector<uint64_t> patches() const;

  template <typename Fn>
  void for_each_patch(Fn&& fn) const {
    if (kind_ == StoreKind::kBitmap) {
      std::get<ShardedBitmap>(store_).for_each_set(fn);
    } else {
      for (uint64_t id : std::get<std::vector<uint64_t>>(store_)) fn(id);
    }
  }

  const ShardedBitmap* bitmap() const { return std::get_if<ShardedBitmap>(&store_); }

 private:
  void check_row(uint64_t row, const char* op) const;

  StoreKind kind_;
  uint64_t rows_;
  uint64_t patches_ = 0;
  std::variant<ShardedBitmap, std::vector<uint64_t>> store_;
};

struct IndexOptions {
  StoreKind store = StoreKind::kBitmap;
  uint64_t shard_bits = ShardedBitmap::kDefaultShardBits;
  WorkerPool* pool = nullptr;  // partition-parallel build and bulk deletes
};

// Patches of a column (all positions whose values occur more than once, plus
// NULLs). Non-patch rows hold exactly the values that occur once.
std::vector<uint64_t> nuc_patches(const IntVector& column);

struct SortedPatches {
  std::vector<uint64_t> patches;       // ascending
  std::optional<uint64_t> tail_row;    // last row of the kept subsequence
  std::optional<int64_t> tail_value;
};

// Complement of a longest sorted subsequence over the non-NULL values.
SortedPatches nsc_patches(const IntVector& column, SortOrder order);

// Approximate-constraint index over one integer column of a table, with one
// PatchStore per table partition. rowIDs in the public interface are global.
class PatchIndex {
 public:
  PatchIndex(std::string column, Constraint constraint, std::span<const uint64_t> partition_rows,
             const IndexOptions& options = {});

  // Builds the index from the table's current contents. Duplicate detection
  // (NUC) and the sorted subsequence (NSC) are computed over the whole column;
  // the partition stores are then filled in parallel.
  static PatchIndex discover(const ColumnTable& table, std::string_view column,
                             Constraint constraint, const IndexOptions& options = {});

  const std::string& column() const { return column_; }
  const Constraint& constraint() const { return constraint_; }
  StoreKind store_kind() const { return options_.store; }
  const IndexOptions& options() const { return options_; }
  size_t partition_count() const { return parts_.size(); }
  const PatchStore& partition(size_t i) const { return parts_.at(i); }
  uint64_t partition_offset(size_t i) const { return offsets_.at(i); }

  uint64_t row_count() const { return offsets_.back(); }
  uint64_t patch_count() const;
  double exception_rate() const;
  size_t memory_bytes() const;

  bool is_patch(uint64_t rowid) const;
  std::vector<uint64_t> patches() const;

  void add_patches(std::span<const uint64_t> rowids);
  void remove_patches(std::span<const uint64_t> rowids);
  // Removes table rows from the index; `descending` strictly decreasing.
  void drop_rows(std::span<const uint64_t> descending);
  // Appends rows to the last partition.
  void grow(uint64_t new_rows);

  // NSC: value and rowID of the last element of the maintained sorted
  // subsequence; empty when every row is a patch.
  std::optional<int64_t> last_sorted_value() const { return tail_value_; }
  std::optional<uint64_t> tail_row() const { return tail_row_; }
  void set_tail(std::optional<uint64_t> row, std::optional<int64_t> value) {
    tail_row_ = row;
    tail_value_ = value;
  }

  // NSC: points the tail at the last non-patch row of `table` (its value is
  // the last element of the sorted subsequence). Walks back over trailing
  // patches only.
  void refresh_tail(const ColumnTable& table);

  // True when this index was built for `table`'s current row layout.
  bool matches(const ColumnTable& table) const;

 private:
  std::pair<size_t, uint64_t> locate(uint64_t rowid) const;
  void recompute_offsets();

  std::string column_;
  Constraint constraint_;
  IndexOptions options_;
  std::vector<PatchStore> parts_;
  std::vector<uint64_t> offsets_;
  std::optional<uint64_t> tail_row_;
  std::optional<int64_t> tail_value_;
};

// Non-patch rows satisfy the constraint: pairwise distinct values that no patch
// row repeats (NUC), or a sequence sorted by the index order ending at
// last_sorted_value (NSC). Full scan; used by tests and `--verify`.
bool constraint_holds(const ColumnTable& table, const PatchIndex& index,
                      std::string* why = nullptr);

}  // namespace patchindex
