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

// Minimal partitioned column store: 64-bit integer and fixed-width string
// columns, dense global rowIDs, per-block min/max zone maps and an in-memory
// append delta for inserted rows.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace patchindex {

enum class ColumnType : uint8_t { kInt64 = 1, kFixedString = 2 };

struct ColumnSpec {
  std::string name;
  ColumnType type = ColumnType::kInt64;
  uint32_t width = 0;  // bytes per value, kFixedString only
  bool nullable = false;
};

struct Schema {
  std::vector<ColumnSpec> columns;

  // -1 when absent.
  int find(std::string_view name) const;
  // Throws PlanError when absent.
  size_t index_of(std::string_view name) const;
};

// NULL is std::monostate.
using Value = std::variant<std::monostate, int64_t, std::string>;
using Row = std::vector<Value>;

// Integer column vector; `valid` is empty when no value is NULL.
struct IntVector {
  std::vector<int64_t> values;
  std::vector<uint8_t> valid;

  size_t size() const { return values.size(); }
  bool is_null(size_t i) const { return !valid.empty() && !valid[i]; }
  std::optional<int64_t> get(size_t i) const {
    if (is_null(i)) return std::nullopt;
    return values[i];
  }
  void push(std::optional<int64_t> v);
  void append(const IntVector& other);
  void append_range(const IntVector& other, size_t begin, size_t end);
};

// Columnar row batch produced by scans and query operators.
struct RowBatch {
  std::vector<std::string> names;
  std::vector<IntVector> columns;
  std::vector<uint64_t> rowids;  // global rowIDs; empty when not tracked

  size_t row_count() const { return columns.empty() ? rowids.size() : columns[0].size(); }
  int find(std::string_view name) const;
  size_t index_of(std::string_view name) const;
};

struct ZoneEntry {
  int64_t min = 0;
  int64_t max = 0;
  bool any = false;  // false when the block holds only NULLs
};

// Sorted, disjoint [begin, end) row intervals, partition-local.
struct ScanRange {
  struct Interval {
    uint64_t begin;
    uint64_t end;
    friend bool operator==(const Interval&, const Interval&) = default;
  };
  std::vector<Interval> intervals;

  static ScanRange all(uint64_t rows) { return rows ? ScanRange{{{0, rows}}} : ScanRange{}; }
  uint64_t row_count() const;
  bool empty() const { return intervals.empty(); }
  void add(uint64_t begin, uint64_t end);  // merges with the last interval
};

// Block-pruning predicate: a closed value interval, optionally narrowed to a
// sorted set of candidate values.
struct ValueFilter {
  int64_t lo;
  int64_t hi;
  std::span<const int64_t> candidates;  // sorted; empty means "any in [lo, hi]"

  bool may_match(const ZoneEntry& zone) const;
};

struct ScanStats {
  uint64_t blocks_scanned = 0;
  uint64_t rows_scanned = 0;
};

// Storage for one column within a segment.
struct ColumnData {
  std::vector<int64_t> ints;
  std::vector<char> chars;
  std::vector<uint8_t> valid;  // one byte per row when the column is nullable
};

// A run of rows with zone maps: either the persisted part of a partition or its
// insert delta.
struct Segment {
  std::vector<ColumnData> columns;
  std::vector<std::vector<ZoneEntry>> zones;  // per column; empty for strings
  uint64_t rows = 0;
};

class Partition {
 public:
  Partition(const Schema& schema, uint64_t block_size);

  uint64_t row_count() const { return persisted_.rows + delta_.rows; }
  uint64_t persisted_rows() const { return persisted_.rows; }
  uint64_t delta_rows() const { return delta_.rows; }
  uint64_t block_size() const { return block_size_; }
  // Blocks over persisted rows followed by blocks over delta rows.
  uint64_t block_count() const;

  bool is_null(size_t col, uint64_t row) const;
  int64_t int_at(size_t col, uint64_t row) const;
  std::optional<int64_t> int_value(size_t col, uint64_t row) const;
  std::string string_at(size_t col, uint64_t row) const;
  Value value_at(size_t col, uint64_t row) const;

  const Segment& persisted() const { return persisted_; }
  const Segment& delta() const { return delta_; }

  // Zone-map pruning on an integer column. Returned intervals are
  // partition-local rows, aligned to blocks.
  ScanRange prune_blocks(size_t col, const ValueFilter& filter) const;

  // Number of blocks touched by scanning `range`.
  uint64_t blocks_in(const ScanRange& range) const;

 private:
  friend class ColumnTable;
  friend class TableFile;

  void append_row(Segment& seg, const Row& row);
  void set_value(size_t col, uint64_t row, const Value& v);
  void erase_rows(std::span<const uint64_t> ascending_local);
  void rebuild_zones(Segment& seg, uint64_t from_row);
  void widen_zone(Segment& seg, size_t col, uint64_t row, int64_t v);
  void merge_delta();
  Segment make_segment() const;

  std::vector<ColumnSpec> specs_;
  uint64_t block_size_;
  Segment persisted_;
  Segment delta_;
};

// Location of a global rowID.
struct RowLocation {
  size_t partition;
  uint64_t row;  // partition-local
};

class ColumnTable {
 public:
  static constexpr uint64_t kDefaultBlockSize = 4096;

  ColumnTable(Schema schema, size_t partitions, uint64_t block_size = kDefaultBlockSize);

  const Schema& schema() const { return schema_; }
  uint64_t block_size() const { return block_size_; }
  size_t partition_count() const { return partitions_.size(); }
  const Partition& partition(size_t i) const { return partitions_.at(i); }
  uint64_t row_count() const;
  // partition_count() + 1 entries; entry i is the first global rowID of
  // partition i.
  std::vector<uint64_t> partition_offsets() const;
  RowLocation locate(uint64_t rowid) const;

  std::optional<int64_t> int_value(size_t col, uint64_t rowid) const;
  Value value_at(size_t col, uint64_t rowid) const;

  // Bulk load into the persisted part of a partition (generator, file load).
  void load_rows(size_t partition, const std::vector<Row>& rows);
  void load_int_column(size_t partition, size_t col, std::vector<int64_t> values,
                       std::vector<uint8_t> valid = {});
  void load_string_column(size_t partition, size_t col, std::vector<char> bytes);
  // Completes a column-wise load: checks lengths and builds zone maps.
  void finish_load(size_t partition, uint64_t rows);

  // Appends rows to the delta of the last partition and returns their rowIDs.
  std::vector<uint64_t> insert_rows(const std::vector<Row>& rows);
  // Overwrites one column of the listed rows.
  void modify_rows(std::span<const uint64_t> rowids, size_t col, std::span<const Value> values);
  // Removes rows; later rowIDs move down. `descending` strictly decreasing.
  void delete_rows(std::span<const uint64_t> descending);
  // Moves every partition's delta into its persisted part.
  void merge_delta();
  bool has_delta() const;

  // Emits persisted rows then delta rows of every partition, restricted to
  // `ranges` (one ScanRange per partition) when given.
  RowBatch scan(std::span<const std::string> columns,
                const std::vector<ScanRange>* ranges = nullptr, ScanStats* stats = nullptr) const;
  RowBatch scan_partition(size_t partition, std::span<const std::string> columns,
                          const ScanRange* range = nullptr, ScanStats* stats = nullptr) const;
  // Rows currently in the insert delta (rows inserted by the running batch).
  RowBatch scan_delta(std::span<const std::string> columns) const;

  // Sortedness (ascending, NULLs not allowed) of a column across the whole
  // table in rowID order. Declared by loaders, dropped by violating updates.
  bool is_sorted(size_t col) const { return sorted_.at(col); }
  // Verifies and records sortedness; returns the verified state.
  bool declare_sorted(size_t col);
  bool check_sorted(size_t col) const;

  // Whole integer column in rowID order.
  IntVector column_values(size_t col) const;

 private:
  friend class TableFile;

  void check_int_column(size_t col) const;

  Schema schema_;
  uint64_t block_size_;
  std::vector<Partition> partitions_;
  std::vector<bool> sorted_;
};

}  // namespace patchindex
