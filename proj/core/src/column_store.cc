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

#include "patchindex/column_store.h"

#include <algorithm>
#include <string>

#include "patchindex/error.h"

namespace patchindex {

int Schema::find(std::string_view name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

size_t Schema::index_of(std::string_view name) const {
  const int i = find(name);
  if (i < 0) throw PlanError("unknown column '" + std::string(name) + "'");
  return static_cast<size_t>(i);
}

void IntVector::push(std::optional<int64_t> v) {
  const bool track = !v || !valid.empty();
  if (track) valid.resize(values.size(), 1);
  values.push_back(v.value_or(0));
  if (track) valid.push_back(v ? 1 : 0);
}

void IntVector::append(const IntVector& other) { append_range(other, 0, other.size()); }

void IntVector::append_range(const IntVector& other, size_t begin, size_t end) {
  const bool track = !valid.empty() || !other.valid.empty();
  const size_t old_size = values.size();
  values.insert(values.end(), other.values.begin() + static_cast<ptrdiff_t>(begin),
                other.values.begin() + static_cast<ptrdiff_t>(end));
  if (!track) return;
  valid.resize(old_size, 1);
  if (other.valid.empty()) {
    valid.resize(values.size(), 1);
  } else {
    valid.insert(valid.end(), other.valid.begin() + static_cast<ptrdiff_t>(begin),
                 other.valid.begin() + static_cast<ptrdiff_t>(end));
  }
}

int RowBatch::find(std::string_view name) const {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

size_t RowBatch::index_of(std::string_view name) const {
  const int i = find(name);
  if (i < 0) throw PlanError("row batch has no column '" + std::string(name) + "'");
  return static_cast<size_t>(i);
}

uint64_t ScanRange::row_count() const {
  uint64_t n = 0;
  for (const auto& iv : intervals) n += iv.end - iv.begin;
  return n;
}

void ScanRange::add(uint64_t begin, uint64_t end) {
  if (begin >= end) return;
  if (!intervals.empty() && intervals.back().end == begin) {
    intervals.back().end = end;
  } else {
    intervals.push_back({begin, end});
  }
}

bool ValueFilter::may_match(const ZoneEntry& zone) const {
  if (!zone.any || zone.max < lo || zone.min > hi) return false;
  if (candidates.empty()) return true;
  auto it = std::lower_bound(candidates.begin(), candidates.end(), zone.min);
  return it != candidates.end() && *it <= zone.max;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(const Schema& schema, uint64_t block_size)
    : specs_(schema.columns), block_size_(block_size) {
  persisted_ = make_segment();
  delta_ = make_segment();
}

Segment Partition::make_segment() const {
  Segment seg;
  seg.columns.resize(specs_.size());
  seg.zones.resize(specs_.size());
  return seg;
}

uint64_t Partition::block_count() const {
  auto blocks = [&](uint64_t rows) { return (rows + block_size_ - 1) / block_size_; };
  return blocks(persisted_.rows) + blocks(delta_.rows);
}

bool Partition::is_null(size_t col, uint64_t row) const {
  const Segment& seg = row < persisted_.rows ? persisted_ : delta_;
  const uint64_t r = row < persisted_.rows ? row : row - persisted_.rows;
  const auto& valid = seg.columns[col].valid;
  return !valid.empty() && !valid[r];
}

int64_t Partition::int_at(size_t col, uint64_t row) const {
  return row < persisted_.rows ? persisted_.columns[col].ints[row]
                               : delta_.columns[col].ints[row - persisted_.rows];
}

std::optional<int64_t> Partition::int_value(size_t col, uint64_t row) const {
  if (is_null(col, row)) return std::nullopt;
  return int_at(col, row);
}

std::string Partition::string_at(size_t col, uint64_t row) const {
  const Segment& seg = row < persisted_.rows ? persisted_ : delta_;
  const uint64_t r = row < persisted_.rows ? row : row - persisted_.rows;
  const uint32_t w = specs_[col].width;
  const char* p = seg.columns[col].chars.data() + r * w;
  size_t len = w;
  while (len > 0 && p[len - 1] == '\0') --len;
  return std::string(p, len);
}

Value Partition::value_at(size_t col, uint64_t row) const {
  if (is_null(col, row)) return std::monostate{};
  if (specs_[col].type == ColumnType::kInt64) return int_at(col, row);
  return string_at(col, row);
}

void Partition::widen_zone(Segment& seg, size_t col, uint64_t row, int64_t v) {
  auto& zones = seg.zones[col];
  const uint64_t b = row / block_size_;
  if (zones.size() <= b) zones.resize(b + 1);
  ZoneEntry& z = zones[b];
  if (!z.any) {
    z = {v, v, true};
  } else {
    z.min = std::min(z.min, v);
    z.max = std::max(z.max, v);
  }
}

void Partition::append_row(Segment& seg, const Row& row) {
  if (row.size() != specs_.size()) {
    throw ContractError("row has " + std::to_string(row.size()) + " values, schema has " +
                        std::to_string(specs_.size()));
  }
  const uint64_t r = seg.rows;
  for (size_t c = 0; c < specs_.size(); ++c) {
    const ColumnSpec& spec = specs_[c];
    ColumnData& data = seg.columns[c];
    const bool null = std::holds_alternative<std::monostate>(row[c]);
    if (null && !spec.nullable) {
      throw ContractError("NULL for non-nullable column '" + spec.name + "'");
    }
    if (spec.nullable) data.valid.push_back(null ? 0 : 1);
    if (spec.type == ColumnType::kInt64) {
      if (!null && !std::holds_alternative<int64_t>(row[c])) {
        throw ContractError("column '" + spec.name + "' expects an integer");
      }
      const int64_t v = null ? 0 : std::get<int64_t>(row[c]);
      data.ints.push_back(v);
      if (!null) {
        widen_zone(seg, c, r, v);
      } else if (seg.zones[c].size() <= r / block_size_) {
        seg.zones[c].resize(r / block_size_ + 1);
      }
    } else {
      std::string s;
      if (!null) {
        if (!std::holds_alternative<std::string>(row[c])) {
          throw ContractError("column '" + spec.name + "' expects a string");
        }
        s = std::get<std::string>(row[c]);
      }
      if (s.size() > spec.width) {
        throw ContractError("string too long for column '" + spec.name + "'");
      }
      s.resize(spec.width, '\0');
      data.chars.insert(data.chars.end(), s.begin(), s.end());
    }
  }
  ++seg.rows;
}

void Partition::set_value(size_t col, uint64_t row, const Value& v) {
  const bool in_persisted = row < persisted_.rows;
  Segment& seg = in_persisted ? persisted_ : delta_;
  const uint64_t r = in_persisted ? row : row - persisted_.rows;
  const ColumnSpec& spec = specs_[col];
  ColumnData& data = seg.columns[col];
  const bool null = std::holds_alternative<std::monostate>(v);
  if (null && !spec.nullable) {
    throw ContractError("NULL for non-nullable column '" + spec.name + "'");
  }
  if (spec.nullable) data.valid[r] = null ? 0 : 1;
  if (spec.type == ColumnType::kInt64) {
    if (null) return;
    if (!std::holds_alternative<int64_t>(v)) {
      throw ContractError("column '" + spec.name + "' expects an integer");
    }
    data.ints[r] = std::get<int64_t>(v);
    widen_zone(seg, col, r, data.ints[r]);
  } else {
    std::string s = null ? std::string() : std::get<std::string>(v);
    if (s.size() > spec.width) {
      throw ContractError("string too long for column '" + spec.name + "'");
    }
    s.resize(spec.width, '\0');
    std::copy(s.begin(), s.end(), data.chars.begin() + static_cast<ptrdiff_t>(r * spec.width));
  }
}

void Partition::rebuild_zones(Segment& seg, uint64_t from_row) {
  const uint64_t first_block = from_row / block_size_;
  const uint64_t blocks = (seg.rows + block_size_ - 1) / block_size_;
  for (size_t c = 0; c < specs_.size(); ++c) {
    if (specs_[c].type != ColumnType::kInt64) continue;
    auto& zones = seg.zones[c];
    zones.resize(std::min<uint64_t>(zones.size(), first_block));
    zones.resize(blocks);
    const ColumnData& data = seg.columns[c];
    for (uint64_t b = first_block; b < blocks; ++b) {
      ZoneEntry z;
      const uint64_t end = std::min(seg.rows, (b + 1) * block_size_);
      for (uint64_t r = b * block_size_; r < end; ++r) {
        if (!data.valid.empty() && !data.valid[r]) continue;
        const int64_t v = data.ints[r];
        if (!z.any) {
          z = {v, v, true};
        } else {
          z.min = std::min(z.min, v);
          z.max = std::max(z.max, v);
        }
      }
      zones[b] = z;
    }
  }
}

namespace {

template <typename T>
void compact(std::vector<T>& v, size_t width, std::span<const uint64_t> ascending_rows) {
  if (v.empty() || ascending_rows.empty()) return;
  size_t dst = ascending_rows[0] * width;
  for (size_t i = 0; i < ascending_rows.size(); ++i) {
    const size_t src_begin = (ascending_rows[i] + 1) * width;
    const size_t src_end =
        i + 1 < ascending_rows.size() ? ascending_rows[i + 1] * width : v.size();
    std::copy(v.begin() + static_cast<ptrdiff_t>(src_begin),
              v.begin() + static_cast<ptrdiff_t>(src_end),
              v.begin() + static_cast<ptrdiff_t>(dst));
    dst += src_end - src_begin;
  }
  v.resize(dst);
}

}  // namespace

void Partition::erase_rows(std::span<const uint64_t> ascending_local) {
  auto split = std::lower_bound(ascending_local.begin(), ascending_local.end(), persisted_.rows);
  std::vector<uint64_t> in_persisted(ascending_local.begin(), split);
  std::vector<uint64_t> in_delta;
  for (auto it = split; it != ascending_local.end(); ++it) in_delta.push_back(*it - persisted_.rows);

  auto erase_from = [&](Segment& seg, const std::vector<uint64_t>& rows) {
    if (rows.empty()) return;
    for (size_t c = 0; c < specs_.size(); ++c) {
      ColumnData& data = seg.columns[c];
      compact(data.ints, 1, rows);
      compact(data.chars, specs_[c].width, rows);
      compact(data.valid, 1, rows);
    }
    seg.rows -= rows.size();
    rebuild_zones(seg, rows.front());
  };
  erase_from(persisted_, in_persisted);
  erase_from(delta_, in_delta);
}

void Partition::merge_delta() {
  if (delta_.rows == 0) return;
  const uint64_t old_rows = persisted_.rows;
  for (size_t c = 0; c < specs_.size(); ++c) {
    ColumnData& dst = persisted_.columns[c];
    const ColumnData& src = delta_.columns[c];
    dst.ints.insert(dst.ints.end(), src.ints.begin(), src.ints.end());
    dst.chars.insert(dst.chars.end(), src.chars.begin(), src.chars.end());
    dst.valid.insert(dst.valid.end(), src.valid.begin(), src.valid.end());
  }
  persisted_.rows += delta_.rows;
  delta_ = make_segment();
  rebuild_zones(persisted_, old_rows);
}

ScanRange Partition::prune_blocks(size_t col, const ValueFilter& filter) const {
  ScanRange out;
  auto prune = [&](const Segment& seg, uint64_t base) {
    const auto& zones = seg.zones[col];
    for (uint64_t b = 0; b < zones.size(); ++b) {
      if (!filter.may_match(zones[b])) continue;
      out.add(base + b * block_size_, base + std::min(seg.rows, (b + 1) * block_size_));
    }
  };
  prune(persisted_, 0);
  prune(delta_, persisted_.rows);
  return out;
}

uint64_t Partition::blocks_in(const ScanRange& range) const {
  uint64_t count = 0;
  // Block ids: persisted blocks first, then delta blocks.
  const uint64_t persisted_blocks = (persisted_.rows + block_size_ - 1) / block_size_;
  auto block_of = [&](uint64_t row) {
    return row < persisted_.rows ? row / block_size_
                                 : persisted_blocks + (row - persisted_.rows) / block_size_;
  };
  uint64_t last = UINT64_MAX;
  for (const auto& iv : range.intervals) {
    if (iv.begin >= iv.end) continue;
    const uint64_t first = block_of(iv.begin);
    const uint64_t end_block = block_of(iv.end - 1);
    count += end_block - first + 1;
    if (first == last) --count;
    last = end_block;
  }
  return count;
}

// ---------------------------------------------------------------------------
// ColumnTable

ColumnTable::ColumnTable(Schema schema, size_t partitions, uint64_t block_size)
    : schema_(std::move(schema)), block_size_(block_size) {
  if (partitions == 0) throw ConfigError("a table needs at least one partition");
  if (block_size == 0) throw ConfigError("block size must be positive");
  for (const auto& c : schema_.columns) {
    if (c.type == ColumnType::kFixedString && c.width == 0) {
      throw ConfigError("fixed-width string column '" + c.name + "' needs a width");
    }
  }
  partitions_.reserve(partitions);
  for (size_t i = 0; i < partitions; ++i) partitions_.emplace_back(schema_, block_size_);
  sorted_.assign(schema_.columns.size(), false);
}

uint64_t ColumnTable::row_count() const {
  uint64_t n = 0;
  for (const auto& p : partitions_) n += p.row_count();
  return n;
}

std::vector<uint64_t> ColumnTable::partition_offsets() const {
  std::vector<uint64_t> offsets(partitions_.size() + 1, 0);
  for (size_t i = 0; i < partitions_.size(); ++i) {
    offsets[i + 1] = offsets[i] + partitions_[i].row_count();
  }
  return offsets;
}

RowLocation ColumnTable::locate(uint64_t rowid) const {
  uint64_t base = 0;
  for (size_t i = 0; i < partitions_.size(); ++i) {
    const uint64_t n = partitions_[i].row_count();
    if (rowid < base + n) return {i, rowid - base};
    base += n;
  }
  throw BoundsError("rowID " + std::to_string(rowid) + " out of range for table of " +
                    std::to_string(base) + " rows");
}

std::optional<int64_t> ColumnTable::int_value(size_t col, uint64_t rowid) const {
  check_int_column(col);
  const RowLocation loc = locate(rowid);
  return partitions_[loc.partition].int_value(col, loc.row);
}

Value ColumnTable::value_at(size_t col, uint64_t rowid) const {
  const RowLocation loc = locate(rowid);
  return partitions_[loc.partition].value_at(col, loc.row);
}

void ColumnTable::check_int_column(size_t col) const {
  if (col >= schema_.columns.size()) throw PlanError("column index out of range");
  if (schema_.columns[col].type != ColumnType::kInt64) {
    throw PlanError("column '" + schema_.columns[col].name + "' is not an integer column");
  }
}

void ColumnTable::load_rows(size_t partition, const std::vector<Row>& rows) {
  Partition& p = partitions_.at(partition);
  if (p.delta_rows() != 0) throw ContractError("load_rows: partition has pending delta rows");
  for (const Row& r : rows) p.append_row(p.persisted_, r);
  std::fill(sorted_.begin(), sorted_.end(), false);
}

void ColumnTable::load_int_column(size_t partition, size_t col, std::vector<int64_t> values,
                                  std::vector<uint8_t> valid) {
  check_int_column(col);
  ColumnData& data = partitions_.at(partition).persisted_.columns[col];
  if (!valid.empty() && !schema_.columns[col].nullable) {
    throw ContractError("validity given for non-nullable column");
  }
  data.ints = std::move(values);
  data.valid = std::move(valid);
}

void ColumnTable::load_string_column(size_t partition, size_t col, std::vector<char> bytes) {
  if (schema_.columns.at(col).type != ColumnType::kFixedString) {
    throw PlanError("column '" + schema_.columns[col].name + "' is not a string column");
  }
  partitions_.at(partition).persisted_.columns[col].chars = std::move(bytes);
}

void ColumnTable::finish_load(size_t partition, uint64_t rows) {
  Partition& p = partitions_.at(partition);
  for (size_t c = 0; c < schema_.columns.size(); ++c) {
    const ColumnSpec& spec = schema_.columns[c];
    ColumnData& data = p.persisted_.columns[c];
    if (spec.type == ColumnType::kInt64) {
      if (data.ints.size() != rows) {
        throw FormatError("column '" + spec.name + "' has " + std::to_string(data.ints.size()) +
                          " values, expected " + std::to_string(rows));
      }
    } else if (data.chars.size() != rows * spec.width) {
      if (data.chars.empty()) {
        data.chars.assign(rows * spec.width, '\0');
      } else {
        throw FormatError("column '" + spec.name + "' has wrong byte length");
      }
    }
    if (spec.nullable && data.valid.empty()) data.valid.assign(rows, 1);
    if (spec.nullable && data.valid.size() != rows) {
      throw FormatError("column '" + spec.name + "' has wrong validity length");
    }
  }
  p.persisted_.rows = rows;
  p.rebuild_zones(p.persisted_, 0);
  std::fill(sorted_.begin(), sorted_.end(), false);
}

std::vector<uint64_t> ColumnTable::insert_rows(const std::vector<Row>& rows) {
  Partition& p = partitions_.back();
  const uint64_t first = row_count();
  std::vector<std::optional<int64_t>> last(schema_.columns.size());
  for (size_t c = 0; c < schema_.columns.size(); ++c) {
    if (sorted_[c] && first > 0) last[c] = int_value(c, first - 1);
  }
  std::vector<uint64_t> ids;
  ids.reserve(rows.size());
  for (const Row& r : rows) {
    p.append_row(p.delta_, r);
    ids.push_back(first + ids.size());
    for (size_t c = 0; c < schema_.columns.size(); ++c) {
      if (!sorted_[c]) continue;
      if (!std::holds_alternative<int64_t>(r[c]) ||
          (last[c] && std::get<int64_t>(r[c]) < *last[c])) {
        sorted_[c] = false;
      } else {
        last[c] = std::get<int64_t>(r[c]);
      }
    }
  }
  return ids;
}

void ColumnTable::modify_rows(std::span<const uint64_t> rowids, size_t col,
                              std::span<const Value> values) {
  if (rowids.size() != values.size()) {
    throw ContractError("modify_rows: rowID and value counts differ");
  }
  if (col >= schema_.columns.size()) throw PlanError("column index out of range");
  const uint64_t rows = row_count();
  for (uint64_t id : rowids) {
    if (id >= rows) throw BoundsError("modify_rows: rowID " + std::to_string(id) + " out of range");
  }
  for (size_t i = 0; i < rowids.size(); ++i) {
    const RowLocation loc = locate(rowids[i]);
    partitions_[loc.partition].set_value(col, loc.row, values[i]);
  }
  if (sorted_[col]) {
    for (uint64_t id : rowids) {
      const auto v = int_value(col, id);
      const auto prev = id > 0 ? int_value(col, id - 1) : v;
      const auto next = id + 1 < rows ? int_value(col, id + 1) : v;
      if (!v || !prev || !next || *prev > *v || *v > *next) {
        sorted_[col] = false;
        break;
      }
    }
  }
}

void ColumnTable::delete_rows(std::span<const uint64_t> descending) {
  if (descending.empty()) return;
  const uint64_t rows = row_count();
  if (descending.front() >= rows) {
    throw BoundsError("delete_rows: rowID " + std::to_string(descending.front()) +
                      " out of range");
  }
  for (size_t i = 1; i < descending.size(); ++i) {
    if (descending[i] >= descending[i - 1]) {
      throw ContractError("delete_rows: rowIDs must be strictly descending");
    }
  }
  const std::vector<uint64_t> offsets = partition_offsets();
  std::vector<std::vector<uint64_t>> local(partitions_.size());
  size_t part = partitions_.size() - 1;
  for (uint64_t id : descending) {
    while (offsets[part] > id) --part;
    local[part].push_back(id - offsets[part]);
  }
  for (size_t p = 0; p < partitions_.size(); ++p) {
    if (local[p].empty()) continue;
    std::reverse(local[p].begin(), local[p].end());
    partitions_[p].erase_rows(local[p]);
  }
}

void ColumnTable::merge_delta() {
  for (auto& p : partitions_) p.merge_delta();
}

bool ColumnTable::has_delta() const {
  for (const auto& p : partitions_) {
    if (p.delta_rows() != 0) return true;
  }
  return false;
}

namespace {

void append_segment_range(const Segment& seg, size_t col, bool nullable, uint64_t begin,
                          uint64_t end, IntVector& out) {
  const ColumnData& data = seg.columns[col];
  if (nullable && out.valid.empty()) out.valid.assign(out.values.size(), 1);
  out.values.insert(out.values.end(), data.ints.begin() + static_cast<ptrdiff_t>(begin),
                    data.ints.begin() + static_cast<ptrdiff_t>(end));
  if (nullable) {
    out.valid.insert(out.valid.end(), data.valid.begin() + static_cast<ptrdiff_t>(begin),
                     data.valid.begin() + static_cast<ptrdiff_t>(end));
  } else if (!out.valid.empty()) {
    out.valid.resize(out.values.size(), 1);
  }
}

}  // namespace

RowBatch ColumnTable::scan_partition(size_t partition, std::span<const std::string> columns,
                                     const ScanRange* range, ScanStats* stats) const {
  const Partition& p = partitions_.at(partition);
  std::vector<size_t> cols;
  for (const auto& name : columns) {
    const size_t c = schema_.index_of(name);
    check_int_column(c);
    cols.push_back(c);
  }
  const ScanRange full = ScanRange::all(p.row_count());
  const ScanRange& r = range ? *range : full;
  uint64_t base = 0;
  for (size_t i = 0; i < partition; ++i) base += partitions_[i].row_count();

  RowBatch out;
  out.names.assign(columns.begin(), columns.end());
  out.columns.resize(cols.size());
  const uint64_t n = r.row_count();
  for (auto& c : out.columns) c.values.reserve(n);
  out.rowids.reserve(n);
  const uint64_t prows = p.persisted_rows();
  for (const auto& iv : r.intervals) {
    const uint64_t end = std::min(iv.end, p.row_count());
    if (iv.begin >= end) continue;
    for (uint64_t row = iv.begin; row < end; ++row) out.rowids.push_back(base + row);
    const uint64_t pb = std::min(iv.begin, prows);
    const uint64_t pe = std::min(end, prows);
    for (size_t k = 0; k < cols.size(); ++k) {
      const bool nullable = schema_.columns[cols[k]].nullable;
      if (pb < pe) append_segment_range(p.persisted(), cols[k], nullable, pb, pe, out.columns[k]);
      const uint64_t db = std::max(iv.begin, prows);
      if (db < end) {
        append_segment_range(p.delta(), cols[k], nullable, db - prows, end - prows,
                             out.columns[k]);
      }
    }
  }
  if (stats) {
    stats->blocks_scanned += p.blocks_in(r);
    stats->rows_scanned += out.rowids.size();
  }
  return out;
}

RowBatch ColumnTable::scan(std::span<const std::string> columns,
                           const std::vector<ScanRange>* ranges, ScanStats* stats) const {
  if (ranges && ranges->size() != partitions_.size()) {
    throw PlanError("scan: expected one range per partition");
  }
  RowBatch out;
  out.names.assign(columns.begin(), columns.end());
  out.columns.resize(columns.size());
  for (size_t p = 0; p < partitions_.size(); ++p) {
    RowBatch part = scan_partition(p, columns, ranges ? &(*ranges)[p] : nullptr, stats);
    for (size_t k = 0; k < columns.size(); ++k) out.columns[k].append(part.columns[k]);
    out.rowids.insert(out.rowids.end(), part.rowids.begin(), part.rowids.end());
  }
  return out;
}

RowBatch ColumnTable::scan_delta(std::span<const std::string> columns) const {
  std::vector<ScanRange> ranges;
  for (const auto& p : partitions_) {
    ScanRange r;
    r.add(p.persisted_rows(), p.row_count());
    ranges.push_back(r);
  }
  return scan(columns, &ranges, nullptr);
}

bool ColumnTable::check_sorted(size_t col) const {
  if (col >= schema_.columns.size() || schema_.columns[col].type != ColumnType::kInt64) {
    return false;
  }
  bool first = true;
  int64_t prev = 0;
  for (const auto& p : partitions_) {
    for (uint64_t r = 0; r < p.row_count(); ++r) {
      if (p.is_null(col, r)) return false;
      const int64_t v = p.int_at(col, r);
      if (!first && v < prev) return false;
      prev = v;
      first = false;
    }
  }
  return true;
}

bool ColumnTable::declare_sorted(size_t col) {
  const bool ok = check_sorted(col);
  sorted_.at(col) = ok;
  return ok;
}

IntVector ColumnTable::column_values(size_t col) const {
  check_int_column(col);
  IntVector out;
  out.values.reserve(row_count());
  const bool nullable = schema_.columns[col].nullable;
  for (const auto& p : partitions_) {
    append_segment_range(p.persisted(), col, nullable, 0, p.persisted_rows(), out);
    append_segment_range(p.delta(), col, nullable, 0, p.delta_rows(), out);
  }
  return out;
}

}  // namespace patchindex
