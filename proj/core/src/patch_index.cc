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

#include "patchindex/patch_index.h"

#include <algorithm>
#include <unordered_set>

#include "patchindex/error.h"
#include "patchindex/worker_pool.h"

namespace patchindex {

std::string to_string(const Constraint& c) {
  if (c.is_unique()) return "nuc";
  return std::string("nsc-") + std::string(to_string(c.order));
}

std::string_view to_string(StoreKind kind) {
  return kind == StoreKind::kBitmap ? "bitmap" : "identifiers";
}

namespace {

void check_descending(std::span<const uint64_t> rows, uint64_t limit, const char* op) {
  if (rows.empty()) return;
  if (rows.front() >= limit) {
    throw BoundsError(std::string(op) + ": row " + std::to_string(rows.front()) +
                      " out of range (" + std::to_string(limit) + " rows)");
  }
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i] >= rows[i - 1]) {
      throw ContractError(std::string(op) + ": rows must be strictly descending");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// PatchStore

PatchStore::PatchStore(StoreKind kind, uint64_t rows, uint64_t shard_bits)
    : kind_(kind), rows_(rows) {
  if (kind == StoreKind::kBitmap) {
    store_.emplace<ShardedBitmap>(rows, shard_bits);
  } else {
    store_.emplace<std::vector<uint64_t>>();
  }
}

void PatchStore::check_row(uint64_t row, const char* op) const {
  if (row >= rows_) {
    throw BoundsError(std::string(op) + ": row " + std::to_string(row) + " out of range (" +
                      std::to_string(rows_) + " rows)");
  }
}

bool PatchStore::is_patch(uint64_t row) const {
  check_row(row, "is_patch");
  if (kind_ == StoreKind::kBitmap) return std::get<ShardedBitmap>(store_).get(row);
  const auto& ids = std::get<std::vector<uint64_t>>(store_);
  return std::binary_search(ids.begin(), ids.end(), row);
}

void PatchStore::add_patches(std::span<const uint64_t> rows) {
  for (uint64_t r : rows) check_row(r, "add_patches");
  if (kind_ == StoreKind::kBitmap) {
    auto& bm = std::get<ShardedBitmap>(store_);
    for (uint64_t r : rows) {
      if (!bm.get(r)) {
        bm.set(r);
        ++patches_;
      }
    }
    return;
  }
  std::vector<uint64_t> add(rows.begin(), rows.end());
  std::sort(add.begin(), add.end());
  add.erase(std::unique(add.begin(), add.end()), add.end());
  auto& ids = std::get<std::vector<uint64_t>>(store_);
  std::vector<uint64_t> merged;
  merged.reserve(ids.size() + add.size());
  std::set_union(ids.begin(), ids.end(), add.begin(), add.end(), std::back_inserter(merged));
  ids = std::move(merged);
  patches_ = ids.size();
}

void PatchStore::remove_patches(std::span<const uint64_t> rows) {
  for (uint64_t r : rows) check_row(r, "remove_patches");
  if (kind_ == StoreKind::kBitmap) {
    auto& bm = std::get<ShardedBitmap>(store_);
    for (uint64_t r : rows) {
      if (bm.get(r)) {
        bm.unset(r);
        --patches_;
      }
    }
    return;
  }
  std::vector<uint64_t> drop(rows.begin(), rows.end());
  std::sort(drop.begin(), drop.end());
  auto& ids = std::get<std::vector<uint64_t>>(store_);
  std::vector<uint64_t> kept;
  kept.reserve(ids.size());
  std::set_difference(ids.begin(), ids.end(), drop.begin(), drop.end(), std::back_inserter(kept));
  ids = std::move(kept);
  patches_ = ids.size();
}

void PatchStore::drop_rows(std::span<const uint64_t> descending, WorkerPool* pool) {
  if (descending.empty()) return;
  check_descending(descending, rows_, "drop_rows");
  if (kind_ == StoreKind::kBitmap) {
    auto& bm = std::get<ShardedBitmap>(store_);
    for (uint64_t r : descending) patches_ -= bm.get(r) ? 1 : 0;
    bm.bulk_erase(descending, pool);
  } else {
    // One pass: skip deleted identifiers, decrement the rest by the number of
    // deleted rows below them.
    auto& ids = std::get<std::vector<uint64_t>>(store_);
    auto del = descending.rbegin();
    uint64_t below = 0;
    size_t out = 0;
    for (size_t i = 0; i < ids.size(); ++i) {
      const uint64_t id = ids[i];
      while (del != descending.rend() && *del < id) {
        ++below;
        ++del;
      }
      if (del != descending.rend() && *del == id) continue;
      ids[out++] = id - below;
    }
    ids.resize(out);
    patches_ = out;
  }
  rows_ -= descending.size();
}

void PatchStore::grow(uint64_t new_rows) {
  if (kind_ == StoreKind::kBitmap) std::get<ShardedBitmap>(store_).append(new_rows);
  rows_ += new_rows;
}

size_t PatchStore::memory_bytes() const {
  if (kind_ == StoreKind::kBitmap) return std::get<ShardedBitmap>(store_).memory_bytes();
  return std::get<std::vector<uint64_t>>(store_).size() * sizeof(uint64_t) + sizeof(PatchStore);
}

std::vector<uint64_t> PatchStore::patches() const {
  if (kind_ == StoreKind::kIdentifiers) return std::get<std::vector<uint64_t>>(store_);
  std::vector<uint64_t> out;
  out.reserve(patches_);
  for_each_patch([&](uint64_t r) { out.push_back(r); });
  return out;
}

// ---------------------------------------------------------------------------
// Discovery

std::vector<uint64_t> nuc_patches(const IntVector& column) {
  const size_t n = column.size();
  std::vector<int64_t> sorted;
  sorted.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    if (!column.is_null(i)) sorted.push_back(column.values[i]);
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<int64_t> dups;
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1] && (dups.empty() || dups.back() != sorted[i])) {
      dups.push_back(sorted[i]);
    }
  }
  std::vector<uint64_t> patches;
  for (size_t i = 0; i < n; ++i) {
    if (column.is_null(i) ||
        std::binary_search(dups.begin(), dups.end(), column.values[i])) {
      patches.push_back(i);
    }
  }
  return patches;
}

SortedPatches nsc_patches(const IntVector& column, SortOrder order) {
  const size_t n = column.size();
  std::vector<int64_t> values;
  std::vector<uint64_t> rows;
  values.reserve(n);
  rows.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    if (column.is_null(i)) continue;
    values.push_back(column.values[i]);
    rows.push_back(i);
  }
  const std::vector<size_t> keep = longest_sorted_subsequence(values, order);
  SortedPatches out;
  out.patches.reserve(n - keep.size());
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    if (k < keep.size() && rows[keep[k]] == i) {
      ++k;
      continue;
    }
    out.patches.push_back(i);
  }
  if (!keep.empty()) {
    out.tail_row = rows[keep.back()];
    out.tail_value = values[keep.back()];
  }
  return out;
}

// ---------------------------------------------------------------------------
// PatchIndex

PatchIndex::PatchIndex(std::string column, Constraint constraint,
                       std::span<const uint64_t> partition_rows, const IndexOptions& options)
    : column_(std::move(column)), constraint_(constraint), options_(options) {
  if (partition_rows.empty()) throw ConfigError("an index needs at least one partition");
  parts_.reserve(partition_rows.size());
  for (uint64_t rows : partition_rows) parts_.emplace_back(options.store, rows, options.shard_bits);
  recompute_offsets();
}

void PatchIndex::recompute_offsets() {
  offsets_.assign(parts_.size() + 1, 0);
  for (size_t i = 0; i < parts_.size(); ++i) offsets_[i + 1] = offsets_[i] + parts_[i].row_count();
}

PatchIndex PatchIndex::discover(const ColumnTable& table, std::string_view column,
                                Constraint constraint, const IndexOptions& options) {
  const size_t col = table.schema().index_of(column);
  if (table.schema().columns[col].type != ColumnType::kInt64) {
    throw PlanError("patch indexes need an integer column, '" + std::string(column) + "' is not");
  }
  const IntVector values = table.column_values(col);

  std::vector<uint64_t> patches;
  SortedPatches sorted;
  if (constraint.is_unique()) {
    patches = nuc_patches(values);
  } else {
    sorted = nsc_patches(values, constraint.order);
    patches = std::move(sorted.patches);
  }

  const std::vector<uint64_t> offsets = table.partition_offsets();
  std::vector<uint64_t> rows(table.partition_count());
  for (size_t p = 0; p < rows.size(); ++p) rows[p] = offsets[p + 1] - offsets[p];
  PatchIndex index(std::string(column), constraint, rows, options);

  auto fill = [&](size_t p) {
    auto lo = std::lower_bound(patches.begin(), patches.end(), offsets[p]);
    auto hi = std::lower_bound(lo, patches.end(), offsets[p + 1]);
    std::vector<uint64_t> local;
    local.reserve(static_cast<size_t>(hi - lo));
    for (auto it = lo; it != hi; ++it) local.push_back(*it - offsets[p]);
    index.parts_[p].add_patches(local);
  };
  if (options.pool) {
    options.pool->run(rows.size(), fill);
  } else {
    for (size_t p = 0; p < rows.size(); ++p) fill(p);
  }
  index.tail_row_ = sorted.tail_row;
  index.tail_value_ = sorted.tail_value;
  return index;
}

uint64_t PatchIndex::patch_count() const {
  uint64_t n = 0;
  for (const auto& p : parts_) n += p.patch_count();
  return n;
}

double PatchIndex::exception_rate() const {
  const uint64_t rows = row_count();
  return rows == 0 ? 0.0 : static_cast<double>(patch_count()) / static_cast<double>(rows);
}

size_t PatchIndex::memory_bytes() const {
  size_t n = 0;
  for (const auto& p : parts_) n += p.memory_bytes();
  return n;
}

std::pair<size_t, uint64_t> PatchIndex::locate(uint64_t rowid) const {
  if (rowid >= row_count()) {
    throw BoundsError("rowID " + std::to_string(rowid) + " out of range for index over " +
                      std::to_string(row_count()) + " rows");
  }
  const size_t p = static_cast<size_t>(
      std::upper_bound(offsets_.begin(), offsets_.end(), rowid) - offsets_.begin() - 1);
  return {p, rowid - offsets_[p]};
}

bool PatchIndex::is_patch(uint64_t rowid) const {
  const auto [p, local] = locate(rowid);
  return parts_[p].is_patch(local);
}

std::vector<uint64_t> PatchIndex::patches() const {
  std::vector<uint64_t> out;
  out.reserve(patch_count());
  for (size_t p = 0; p < parts_.size(); ++p) {
    const uint64_t base = offsets_[p];
    parts_[p].for_each_patch([&](uint64_t r) { out.push_back(base + r); });
  }
  return out;
}

void PatchIndex::add_patches(std::span<const uint64_t> rowids) {
  std::vector<std::vector<uint64_t>> local(parts_.size());
  for (uint64_t id : rowids) {
    const auto [p, r] = locate(id);
    local[p].push_back(r);
  }
  for (size_t p = 0; p < parts_.size(); ++p) {
    if (!local[p].empty()) parts_[p].add_patches(local[p]);
  }
}

void PatchIndex::remove_patches(std::span<const uint64_t> rowids) {
  std::vector<std::vector<uint64_t>> local(parts_.size());
  for (uint64_t id : rowids) {
    const auto [p, r] = locate(id);
    local[p].push_back(r);
  }
  for (size_t p = 0; p < parts_.size(); ++p) {
    if (!local[p].empty()) parts_[p].remove_patches(local[p]);
  }
}

void PatchIndex::drop_rows(std::span<const uint64_t> descending) {
  if (descending.empty()) return;
  check_descending(descending, row_count(), "drop_rows");
  std::vector<std::vector<uint64_t>> local(parts_.size());
  for (uint64_t id : descending) {
    const auto [p, r] = locate(id);
    local[p].push_back(r);
  }
  if (tail_row_) {
    const uint64_t tail = *tail_row_;
    const bool deleted = std::binary_search(descending.begin(), descending.end(), tail,
                                            std::greater<>());
    const auto below = static_cast<uint64_t>(
        descending.end() -
        std::lower_bound(descending.begin(), descending.end(), tail, std::greater<>()));
    if (deleted) {
      // Caller refreshes the tail against the table.
      tail_row_.reset();
    } else {
      tail_row_ = tail - below;
    }
  }
  for (size_t p = 0; p < parts_.size(); ++p) {
    if (!local[p].empty()) parts_[p].drop_rows(local[p], options_.pool);
  }
  recompute_offsets();
}

void PatchIndex::grow(uint64_t new_rows) {
  parts_.back().grow(new_rows);
  offsets_.back() += new_rows;
}

void PatchIndex::refresh_tail(const ColumnTable& table) {
  if (!constraint_.is_sorted()) return;
  const size_t col = table.schema().index_of(column_);
  for (uint64_t r = row_count(); r-- > 0;) {
    if (!is_patch(r)) {
      tail_row_ = r;
      tail_value_ = table.int_value(col, r);
      return;
    }
  }
  tail_row_.reset();
  tail_value_.reset();
}

bool PatchIndex::matches(const ColumnTable& table) const {
  return table.partition_offsets() == offsets_;
}

bool constraint_holds(const ColumnTable& table, const PatchIndex& index, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (!index.matches(table)) return fail("index row layout does not match the table");
  const size_t col = table.schema().index_of(index.column());
  const IntVector values = table.column_values(col);
  const uint64_t n = values.size();

  // Walk the patch list alongside the rows instead of probing per row.
  const std::vector<uint64_t> patches = index.patches();
  size_t next_patch = 0;
  auto is_patch = [&](uint64_t r) {
    while (next_patch < patches.size() && patches[next_patch] < r) ++next_patch;
    return next_patch < patches.size() && patches[next_patch] == r;
  };

  if (index.constraint().is_unique()) {
    std::unordered_set<int64_t> seen;
    seen.reserve(n - patches.size());
    for (uint64_t r = 0; r < n; ++r) {
      if (is_patch(r)) continue;
      if (values.is_null(r)) return fail("NULL at non-patch row " + std::to_string(r));
      if (!seen.insert(values.values[r]).second) {
        return fail("duplicate value " + std::to_string(values.values[r]) +
                    " at non-patch row " + std::to_string(r));
      }
    }
    // The exclude flow and the patch flow must not share values.
    for (uint64_t r : patches) {
      if (!values.is_null(r) && seen.count(values.values[r])) {
        return fail("value " + std::to_string(values.values[r]) + " of patch row " +
                    std::to_string(r) + " also occurs at a non-patch row");
      }
    }
    return true;
  }

  const SortOrder order = index.constraint().order;
  std::optional<int64_t> last;
  std::optional<uint64_t> last_row;
  for (uint64_t r = 0; r < n; ++r) {
    if (is_patch(r)) continue;
    if (values.is_null(r)) return fail("NULL at non-patch row " + std::to_string(r));
    const int64_t v = values.values[r];
    if (last && !in_order(*last, v, order)) {
      return fail("order violated at non-patch row " + std::to_string(r));
    }
    last = v;
    last_row = r;
  }
  if (last != index.last_sorted_value() || last_row != index.tail_row()) {
    return fail("last_sorted_value does not match the last non-patch row");
  }
  return true;
}

}  // namespace patchindex
