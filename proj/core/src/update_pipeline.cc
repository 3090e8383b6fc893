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

#include "patchindex/update_pipeline.h"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "patchindex/error.h"
#include "patchindex/sorted_subsequence.h"

namespace patchindex {

namespace {

void check_layout(const ColumnTable& table, const PatchIndex& index, const char* op) {
  if (!index.matches(table)) {
    throw ContractError(std::string(op) + ": index does not match the table layout");
  }
}

void add_patches(PatchIndex& index, std::vector<uint64_t>& rows, UpdateStats* stats) {
  if (rows.empty()) return;
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  const uint64_t before = index.patch_count();
  index.add_patches(rows);
  if (stats) stats->patches_added += index.patch_count() - before;
}

// Patches every row of `probe` whose value also occurs on another row.
void join_duplicates(const ColumnTable& table, PatchIndex& index,
                     std::span<const uint64_t> probe, UpdateStats* stats) {
  const size_t col = table.schema().index_of(index.column());
  std::vector<uint64_t> patches;
  std::unordered_map<int64_t, std::vector<uint64_t>> build;
  build.reserve(probe.size());
  for (uint64_t row : probe) {
    const auto v = table.int_value(col, row);
    if (!v) {
      patches.push_back(row);
      continue;
    }
    build[*v].push_back(row);
  }
  if (!build.empty()) {
    std::vector<int64_t> keys;
    keys.reserve(build.size());
    for (const auto& [k, rows] : build) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    const ValueFilter filter{keys.front(), keys.back(), keys};

    std::vector<ScanRange> ranges;
    ranges.reserve(table.partition_count());
    uint64_t total_blocks = 0;
    for (size_t p = 0; p < table.partition_count(); ++p) {
      ranges.push_back(table.partition(p).prune_blocks(col, filter));
      total_blocks += table.partition(p).block_count();
    }
    ScanStats scan_stats;
    const std::string name = index.column();
    const RowBatch batch = table.scan(std::span<const std::string>(&name, 1), &ranges, &scan_stats);
    const IntVector& values = batch.columns[0];
    for (size_t r = 0; r < values.size(); ++r) {
      if (values.is_null(r)) continue;
      auto it = build.find(values.values[r]);
      if (it == build.end()) continue;
      const uint64_t rowid = batch.rowids[r];
      for (uint64_t partner : it->second) {
        if (partner == rowid) continue;
        patches.push_back(partner);
        patches.push_back(rowid);
      }
    }
    if (stats) {
      stats->blocks_scanned += scan_stats.blocks_scanned;
      stats->blocks_total += total_blocks;
    }
  }
  add_patches(index, patches, stats);
}

void check_inserted(const ColumnTable& table, const PatchIndex& index,
                    std::span<const uint64_t> inserted, const char* op) {
  const uint64_t old_rows = index.row_count();
  if (table.row_count() != old_rows + inserted.size()) {
    throw ContractError(std::string(op) + ": inserted count does not match the table growth");
  }
  for (size_t i = 0; i < inserted.size(); ++i) {
    if (inserted[i] != old_rows + i) {
      throw ContractError(std::string(op) + ": inserted rowIDs must be the appended rows");
    }
  }
}

void check_rows(const PatchIndex& index, std::span<const uint64_t> rows, const char* op) {
  for (uint64_t r : rows) {
    if (r >= index.row_count()) throw BoundsError(std::string(op) + ": rowID out of range");
  }
}

}  // namespace

void handle_insert_nuc(const ColumnTable& table, PatchIndex& index,
                       std::span<const uint64_t> inserted, UpdateStats* stats) {
  if (!index.constraint().is_unique()) throw ContractError("handle_insert_nuc: index is not NUC");
  check_inserted(table, index, inserted, "handle_insert_nuc");
  index.grow(inserted.size());
  check_layout(table, index, "handle_insert_nuc");
  join_duplicates(table, index, inserted, stats);
}

void handle_insert_nsc(const ColumnTable& table, PatchIndex& index,
                       std::span<const uint64_t> inserted, UpdateStats* stats) {
  if (!index.constraint().is_sorted()) throw ContractError("handle_insert_nsc: index is not NSC");
  check_inserted(table, index, inserted, "handle_insert_nsc");
  index.grow(inserted.size());
  check_layout(table, index, "handle_insert_nsc");
  const size_t col = table.schema().index_of(index.column());
  const SortOrder order = index.constraint().order;
  const auto last = index.last_sorted_value();

  // Candidates continue the current subsequence.
  std::vector<uint64_t> cand_rows;
  std::vector<int64_t> cand_values;
  for (uint64_t row : inserted) {
    const auto v = table.int_value(col, row);
    if (v && (!last || in_order(*last, *v, order))) {
      cand_rows.push_back(row);
      cand_values.push_back(*v);
    }
  }
  const std::vector<size_t> keep = longest_sorted_subsequence(cand_values, order);
  std::vector<uint64_t> members;
  members.reserve(keep.size());
  for (size_t i : keep) members.push_back(cand_rows[i]);

  std::vector<uint64_t> patches;
  size_t m = 0;
  for (uint64_t row : inserted) {
    if (m < members.size() && members[m] == row) {
      ++m;
    } else {
      patches.push_back(row);
    }
  }
  add_patches(index, patches, stats);
  if (!keep.empty()) index.set_tail(cand_rows[keep.back()], cand_values[keep.back()]);
}

void handle_modify_nuc(const ColumnTable& table, PatchIndex& index,
                       std::span<const uint64_t> modified, UpdateStats* stats) {
  if (!index.constraint().is_unique()) throw ContractError("handle_modify_nuc: index is not NUC");
  check_layout(table, index, "handle_modify_nuc");
  check_rows(index, modified, "handle_modify_nuc");
  index.remove_patches(modified);
  join_duplicates(table, index, modified, stats);
}

void handle_modify_nsc(const ColumnTable& table, PatchIndex& index,
                       std::span<const uint64_t> modified, UpdateStats* stats) {
  if (!index.constraint().is_sorted()) throw ContractError("handle_modify_nsc: index is not NSC");
  check_layout(table, index, "handle_modify_nsc");
  check_rows(index, modified, "handle_modify_nsc");
  std::vector<uint64_t> rows(modified.begin(), modified.end());
  add_patches(index, rows, stats);
  const auto tail = index.tail_row();
  if (tail && std::binary_search(rows.begin(), rows.end(), *tail)) index.refresh_tail(table);
}

void handle_delete(const ColumnTable& table, PatchIndex& index,
                   std::span<const uint64_t> descending) {
  if (descending.empty()) return;
  const auto tail = index.tail_row();
  const bool tail_deleted =
      tail && std::binary_search(descending.begin(), descending.end(), *tail, std::greater<>());
  index.drop_rows(descending);
  check_layout(table, index, "handle_delete");
  if (index.constraint().is_sorted() && tail_deleted) index.refresh_tail(table);
}

std::vector<uint64_t> insert_statement(ColumnTable& table, std::span<PatchIndex* const> indexes,
                                       const std::vector<Row>& rows, UpdateStats* stats) {
  const std::vector<uint64_t> ids = table.insert_rows(rows);
  for (PatchIndex* index : indexes) {
    if (index->constraint().is_unique()) {
      handle_insert_nuc(table, *index, ids, stats);
    } else {
      handle_insert_nsc(table, *index, ids, stats);
    }
  }
  table.merge_delta();
  return ids;
}

void modify_statement(ColumnTable& table, std::span<PatchIndex* const> indexes,
                      std::span<const uint64_t> rowids, size_t col, std::span<const Value> values,
                      UpdateStats* stats) {
  table.modify_rows(rowids, col, values);
  const std::string& name = table.schema().columns.at(col).name;
  for (PatchIndex* index : indexes) {
    if (index->column() != name) continue;
    if (index->constraint().is_unique()) {
      handle_modify_nuc(table, *index, rowids, stats);
    } else {
      handle_modify_nsc(table, *index, rowids, stats);
    }
  }
}

void delete_statement(ColumnTable& table, std::span<PatchIndex* const> indexes,
                      std::vector<uint64_t> rowids) {
  std::sort(rowids.begin(), rowids.end(), std::greater<>());
  rowids.erase(std::unique(rowids.begin(), rowids.end()), rowids.end());
  table.delete_rows(rowids);
  for (PatchIndex* index : indexes) handle_delete(table, *index, rowids);
}

}  // namespace patchindex
