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

// Keeps patch indexes consistent with table inserts, modifies and deletes.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "patchindex/column_store.h"
#include "patchindex/patch_index.h"

namespace patchindex {

struct UpdateStats {
  uint64_t blocks_scanned = 0;  // table blocks read by duplicate probes
  uint64_t blocks_total = 0;    // table blocks at probe time
  uint64_t patches_added = 0;
};

// `inserted` are the rowIDs just appended to the table (the last rows); the
// index has not been grown yet. Joins the inserted values against the blocks
// whose zone maps admit them and patches both rows of every match.
void handle_insert_nuc(const ColumnTable& table, PatchIndex& index,
                       std::span<const uint64_t> inserted, UpdateStats* stats = nullptr);

// Extends the sorted subsequence with the longest run of inserted values that
// continues it; the other inserted rows become patches.
void handle_insert_nsc(const ColumnTable& table, PatchIndex& index,
                       std::span<const uint64_t> inserted, UpdateStats* stats = nullptr);

// Clears the modified rows' patches, then re-runs the duplicate join for them.
void handle_modify_nuc(const ColumnTable& table, PatchIndex& index,
                       std::span<const uint64_t> modified, UpdateStats* stats = nullptr);

// Every modified row becomes a patch.
void handle_modify_nsc(const ColumnTable& table, PatchIndex& index,
                       std::span<const uint64_t> modified, UpdateStats* stats = nullptr);

// `descending` rows were already removed from `table`.
void handle_delete(const ColumnTable& table, PatchIndex& index,
                   std::span<const uint64_t> descending);

// Statement-level entry points: change the table, maintain every index on it,
// then merge the insert delta.
std::vector<uint64_t> insert_statement(ColumnTable& table, std::span<PatchIndex* const> indexes,
                                       const std::vector<Row>& rows, UpdateStats* stats = nullptr);
void modify_statement(ColumnTable& table, std::span<PatchIndex* const> indexes,
                      std::span<const uint64_t> rowids, size_t col, std::span<const Value> values,
                      UpdateStats* stats = nullptr);
// Row IDs in any order; duplicates are ignored.
void delete_statement(ColumnTable& table, std::span<PatchIndex* const> indexes,
                      std::vector<uint64_t> rowids);

}  // namespace patchindex
