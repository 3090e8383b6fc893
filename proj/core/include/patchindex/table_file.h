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

// Single-file binary table format, little-endian:
//
//   "PDX1"                          magic
//   u64 block_size
//   u32 column_count
//   per column: u16 name_len, name, u8 type, u32 width, u8 flags
//               (flags bit 0 = nullable, bit 1 = declared sorted)
//   u32 partition_count
//   per partition: u64 rows, then per column the value array
//               (i64 * rows or width * rows bytes) followed by
//               rows validity bytes when nullable
//   per partition, per integer column: u64 blocks, blocks * (i64 min,
//               i64 max, u8 any)
//
// The insert delta is never written; save() rejects tables with delta rows.

#pragma once

#include <iosfwd>
#include <string>

#include "patchindex/column_store.h"
#include "patchindex/patch_index.h"

namespace patchindex {

class TableFile {
 public:
  static void save(const ColumnTable& table, const std::string& path);
  static ColumnTable load(const std::string& path);

  static void write(const ColumnTable& table, std::ostream& out);
  static ColumnTable read(std::istream& in);
};

// Patch index persistence: column, constraint, store settings, partition
// layout, patch rowIDs and the sorted tail.
class IndexFile {
 public:
  static void save(const PatchIndex& index, const std::string& path);
  static PatchIndex load(const std::string& path, WorkerPool* pool = nullptr);

  static void write(const PatchIndex& index, std::ostream& out);
  static PatchIndex read(std::istream& in, WorkerPool* pool = nullptr);
};

}  // namespace patchindex
