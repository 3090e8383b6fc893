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

#include "patchindex/table_file.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "patchindex/error.h"

namespace patchindex {

static_assert(std::endian::native == std::endian::little,
              "table files are written in host byte order, which must be little-endian");

namespace {

constexpr char kMagic[4] = {'P', 'D', 'X', '1'};
constexpr uint8_t kFlagNullable = 1;
constexpr uint8_t kFlagSorted = 2;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw FormatError("table file truncated");
  }
  return v;
}

template <typename T>
void put_array(std::ostream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
std::vector<T> get_array(std::istream& in, uint64_t n) {
  std::vector<T> v(n);
  if (n && !in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)))) {
    throw FormatError("table file truncated");
  }
  return v;
}

}  // namespace

void TableFile::write(const ColumnTable& table, std::ostream& out) {
  if (table.has_delta()) throw FormatError("merge the insert delta before saving a table");
  const Schema& schema = table.schema();
  out.write(kMagic, 4);
  put<uint64_t>(out, table.block_size());
  put<uint32_t>(out, static_cast<uint32_t>(schema.columns.size()));
  for (size_t c = 0; c < schema.columns.size(); ++c) {
    const ColumnSpec& spec = schema.columns[c];
    put<uint16_t>(out, static_cast<uint16_t>(spec.name.size()));
    out.write(spec.name.data(), static_cast<std::streamsize>(spec.name.size()));
    put<uint8_t>(out, static_cast<uint8_t>(spec.type));
    put<uint32_t>(out, spec.width);
    uint8_t flags = 0;
    if (spec.nullable) flags |= kFlagNullable;
    if (table.is_sorted(c)) flags |= kFlagSorted;
    put<uint8_t>(out, flags);
  }
  put<uint32_t>(out, static_cast<uint32_t>(table.partition_count()));
  for (size_t p = 0; p < table.partition_count(); ++p) {
    const Segment& seg = table.partition(p).persisted();
    put<uint64_t>(out, seg.rows);
    for (size_t c = 0; c < schema.columns.size(); ++c) {
      const ColumnData& data = seg.columns[c];
      if (schema.columns[c].type == ColumnType::kInt64) {
        put_array(out, data.ints);
      } else {
        put_array(out, data.chars);
      }
      if (schema.columns[c].nullable) put_array(out, data.valid);
    }
  }
  for (size_t p = 0; p < table.partition_count(); ++p) {
    const Segment& seg = table.partition(p).persisted();
    for (size_t c = 0; c < schema.columns.size(); ++c) {
      if (schema.columns[c].type != ColumnType::kInt64) continue;
      const auto& zones = seg.zones[c];
      put<uint64_t>(out, zones.size());
      for (const ZoneEntry& z : zones) {
        put<int64_t>(out, z.min);
        put<int64_t>(out, z.max);
        put<uint8_t>(out, z.any ? 1 : 0);
      }
    }
  }
  if (!out) throw FormatError("failed writing table file");
}

ColumnTable TableFile::read(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("not a table file (bad magic)");
  }
  const uint64_t block_size = get<uint64_t>(in);
  const uint32_t ncols = get<uint32_t>(in);
  Schema schema;
  std::vector<bool> sorted;
  for (uint32_t c = 0; c < ncols; ++c) {
    ColumnSpec spec;
    const uint16_t len = get<uint16_t>(in);
    spec.name.resize(len);
    if (len && !in.read(spec.name.data(), len)) throw FormatError("table file truncated");
    const uint8_t type = get<uint8_t>(in);
    if (type != static_cast<uint8_t>(ColumnType::kInt64) &&
        type != static_cast<uint8_t>(ColumnType::kFixedString)) {
      throw FormatError("unknown column type " + std::to_string(type));
    }
    spec.type = static_cast<ColumnType>(type);
    spec.width = get<uint32_t>(in);
    const uint8_t flags = get<uint8_t>(in);
    spec.nullable = flags & kFlagNullable;
    sorted.push_back(flags & kFlagSorted);
    schema.columns.push_back(std::move(spec));
  }
  const uint32_t nparts = get<uint32_t>(in);
  if (nparts == 0) throw FormatError("table file has no partitions");
  ColumnTable table(schema, nparts, block_size);
  for (uint32_t p = 0; p < nparts; ++p) {
    const uint64_t rows = get<uint64_t>(in);
    for (size_t c = 0; c < schema.columns.size(); ++c) {
      const ColumnSpec& spec = schema.columns[c];
      if (spec.type == ColumnType::kInt64) {
        auto ints = get_array<int64_t>(in, rows);
        auto valid = spec.nullable ? get_array<uint8_t>(in, rows) : std::vector<uint8_t>{};
        table.load_int_column(p, c, std::move(ints), std::move(valid));
      } else {
        table.load_string_column(p, c, get_array<char>(in, rows * spec.width));
        if (spec.nullable) {
          table.partitions_[p].persisted_.columns[c].valid = get_array<uint8_t>(in, rows);
        }
      }
    }
    table.finish_load(p, rows);
  }
  // Zone maps are rebuilt by finish_load; the stored copy must agree.
  for (uint32_t p = 0; p < nparts; ++p) {
    const Segment& seg = table.partition(p).persisted();
    for (size_t c = 0; c < schema.columns.size(); ++c) {
      if (schema.columns[c].type != ColumnType::kInt64) continue;
      const uint64_t blocks = get<uint64_t>(in);
      if (blocks != seg.zones[c].size()) throw FormatError("zone map block count mismatch");
      for (uint64_t b = 0; b < blocks; ++b) {
        ZoneEntry z;
        z.min = get<int64_t>(in);
        z.max = get<int64_t>(in);
        z.any = get<uint8_t>(in) != 0;
        const ZoneEntry& have = seg.zones[c][b];
        // Stored zones may be wider than exact ones after in-place modifies.
        if (z.any != have.any || (have.any && (z.min > have.min || z.max < have.max))) {
          throw FormatError("zone map does not cover the stored values");
        }
        table.partitions_[p].persisted_.zones[c][b] = z;
      }
    }
  }
  for (size_t c = 0; c < sorted.size(); ++c) {
    if (sorted[c] && !table.declare_sorted(c)) {
      throw FormatError("column '" + schema.columns[c].name + "' flagged sorted but is not");
    }
  }
  return table;
}

void TableFile::save(const ColumnTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  write(table, out);
}

ColumnTable TableFile::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return read(in);
}

namespace {

constexpr char kIndexMagic[4] = {'P', 'X', 'I', '1'};

}  // namespace

void IndexFile::write(const PatchIndex& index, std::ostream& out) {
  out.write(kIndexMagic, 4);
  put<uint16_t>(out, static_cast<uint16_t>(index.column().size()));
  out.write(index.column().data(), static_cast<std::streamsize>(index.column().size()));
  put<uint8_t>(out, static_cast<uint8_t>(index.constraint().type));
  put<uint8_t>(out, static_cast<uint8_t>(index.constraint().order));
  put<uint8_t>(out, static_cast<uint8_t>(index.store_kind()));
  put<uint64_t>(out, index.options().shard_bits);
  put<uint32_t>(out, static_cast<uint32_t>(index.partition_count()));
  for (size_t p = 0; p < index.partition_count(); ++p) {
    put<uint64_t>(out, index.partition(p).row_count());
  }
  const std::vector<uint64_t> patches = index.patches();
  put<uint64_t>(out, patches.size());
  put_array(out, patches);
  const auto tail = index.tail_row();
  put<uint8_t>(out, tail ? 1 : 0);
  put<uint64_t>(out, tail.value_or(0));
  put<int64_t>(out, index.last_sorted_value().value_or(0));
  if (!out) throw FormatError("index write failed");
}

PatchIndex IndexFile::read(std::istream& in, WorkerPool* pool) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kIndexMagic, 4) != 0) {
    throw FormatError("not a patch index file");
  }
  const auto name_len = get<uint16_t>(in);
  std::string column(name_len, '\0');
  if (name_len && !in.read(column.data(), name_len)) throw FormatError("index file truncated");
  const auto type = get<uint8_t>(in);
  const auto order = get<uint8_t>(in);
  const auto store = get<uint8_t>(in);
  if (type > 1 || order > 1 || store > 1) throw FormatError("bad index settings");
  IndexOptions options;
  options.store = static_cast<StoreKind>(store);
  options.shard_bits = get<uint64_t>(in);
  options.pool = pool;
  const auto parts = get<uint32_t>(in);
  std::vector<uint64_t> rows(parts);
  for (auto& r : rows) r = get<uint64_t>(in);
  const Constraint constraint{static_cast<ConstraintType>(type), static_cast<SortOrder>(order)};
  PatchIndex index(column, constraint, rows, options);
  const auto count = get<uint64_t>(in);
  const std::vector<uint64_t> patches = get_array<uint64_t>(in, count);
  for (uint64_t p : patches) {
    if (p >= index.row_count()) throw FormatError("patch rowID out of range");
  }
  index.add_patches(patches);
  const bool has_tail = get<uint8_t>(in) != 0;
  const auto tail_row = get<uint64_t>(in);
  const auto tail_value = get<int64_t>(in);
  if (has_tail) {
    if (tail_row >= index.row_count()) throw FormatError("tail rowID out of range");
    index.set_tail(tail_row, tail_value);
  }
  return index;
}

void IndexFile::save(const PatchIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write(index, out);
}

PatchIndex IndexFile::load(const std::string& path, WorkerPool* pool) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read(in, pool);
}

}  // namespace patchindex

