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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.h"
#include "patchindex/error.h"

namespace patchindex {
namespace {

using testing::column_of;
using testing::make_table;

const std::vector<std::string> kKeyValue{"key", "value"};

TEST(ColumnStore, EmptyTableScan) {
  ColumnTable t(testing::key_value_schema(), 2, 4);
  EXPECT_EQ(t.row_count(), 0u);
  EXPECT_EQ(t.scan(kKeyValue).row_count(), 0u);
  EXPECT_EQ(t.scan_delta(kKeyValue).row_count(), 0u);
}

TEST(ColumnStore, FullScanCardinalityAndOrder) {
  const auto t = make_table(std::vector<int64_t>{5, 3, 9, 1, 7, 2, 8}, 3, 2);
  const RowBatch b = t.scan(kKeyValue);
  EXPECT_EQ(b.row_count(), 7u);
  EXPECT_EQ(testing::batch_column(b, "value"),
            (std::vector<std::optional<int64_t>>{5, 3, 9, 1, 7, 2, 8}));
  EXPECT_EQ(t.partition_offsets(), (std::vector<uint64_t>{0, 2, 4, 7}));
  EXPECT_EQ(t.locate(4).partition, 2u);
  EXPECT_EQ(t.locate(4).row, 0u);
  EXPECT_THROW(t.locate(7), BoundsError);
  const std::vector<std::string> bad{"nope"};
  EXPECT_THROW(t.scan(bad), PlanError);
}

TEST(ColumnStore, RangeScanEqualsFilteredScan) {
  std::mt19937_64 rng(31);
  std::vector<int64_t> v(1000);
  for (auto& x : v) x = static_cast<int64_t>(rng() % 1000);
  const auto t = make_table(v, 2, 16);
  std::vector<ScanRange> ranges(2);
  ranges[0].add(10, 40);
  ranges[0].add(40, 50);
  ranges[0].add(100, 120);
  ranges[1].add(0, 5);
  ScanStats stats;
  const RowBatch b = t.scan(kKeyValue, &ranges, &stats);
  std::vector<std::optional<int64_t>> expect;
  for (uint64_t r = 10; r < 50; ++r) expect.push_back(v[r]);
  for (uint64_t r = 100; r < 120; ++r) expect.push_back(v[r]);
  for (uint64_t r = 500; r < 505; ++r) expect.push_back(v[r]);
  EXPECT_EQ(testing::batch_column(b, "value"), expect);
  EXPECT_EQ(ranges[0].intervals.size(), 2u);
  EXPECT_EQ(ranges[0].row_count(), 60u);
  EXPECT_EQ(stats.rows_scanned, 65u);
  EXPECT_EQ(b.rowids.front(), 10u);
  EXPECT_EQ(b.rowids.back(), 504u);
}

TEST(ColumnStore, PruneBlocks) {
  const auto t = make_table(std::vector<int64_t>{0, 1, 2, 3, 10, 11, 12, 13, 20, 21}, 1, 4);
  const Partition& p = t.partition(0);
  const size_t col = t.schema().index_of("value");
  EXPECT_TRUE(p.prune_blocks(col, ValueFilter{100, 200, {}}).empty());
  EXPECT_EQ(p.prune_blocks(col, ValueFilter{-100, 200, {}}).row_count(), 10u);
  const ScanRange mid = p.prune_blocks(col, ValueFilter{11, 11, {}});
  ASSERT_EQ(mid.intervals.size(), 1u);
  EXPECT_EQ(mid.intervals[0], (ScanRange::Interval{4, 8}));
  EXPECT_EQ(p.blocks_in(mid), 1u);
  const std::vector<int64_t> cands{5, 20};
  EXPECT_EQ(p.prune_blocks(col, ValueFilter{5, 20, cands}).row_count(), 2u);
}

TEST(ColumnStore, PruneSoundnessAgainstFullScan) {
  std::mt19937_64 rng(32);
  std::vector<int64_t> v(3000);
  for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int64_t>(i / 3 + rng() % 40);
  const auto t = make_table(v, 3, 64);
  const size_t col = t.schema().index_of("value");
  for (int it = 0; it < 200; ++it) {
    int64_t lo = static_cast<int64_t>(rng() % 1100);
    int64_t hi = lo + static_cast<int64_t>(rng() % 50);
    std::vector<ScanRange> ranges;
    for (size_t p = 0; p < t.partition_count(); ++p) {
      ranges.push_back(t.partition(p).prune_blocks(col, ValueFilter{lo, hi, {}}));
    }
    const auto pruned = testing::batch_column(t.scan(kKeyValue, &ranges), "value");
    std::multiset<int64_t> got, want;
    for (auto x : pruned) {
      if (*x >= lo && *x <= hi) got.insert(*x);
    }
    for (auto x : v) {
      if (x >= lo && x <= hi) want.insert(x);
    }
    ASSERT_EQ(got, want);
  }
}

TEST(ColumnStore, InsertAssignsTrailingRowIds) {
  auto t = make_table(std::vector<int64_t>{1, 2, 3}, 2);
  std::vector<Row> rows;
  for (int64_t i = 0; i < 1000; ++i) rows.push_back({Value{100 + i}, Value{i}});
  const auto ids = t.insert_rows(rows);
  ASSERT_EQ(ids.size(), 1000u);
  EXPECT_EQ(ids.front(), 3u);
  EXPECT_EQ(ids.back(), 1002u);
  EXPECT_TRUE(t.has_delta());
  EXPECT_EQ(t.scan_delta(kKeyValue).row_count(), 1000u);
  EXPECT_EQ(t.scan(kKeyValue).row_count(), 1003u);
  t.merge_delta();
  EXPECT_FALSE(t.has_delta());
  EXPECT_EQ(t.scan_delta(kKeyValue).row_count(), 0u);
  EXPECT_EQ(t.row_count(), 1003u);
}

TEST(ColumnStore, DeltaZonesPrune) {
  auto t = make_table(std::vector<int64_t>{1, 2, 3, 4}, 1, 2);
  t.insert_rows({{Value{int64_t{9}}, Value{int64_t{500}}}, {Value{int64_t{10}}, Value{int64_t{501}}}});
  const size_t col = t.schema().index_of("value");
  const ScanRange r = t.partition(0).prune_blocks(col, ValueFilter{500, 500, {}});
  EXPECT_EQ(r.row_count(), 2u);
  EXPECT_EQ(r.intervals[0].begin, 4u);
}

TEST(ColumnStore, UpdatesMatchArrayModel) {
  std::mt19937_64 rng(33);
  for (int seq = 0; seq < 20; ++seq) {
    std::vector<std::optional<int64_t>> model(50 + rng() % 200);
    for (auto& x : model) x = static_cast<int64_t>(rng() % 1000);
    auto t = make_table(model, 1 + rng() % 4, 8);
    for (int op = 0; op < 100; ++op) {
      const unsigned kind = rng() % 4;
      if (kind == 0) {
        std::vector<Row> rows;
        const int n = 1 + static_cast<int>(rng() % 5);
        for (int i = 0; i < n; ++i) {
          const int64_t v = static_cast<int64_t>(rng() % 1000);
          rows.push_back({Value{int64_t{-1}}, Value{v}});
          model.push_back(v);
        }
        t.insert_rows(rows);
      } else if (kind == 1 && !model.empty()) {
        const uint64_t r = testing::uniform(rng, model.size());
        const int64_t v = static_cast<int64_t>(rng() % 1000);
        const std::vector<uint64_t> ids{r};
        const std::vector<Value> vals{Value{v}};
        t.modify_rows(ids, t.schema().index_of("value"), vals);
        model[r] = v;
      } else if (kind == 2 && !model.empty()) {
        std::set<uint64_t, std::greater<>> d;
        for (int i = 0; i < 3; ++i) d.insert(testing::uniform(rng, model.size()));
        const std::vector<uint64_t> desc(d.begin(), d.end());
        t.delete_rows(desc);
        for (uint64_t r : desc) model.erase(model.begin() + static_cast<ptrdiff_t>(r));
      } else if (kind == 3) {
        t.merge_delta();
      }
      ASSERT_EQ(t.row_count(), model.size());
      ASSERT_EQ(column_of(t, "value"), model);
    }
    const RowBatch b = t.scan(kKeyValue);
    for (uint64_t i = 0; i < b.rowids.size(); ++i) ASSERT_EQ(b.rowids[i], i);
  }
}

TEST(ColumnStore, DeleteErrors) {
  auto t = make_table(std::vector<int64_t>{1, 2, 3});
  t.delete_rows({});
  EXPECT_EQ(t.row_count(), 3u);
  const std::vector<uint64_t> asc{0, 1};
  const std::vector<uint64_t> big{3};
  EXPECT_THROW(t.delete_rows(asc), ContractError);
  EXPECT_THROW(t.delete_rows(big), BoundsError);
  const std::vector<Value> one{Value{int64_t{1}}};
  EXPECT_THROW(t.modify_rows(big, 1, one), BoundsError);
}

TEST(ColumnStore, NullsAndSortedness) {
  auto t = make_table(std::vector<std::optional<int64_t>>{1, std::nullopt, 3}, 1);
  EXPECT_EQ(column_of(t, "value"), (std::vector<std::optional<int64_t>>{1, std::nullopt, 3}));
  EXPECT_TRUE(t.is_sorted(0));
  EXPECT_FALSE(t.check_sorted(1));
  auto s = make_table(std::vector<int64_t>{1, 2, 2, 5}, 2);
  EXPECT_TRUE(s.declare_sorted(1));
  const std::vector<uint64_t> id{0};
  const std::vector<Value> big{Value{int64_t{100}}};
  s.modify_rows(id, 1, big);
  EXPECT_FALSE(s.is_sorted(1));
}

TEST(ColumnStore, IntVectorValidity) {
  IntVector v;
  v.push(std::nullopt);
  v.push(4);
  EXPECT_TRUE(v.is_null(0));
  EXPECT_EQ(v.get(1), 4);
  IntVector w;
  w.append_range(v, 0, 2);
  EXPECT_TRUE(w.is_null(0));
  IntVector x;
  x.push(1);
  x.append(v);
  EXPECT_FALSE(x.is_null(0));
  EXPECT_TRUE(x.is_null(1));
}

}  // namespace
}  // namespace patchindex
