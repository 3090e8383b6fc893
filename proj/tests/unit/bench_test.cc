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

#include "patchindex/bench.h"

#include <gtest/gtest.h>

#include <set>

#include "oracles.h"
#include "patchindex/error.h"
#include "patchindex/worker_pool.h"

namespace patchindex {
namespace {

TEST(Bench, OverheadFormatting) {
  EXPECT_EQ(format_pct(shard_overhead_pct(1 << 14)), "0.39");
  EXPECT_EQ(format_pct(shard_overhead_pct(1 << 8)), "25");
  EXPECT_EQ(format_pct(shard_overhead_pct(1 << 9)), "12.5");
  EXPECT_EQ(format_pct(shard_overhead_pct(1 << 11)), "3.12");
  EXPECT_DOUBLE_EQ(shard_overhead_pct(1 << 14), 64.0 / 16384.0 * 100.0);
}

TEST(Bench, NaiveBitvectorErase) {
  std::mt19937_64 rng(3);
  NaiveBitvector a(700);
  testing::NaiveBits o(700);
  for (int i = 0; i < 200; ++i) {
    const uint64_t p = testing::uniform(rng, 700);
    a.set(p);
    o.set(p);
  }
  for (int i = 0; i < 100; ++i) {
    const uint64_t p = testing::uniform(rng, 600);
    a.erase(p);
    o.erase(p);
  }
  for (uint64_t i = 0; i < 600; ++i) ASSERT_EQ(a.get(i), o.get(i)) << i;
  EXPECT_THROW(a.erase(700), BoundsError);
}

TEST(Bench, Median) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
}

TEST(Bench, ShardSweepShape) {
  WorkerPool pool(2);
  ShardSweepConfig c;
  c.bits = 100'000;
  c.deletes = 1000;
  c.min_log2 = 8;
  c.max_log2 = 12;
  c.repetitions = 1;
  c.pool = &pool;
  const auto r = bench_shard_sweep(c);
  ASSERT_EQ(r.size(), 10u);
  std::set<std::string> variants;
  for (const auto& x : r) {
    variants.insert(x.variant);
    EXPECT_EQ(x.experiment, "shard_sweep");
    EXPECT_EQ(x.rows, 100'000u);
  }
  EXPECT_EQ(variants, (std::set<std::string>{"scalar", "parallel_widelane"}));
  EXPECT_EQ(r.front().param, "shard_bits=256;overhead_pct=25");
  c.deletes = c.bits + 1;
  EXPECT_THROW(bench_shard_sweep(c), ConfigError);
}

TEST(Bench, DeleteLatencyOrdering) {
  const auto d = measure_delete_latency(1'000'000, 50, 5'000, 1, 1);
  EXPECT_GT(d.naive_single_ns, d.sharded_single_ns);
  EXPECT_GT(d.sharded_single_ns, 0);
  EXPECT_GT(d.sharded_bulk_ns, 0);
}

TEST(Bench, QueryBenchVerifies) {
  for (QueryKind q : {QueryKind::kDistinct, QueryKind::kSort, QueryKind::kJoin}) {
    for (double e : {0.0, 0.1}) {
      QueryBenchConfig c;
      c.query = q;
      c.rows = 20'000;
      c.dimension_rows = 2'000;
      c.exception_rate = e;
      c.repetitions = 1;
      const auto r = bench_query(c);
      EXPECT_TRUE(r.verified) << to_string(q) << " " << e;
      EXPECT_EQ(r.reports.size(), e == 0.0 ? 3u : 2u);
      EXPECT_EQ(r.reports[0].variant, "naive");
      EXPECT_EQ(r.reports[1].variant, "patchindex");
      EXPECT_FALSE(r.explain_rewritten.empty());
    }
  }
  QueryBenchConfig c;
  c.rows = 1000;
  c.exception_rate = 0.01;
  c.repetitions = 1;
  EXPECT_EQ(bench_query(c).reports[0].param, "distinct;e=1%");
}

TEST(Bench, UpdateBenchVerifies) {
  for (UpdateOp op : {UpdateOp::kInsert, UpdateOp::kModify, UpdateOp::kDelete}) {
    for (ConstraintType ct : {ConstraintType::kNearlyUnique, ConstraintType::kNearlySorted}) {
      UpdateBenchConfig c;
      c.op = op;
      c.constraint = ct;
      c.rows = 20'000;
      c.count = 200;
      c.granularities = {10, 200};
      const auto r = bench_update(c);
      EXPECT_TRUE(r.verified) << to_string(op);
      EXPECT_EQ(r.reports.size(), 6u);
    }
  }
}

}  // namespace
}  // namespace patchindex
