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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.h"
#include "patchindex/bench.h"
#include "patchindex/bit_shift.h"
#include "patchindex/datagen.h"
#include "patchindex/executor.h"
#include "patchindex/patch_index.h"
#include "patchindex/rewrite.h"
#include "patchindex/sharded_bitmap.h"
#include "patchindex/update_pipeline.h"
#include "patchindex/worker_pool.h"

namespace patchindex {
namespace {

using Clock = std::chrono::steady_clock;
using testing::NaiveBits;
using testing::uniform;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// Bit-by-bit comparison through get(); count() also catches stray bits in
// dead slots.
bool same_bits(const ShardedBitmap& b, const NaiveBits& o) {
  if (b.size() != o.size()) return false;
  uint64_t ones = 0;
  for (uint64_t i = 0; i < o.size(); ++i) {
    if (b.get(i) != o.get(i)) return false;
    ones += o.get(i);
  }
  return b.count() == ones;
}

std::vector<uint64_t> descending_sample(std::mt19937_64& rng, uint64_t n, uint64_t k) {
  std::vector<uint64_t> pos = sample_positions(rng, n, std::min(k, n));
  std::reverse(pos.begin(), pos.end());
  return pos;
}

// Sizes spread log-uniformly over [0, 10^6].
uint64_t random_size(std::mt19937_64& rng) {
  const double x = std::uniform_real_distribution<double>(0.0, 6.0)(rng);
  return static_cast<uint64_t>(std::pow(10.0, x)) - (rng() % 2);
}

Outcome criterion_1() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  const int sequences = 10'000;
  uint64_t ops = 0, max_size = 0;
  for (int seq = 0; seq < sequences; ++seq) {
    const uint64_t shard = uint64_t{64} << (rng() % 9);
    ShardedBitmap b(random_size(rng), shard);
    NaiveBits o(b.size());
    const int n_ops = 10 + static_cast<int>(rng() % 20);
    for (int op = 0; op < n_ops; ++op, ++ops) {
      const unsigned kind = rng() % 10;
      const uint64_t n = b.size();
      if (kind == 8) {
        const uint64_t extra = uniform(rng, std::min<uint64_t>(1'000'000 - std::min<uint64_t>(n, 1'000'000), 5000) + 1);
        b.append(extra);
        o.append(extra);
      } else if (kind == 9) {
        b.condense();
      } else if (n == 0) {
        continue;
      } else if (kind < 3) {
        const uint64_t p = uniform(rng, n);
        b.set(p);
        o.set(p);
      } else if (kind < 4) {
        const uint64_t p = uniform(rng, n);
        b.unset(p);
        o.unset(p);
      } else if (kind < 6) {
        const uint64_t p = uniform(rng, n);
        b.erase(p);
        o.erase(p);
      } else {
        const auto pos = descending_sample(rng, n, uniform(rng, std::min<uint64_t>(n, 200)) + 1);
        b.bulk_erase(pos);
        for (uint64_t p : pos) o.erase(p);
      }
      max_size = std::max(max_size, b.size());
      if (b.size() <= 4096 && !same_bits(b, o)) {
        return {false, "mismatch in sequence " + std::to_string(seq) + " op " + std::to_string(op)};
      }
    }
    if (!same_bits(b, o)) return {false, "final mismatch in sequence " + std::to_string(seq)};
  }
  const double secs = seconds_since(start);
  return {secs < 120.0, std::to_string(sequences) + " sequences, " + std::to_string(ops) +
                            " ops, max " + std::to_string(max_size) + " bits, " +
                            fmt("%.1f s", secs)};
}

Outcome criterion_2() {
  std::mt19937_64 rng(202);
  WorkerPool pool(4);
  for (int c = 0; c < 100; ++c) {
    const uint64_t shard = c % 2 ? ShardedBitmap::kDefaultShardBits : uint64_t{64} << (rng() % 12);
    ShardedBitmap a(1'000'000, shard);
    for (uint64_t p : sample_positions(rng, 1'000'000, 60'000)) a.set(p);
    ShardedBitmap b = a;
    const auto pos = descending_sample(rng, 1'000'000, 1 + uniform(rng, 20'000));
    a.bulk_erase(pos, c % 3 ? &pool : nullptr);
    for (uint64_t p : pos) b.erase(p);
    if (!(a == b)) return {false, "state differs in case " + std::to_string(c)};
  }
  return {true, "100 cases at 10^6 bits, full state equal including starts"};
}

Outcome criterion_3() {
  std::mt19937_64 rng(303);
  const size_t words = ShardedBitmap::kDefaultShardBits / 64;
  const uint64_t bits = ShardedBitmap::kDefaultShardBits;
  auto check = [&](const std::vector<uint64_t>& w, uint64_t from) {
    auto s = w, l = w, a = w;
    shift_down_one_scalar(s, from);
    shift_down_one_lanes(l, from);
    shift_down_one_avx2(a, from);
    return s == l && s == a;
  };
  for (int i = 0; i < 10'000; ++i) {
    std::vector<uint64_t> w(words);
    for (auto& x : w) x = rng();
    if (!check(w, uniform(rng, bits))) return {false, "random shard " + std::to_string(i)};
  }
  for (int i = 0; i < 25; ++i) {
    std::vector<uint64_t> w(words);
    for (auto& x : w) x = i == 0 ? ~uint64_t{0} : rng();
    for (uint64_t from : {uint64_t{0}, uint64_t{63}, uint64_t{64}, bits - 1}) {
      if (!check(w, from)) return {false, "boundary offset " + std::to_string(from)};
    }
  }
  return {true, std::string("10^4 random 2^14-bit shards + offsets {0,63,64,2^14-1}; avx2 ") +
                    (avx2_available() ? "native" : "emulated")};
}

Outcome criterion_4() {
  const auto d = measure_delete_latency(10'000'000, 200, 100'000, 5, 404);
  const double naive_vs_single = d.naive_single_ns / d.sharded_single_ns;
  const double single_vs_bulk = d.sharded_single_ns / d.sharded_bulk_ns;
  const bool a = naive_vs_single >= 50.0;
  const bool b = single_vs_bulk >= 5.0;
  return {a && b, fmt("naive %.0f ns", d.naive_single_ns) + fmt(", single %.1f ns", d.sharded_single_ns) +
                      fmt(", bulk %.1f ns per element", d.sharded_bulk_ns) +
                      fmt("; naive/single %.0fx (need 50x)", naive_vs_single) +
                      fmt(", single/bulk %.2fx (need 5x)", single_vs_bulk)};
}

Outcome criterion_5() {
  ShardSweepConfig c;
  const auto reports = bench_shard_sweep(c);
  bool overhead_ok = false;
  std::string detail;
  bool pass = true;
  for (const char* variant : {"scalar", "parallel_widelane"}) {
    std::vector<const WorkloadReport*> rows;
    for (const auto& r : reports) {
      if (r.variant == variant) rows.push_back(&r);
    }
    const auto best = std::min_element(rows.begin(), rows.end(), [](auto* x, auto* y) {
      return x->runtime_ns < y->runtime_ns;
    });
    const size_t i = static_cast<size_t>(best - rows.begin());
    const bool interior = i != 0 && i + 1 != rows.size();
    pass = pass && interior;
    detail += std::string(detail.empty() ? "" : "; ") + variant + " min at 2^" +
              std::to_string(c.min_log2 + i) + (interior ? " (interior)" : " (endpoint)");
  }
  for (const auto& r : reports) {
    if (r.param == "shard_bits=16384;overhead_pct=0.39") overhead_ok = true;
  }
  detail += overhead_ok ? "; overhead at 2^14 = 0.39%" : "; overhead at 2^14 wrong";
  return {pass && overhead_ok, detail};
}

Outcome criterion_6() {
  std::mt19937_64 rng(606);
  for (int i = 0; i < 200; ++i) {
    const uint64_t n = uniform(rng, 5001);
    const int64_t domain = 1 + static_cast<int64_t>(uniform(rng, 2 * n + 2));
    std::vector<int64_t> v(n);
    for (auto& x : v) x = static_cast<int64_t>(uniform(rng, static_cast<uint64_t>(domain)));
    if (i % 3 == 0) std::sort(v.begin(), v.end());
    if (i % 3 == 0) {
      for (uint64_t k = 0; k < n / 20; ++k) v[uniform(rng, n)] = static_cast<int64_t>(uniform(rng, domain));
    }
    const SortOrder order = i % 2 ? SortOrder::kDescending : SortOrder::kAscending;
    const auto t = testing::make_table(v, 1 + i % 3, 64);
    const auto idx = PatchIndex::discover(t, "value", Constraint::nearly_sorted(order));
    if (idx.patch_count() != n - testing::lss_length_dp(v, order)) {
      return {false, "patch count differs from DP oracle on array " + std::to_string(i)};
    }
  }
  auto t = testing::make_table(std::vector<int64_t>{1, 2, 10});
  auto idx = PatchIndex::discover(t, "value", Constraint::nearly_sorted());
  PatchIndex* ptr = &idx;
  UpdateStats stats;
  insert_statement(t, {&ptr, 1}, {{Value{int64_t{3}}, Value{int64_t{3}}}, {Value{int64_t{4}}, Value{int64_t{4}}}},
                   &stats);
  const bool example = stats.patches_added == 2 && idx.patch_count() == 2 && idx.last_sorted_value() == 10;
  return {example, std::string("200 arrays match the O(n^2) DP oracle; (1,2,10)+(3,4) -> ") +
                       std::to_string(stats.patches_added) + " insert patches"};
}

// Rows of a batch, sorted lexicographically, flattened. NULL sorts first.
std::vector<int64_t> canonical_rows(const RowBatch& b) {
  const size_t n = b.row_count();
  const size_t k = b.columns.size();
  auto cell = [&](size_t r, size_t c) {
    const auto v = b.columns[c].get(r);
    return std::pair<bool, int64_t>(v.has_value(), v.value_or(0));
  };
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    for (size_t c = 0; c < k; ++c) {
      const auto a = cell(x, c), bb = cell(y, c);
      if (a != bb) return a < bb;
    }
    return false;
  });
  std::vector<int64_t> out;
  out.reserve(n * k * 2);
  for (size_t r : order) {
    for (size_t c = 0; c < k; ++c) {
      const auto v = cell(r, c);
      out.push_back(v.first);
      out.push_back(v.second);
    }
  }
  return out;
}

Outcome criterion_7() {
  const uint64_t t = 1'000'000;
  WorkerPool& pool = WorkerPool::shared();
  const auto dim = generate_dimension(100'000, 4, 77);
  int checks = 0;
  for (double e : {0.0, 0.01, 0.2, 0.5, 0.99}) {
    const std::string tag = fmt("e=%g", e);
    {
      GenSpec s;
      s.rows = t;
      s.exception_rate = e;
      s.partitions = 4;
      s.seed = 7;
      const auto fact = generate(s);
      const auto idx = PatchIndex::discover(fact, "value", Constraint::nearly_unique(), {StoreKind::kBitmap, 1 << 14, &pool});
      const auto naive = plan::distinct(plan::scan(fact, {"value"}), "value");
      const auto rw = rewrite_distinct(naive, idx);
      if (!rw) return {false, "distinct rewrite declined at " + tag};
      auto values = [&](const PlanPtr& p) {
        auto v = Executor(&pool).execute(p).columns.at(0).values;
        std::sort(v.begin(), v.end());
        return v;
      };
      const auto want = values(naive);
      if (values(rw) != want) return {false, "distinct differs at " + tag};
      if (values(zero_branch_prune(rw)) != want) return {false, "distinct+zbp differs at " + tag};
      checks += 2;
    }
    {
      GenSpec s;
      s.constraint = ConstraintType::kNearlySorted;
      s.rows = t;
      s.exception_rate = e;
      s.partitions = 4;
      s.seed = 8;
      const auto fact = generate(s);
      const auto idx = PatchIndex::discover(fact, "value", Constraint::nearly_sorted(), {StoreKind::kBitmap, 1 << 14, &pool});
      const auto naive = plan::sort(plan::scan(fact, {"key", "value"}), "value");
      const auto rw = rewrite_sort(naive, idx);
      if (!rw) return {false, "sort rewrite declined at " + tag};
      const RowBatch want = Executor(&pool).execute(naive);
      for (const auto& p : {rw, zero_branch_prune(rw)}) {
        const RowBatch got = Executor(&pool).execute(p);
        if (got.columns.at(got.index_of("value")).values != want.columns.at(want.index_of("value")).values ||
            canonical_rows(got) != canonical_rows(want)) {
          return {false, "sort differs at " + tag};
        }
        ++checks;
      }

      GenSpec j = s;
      j.value_domain = dim.row_count();
      j.seed = 9;
      const auto jfact = generate(j);
      const auto jidx = PatchIndex::discover(jfact, "value", Constraint::nearly_sorted(), {StoreKind::kBitmap, 1 << 14, &pool});
      const auto jnaive = plan::hash_join(plan::scan(jfact, {"key", "value"}),
                                          plan::scan(dim, {"key", "attr"}), "value", "key", 1);
      const auto jrw = rewrite_join(jnaive, jidx);
      if (!jrw) return {false, "join rewrite declined at " + tag};
      const auto jwant = canonical_rows(Executor(&pool).execute(jnaive));
      for (const auto& p : {jrw, zero_branch_prune(jrw)}) {
        if (canonical_rows(Executor(&pool).execute(p)) != jwant) return {false, "join differs at " + tag};
        ++checks;
      }
    }
  }
  return {true, std::to_string(checks) + " rewritten plans equal naive at t=10^6, e in {0,0.01,0.2,0.5,0.99}"};
}

Outcome criterion_8() {
  std::mt19937_64 rng(808);
  uint64_t statements = 0;
  for (int w = 0; w < 50; ++w) {
    const bool unique = w % 2 == 0;
    const StoreKind store = (w / 2) % 2 ? StoreKind::kIdentifiers : StoreKind::kBitmap;
    GenSpec s;
    s.constraint = unique ? ConstraintType::kNearlyUnique : ConstraintType::kNearlySorted;
    s.rows = 5000;
    s.exception_rate = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    s.duplicate_domain = 500;
    s.partitions = 1 + w % 3;
    s.block_size = 128;
    s.seed = rng();
    auto table = generate(s);
    const Constraint c = unique ? Constraint::nearly_unique() : Constraint::nearly_sorted();
    auto idx = PatchIndex::discover(table, "value", c, {store, 1 << 10, nullptr});
    PatchIndex* ptr = &idx;
    const size_t col = table.schema().index_of("value");
    const auto domain = static_cast<int64_t>(s.rows + s.duplicate_domain);
    for (int op = 0; op < 1000; ++op, ++statements) {
      const unsigned kind = rng() % 3;
      const uint64_t n = 1 + uniform(rng, 10);
      if (kind == 0 || table.row_count() < 20) {
        std::vector<Row> rows;
        for (uint64_t i = 0; i < n; ++i) {
          rows.push_back({Value{int64_t{-1}}, Value{static_cast<int64_t>(uniform(rng, domain))}});
        }
        insert_statement(table, {&ptr, 1}, rows);
      } else if (kind == 1) {
        std::set<uint64_t> ids;
        while (ids.size() < n) ids.insert(uniform(rng, table.row_count()));
        const std::vector<uint64_t> rid(ids.begin(), ids.end());
        std::vector<Value> vals;
        for (size_t i = 0; i < rid.size(); ++i) vals.push_back(Value{static_cast<int64_t>(uniform(rng, domain))});
        modify_statement(table, {&ptr, 1}, rid, col, vals);
      } else {
        std::vector<uint64_t> ids;
        for (uint64_t i = 0; i < n; ++i) ids.push_back(uniform(rng, table.row_count()));
        delete_statement(table, {&ptr, 1}, ids);
      }
      std::string why;
      if (!constraint_holds(table, idx, &why)) {
        return {false, "workload " + std::to_string(w) + " statement " + std::to_string(op) + ": " + why};
      }
    }
  }
  return {true, "50 workloads, " + std::to_string(statements) +
                    " statements, constraint held after each (both constraints, both stores)"};
}

Outcome criterion_9() {
  std::vector<uint64_t> reference;
  std::string detail;
  for (StoreKind store : {StoreKind::kBitmap, StoreKind::kIdentifiers}) {
    for (uint64_t g : {5u, 10u, 50u, 100u, 500u, 1000u}) {
      GenSpec s;
      s.rows = 1'000'000;
      s.exception_rate = 0.5;
      s.partitions = 4;
      s.seed = 9;
      auto table = generate(s);
      auto idx = PatchIndex::discover(table, "value", Constraint::nearly_unique(), {store, 1 << 14, nullptr});
      PatchIndex* ptr = &idx;
      std::mt19937_64 rng(909);
      std::vector<Row> rows;
      for (int i = 0; i < 1000; ++i) {
        rows.push_back({Value{int64_t{-1}}, Value{static_cast<int64_t>(uniform(rng, 2'000'000))}});
      }
      for (uint64_t lo = 0; lo < rows.size(); lo += g) {
        const std::vector<Row> batch(rows.begin() + static_cast<ptrdiff_t>(lo),
                                     rows.begin() + static_cast<ptrdiff_t>(std::min<uint64_t>(lo + g, rows.size())));
        insert_statement(table, {&ptr, 1}, batch);
      }
      const auto patches = idx.patches();
      if (reference.empty()) reference = patches;
      if (patches != reference) {
        return {false, "patch set differs at granularity " + std::to_string(g)};
      }
    }
  }
  return {true, "granularities {5,10,50,100,500,1000} x {bitmap, identifiers} give one patch set of " +
                    std::to_string(reference.size()) + " rows"};
}

Outcome criterion_10() {
  std::string detail;
  bool pass = true;
  for (uint64_t t : {uint64_t{1'000'000}, uint64_t{10'000'000}}) {
    GenSpec s;
    s.rows = t;
    s.exception_rate = 0.01;
    s.partitions = 1;
    const auto table = generate(s);
    const auto ids = PatchIndex::discover(table, "value", Constraint::nearly_unique(), {StoreKind::kIdentifiers, 1 << 14, nullptr});
    const auto bmp = PatchIndex::discover(table, "value", Constraint::nearly_unique(), {StoreKind::kBitmap, 1 << 14, nullptr});
    const double want_ids = 0.01 * static_cast<double>(t) * 8.0;
    const double want_bmp = static_cast<double>(t) / 8.0 * 1.0039;
    const double err_ids = std::abs(static_cast<double>(ids.memory_bytes()) - want_ids) / want_ids;
    const double err_bmp = std::abs(static_cast<double>(bmp.memory_bytes()) - want_bmp) / want_bmp;
    pass = pass && err_ids < 0.01 && err_bmp < 0.01;
    detail += "t=" + std::to_string(t) + fmt(": identifiers err %.3f%%", err_ids * 100) +
              fmt(", bitmap err %.3f%%; ", err_bmp * 100);
  }
  // Smallest patch count at which identifiers outgrow the bitmap.
  const uint64_t t = 10'000'000;
  const size_t bitmap_bytes = PatchStore(StoreKind::kBitmap, t).memory_bytes();
  uint64_t lo = 0, hi = t;
  while (lo < hi) {
    const uint64_t mid = (lo + hi) / 2;
    PatchStore ids(StoreKind::kIdentifiers, t);
    std::vector<uint64_t> p(mid);
    std::iota(p.begin(), p.end(), 0);
    ids.add_patches(p);
    if (ids.memory_bytes() > bitmap_bytes) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const double crossover = static_cast<double>(lo) / static_cast<double>(t);
  const bool near = std::abs(crossover - 1.0 / 64.0) / (1.0 / 64.0) < 0.01;
  detail += fmt("crossover at e=%.5f", crossover) + fmt(" (1/64 = %.5f)", 1.0 / 64.0);
  return {pass && near, detail};
}

Outcome criterion_11() {
  GenSpec s;
  s.rows = 1'000'000;
  s.exception_rate = 0.0;
  s.partitions = 4;
  auto table = generate(s);
  auto idx = PatchIndex::discover(table, "value", Constraint::nearly_unique());
  PatchIndex* ptr = &idx;
  // Existing values come from one 4096-row value block, plus fresh values
  // next to them.
  const int64_t base = static_cast<int64_t>(s.duplicate_domain) + 300'000;
  std::vector<Row> rows;
  for (int64_t i = 0; i < 500; ++i) rows.push_back({Value{int64_t{-1}}, Value{base + 7 * i}});
  UpdateStats stats;
  insert_statement(table, {&ptr, 1}, rows, &stats);
  const double share = static_cast<double>(stats.blocks_scanned) / static_cast<double>(stats.blocks_total);
  std::string why;
  const bool ok = constraint_holds(table, idx, &why) && idx.patch_count() == 1000;
  return {ok && share < 0.10, std::to_string(stats.blocks_scanned) + " of " +
                                  std::to_string(stats.blocks_total) + fmt(" blocks scanned (%.2f%%)", share * 100) +
                                  ", patches " + std::to_string(idx.patch_count())};
}

}  // namespace
}  // namespace patchindex

int main() {
  using namespace patchindex;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"sharded bitmap matches naive oracle", criterion_1},
      {"bulk delete equals descending single deletes", criterion_2},
      {"wide-lane shift equals scalar shift", criterion_3},
      {"delete latency: sharded vs naive, bulk vs single", criterion_4},
      {"shard-size sweep has an interior minimum", criterion_5},
      {"sorted subsequence discovery matches DP oracle", criterion_6},
      {"rewritten plans equal naive plans", criterion_7},
      {"constraint holds after every update statement", criterion_8},
      {"insert granularity does not change the patch set", criterion_9},
      {"memory formulas and crossover", criterion_10},
      {"pruned insert handling scans few blocks", criterion_11},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu: %s -- %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
