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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "patchindex/datagen.h"
#include "patchindex/error.h"
#include "patchindex/executor.h"
#include "patchindex/rewrite.h"
#include "patchindex/update_pipeline.h"
#include "patchindex/worker_pool.h"

namespace patchindex {

namespace {

using Clock = std::chrono::steady_clock;

uint64_t elapsed_ns(Clock::time_point start) {
  return static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

std::vector<uint64_t> descending_positions(std::mt19937_64& rng, uint64_t n, uint64_t k) {
  std::vector<uint64_t> pos = sample_positions(rng, n, k);
  std::reverse(pos.begin(), pos.end());
  return pos;
}

}  // namespace

void NaiveBitvector::erase(uint64_t pos) {
  if (pos >= bits_) throw BoundsError("NaiveBitvector::erase: position out of range");
  const size_t w = pos >> 6;
  const uint64_t low = (uint64_t{1} << (pos & 63)) - 1;
  const size_t n = words_.size();
  uint64_t cur = words_[w];
  cur = (cur & low) | ((cur >> 1) & ~low);
  if (w + 1 < n) cur |= words_[w + 1] << 63;
  words_[w] = cur;
  for (size_t i = w + 1; i < n; ++i) {
    words_[i] = (words_[i] >> 1) | (i + 1 < n ? words_[i + 1] << 63 : 0);
  }
  --bits_;
  if (bits_ % 64 != 0) words_[n - 1] &= (uint64_t{1} << (bits_ % 64)) - 1;
  if ((bits_ + 63) / 64 < n) words_.pop_back();
}

double median(std::vector<double> v) {
  if (v.empty()) throw ConfigError("median of an empty sample");
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

double shard_overhead_pct(uint64_t shard_bits) {
  return 64.0 / static_cast<double>(shard_bits) * 100.0;
}

std::string format_pct(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", pct);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::vector<WorkloadReport> bench_shard_sweep(const ShardSweepConfig& config) {
  if (config.min_log2 < 6 || config.max_log2 < config.min_log2 || config.max_log2 > 40) {
    throw ConfigError("shard sizes must be powers of two from 2^6");
  }
  if (config.deletes > config.bits) throw ConfigError("more deletes than bits");
  if (config.repetitions == 0) throw ConfigError("at least one repetition is required");
  WorkerPool* pool = config.pool ? config.pool : &WorkerPool::shared();

  std::mt19937_64 rng(config.seed);
  const std::vector<uint64_t> positions = descending_positions(rng, config.bits, config.deletes);
  const std::vector<uint64_t> ones = sample_positions(rng, config.bits, config.bits / 16);

  std::vector<WorkloadReport> out;
  for (unsigned lg = config.min_log2; lg <= config.max_log2; ++lg) {
    const uint64_t shard = uint64_t{1} << lg;
    ShardedBitmap base(config.bits, shard);
    for (uint64_t p : ones) base.set(p);
    const std::string param =
        "shard_bits=" + std::to_string(shard) + ";overhead_pct=" +
        format_pct(shard_overhead_pct(shard));
    for (int variant = 0; variant < 2; ++variant) {
      const bool parallel = variant == 1;
      std::vector<double> times;
      for (unsigned rep = 0; rep < config.repetitions; ++rep) {
        ShardedBitmap bm = base;
        bm.set_shift_kernel(parallel ? ShiftKernel::kAuto : ShiftKernel::kScalar);
        const auto start = Clock::now();
        bm.bulk_erase(positions, parallel ? pool : nullptr);
        times.push_back(static_cast<double>(elapsed_ns(start)));
      }
      out.push_back({"shard_sweep", param, parallel ? "parallel_widelane" : "scalar",
                     static_cast<uint64_t>(median(times)), config.bits, config.deletes,
                     base.memory_bytes(), 0});
    }
  }
  return out;
}

DeleteLatency measure_delete_latency(uint64_t bits, uint64_t naive_deletes,
                                     uint64_t sharded_deletes, unsigned repetitions,
                                     uint64_t seed, uint64_t shard_bits) {
  if (repetitions == 0) throw ConfigError("at least one repetition is required");
  if (naive_deletes > bits || sharded_deletes > bits) throw ConfigError("more deletes than bits");
  std::vector<double> naive;
  std::vector<double> single;
  std::vector<double> bulk;
  for (unsigned rep = 0; rep < repetitions; ++rep) {
    std::mt19937_64 rng(seed + rep);
    {
      NaiveBitvector bv(bits);
      std::vector<uint64_t> pos(naive_deletes);
      for (uint64_t i = 0; i < naive_deletes; ++i) pos[i] = bounded_random(rng, bits - i);
      const auto start = Clock::now();
      for (uint64_t p : pos) bv.erase(p);
      naive.push_back(static_cast<double>(elapsed_ns(start)) / static_cast<double>(naive_deletes));
    }
    const std::vector<uint64_t> desc = descending_positions(rng, bits, sharded_deletes);
    {
      ShardedBitmap bm(bits, shard_bits);
      // Random positions, not the sorted bulk list, so erases hit shards in
      // arbitrary order.
      std::vector<uint64_t> pos(sharded_deletes);
      for (uint64_t i = 0; i < sharded_deletes; ++i) pos[i] = bounded_random(rng, bits - i);
      const auto start = Clock::now();
      for (uint64_t p : pos) bm.erase(p);
      single.push_back(static_cast<double>(elapsed_ns(start)) /
                       static_cast<double>(sharded_deletes));
    }
    {
      ShardedBitmap bm(bits, shard_bits);
      const auto start = Clock::now();
      bm.bulk_erase(desc, &WorkerPool::shared());
      bulk.push_back(static_cast<double>(elapsed_ns(start)) /
                     static_cast<double>(sharded_deletes));
    }
  }
  return {median(naive), median(single), median(bulk)};
}

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::kDistinct:
      return "distinct";
    case QueryKind::kSort:
      return "sort";
    case QueryKind::kJoin:
      return "join";
  }
  return "?";
}

std::string_view to_string(UpdateOp op) {
  switch (op) {
    case UpdateOp::kInsert:
      return "insert";
    case UpdateOp::kModify:
      return "modify";
    case UpdateOp::kDelete:
      return "delete";
  }
  return "?";
}

namespace {

std::vector<std::optional<int64_t>> column_of(const RowBatch& b, const std::string& name) {
  const IntVector& v = b.columns.at(b.index_of(name));
  std::vector<std::optional<int64_t>> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v.get(i);
  return out;
}

bool same_result(QueryKind kind, const RowBatch& naive, const RowBatch& other,
                 const std::string& key) {
  if (naive.row_count() != other.row_count()) return false;
  if (batch_checksum(naive) != batch_checksum(other)) return false;
  auto a = column_of(naive, key);
  auto b = column_of(other, key);
  if (kind != QueryKind::kSort) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
  }
  return a == b;
}

}  // namespace

QueryBenchResult bench_query(const QueryBenchConfig& config) {
  if (config.repetitions == 0) throw ConfigError("at least one repetition is required");
  GenSpec spec;
  spec.rows = config.rows;
  spec.exception_rate = config.exception_rate;
  spec.partitions = config.partitions;
  spec.seed = config.seed;
  spec.constraint = config.query == QueryKind::kDistinct ? ConstraintType::kNearlyUnique
                                                         : ConstraintType::kNearlySorted;
  if (config.query == QueryKind::kJoin) spec.value_domain = config.dimension_rows;
  const ColumnTable fact = generate(spec);
  std::optional<ColumnTable> dim;
  if (config.query == QueryKind::kJoin) {
    dim.emplace(generate_dimension(config.dimension_rows, config.partitions, config.seed + 1));
  }
  const Constraint constraint = config.query == QueryKind::kDistinct
                                    ? Constraint::nearly_unique()
                                    : Constraint::nearly_sorted(SortOrder::kAscending);
  IndexOptions options;
  options.store = config.store;
  options.pool = config.pool;
  const PatchIndex index = PatchIndex::discover(fact, "value", constraint, options);

  PlanPtr naive;
  PlanPtr rewritten;
  switch (config.query) {
    case QueryKind::kDistinct:
      naive = plan::distinct(plan::scan(fact, {"value"}), "value");
      rewritten = rewrite_distinct(naive, index);
      break;
    case QueryKind::kSort:
      naive = plan::sort(plan::scan(fact, {"key", "value"}), "value");
      rewritten = rewrite_sort(naive, index);
      break;
    case QueryKind::kJoin:
      naive = plan::hash_join(plan::scan(fact, {"key", "value"}),
                              plan::scan(*dim, {"key", "attr"}), "value", "key", 1);
      rewritten = rewrite_join(naive, index);
      break;
  }
  if (!rewritten) throw PlanError("rewrite declined for the generated dataset");

  QueryBenchResult result;
  result.explain_naive = explain(naive);
  result.explain_rewritten = explain(rewritten);
  const std::string param = std::string(to_string(config.query)) +
                            ";e=" + format_pct(config.exception_rate * 100) + "%";

  Executor exec(config.pool);
  auto timed = [&](const PlanPtr& p, RowBatch& out, ExecStats& stats) {
    std::vector<double> times;
    for (unsigned rep = 0; rep < config.repetitions; ++rep) {
      const auto start = Clock::now();
      out = exec.execute(p);
      times.push_back(static_cast<double>(elapsed_ns(start)));
    }
    stats = exec.stats();
    return static_cast<uint64_t>(median(times));
  };

  RowBatch naive_out;
  ExecStats st;
  const uint64_t naive_ns = timed(naive, naive_out, st);
  result.reports.push_back({"query", param, "naive", naive_ns, naive_out.row_count(),
                            index.patch_count(), 0, st.blocks_scanned});

  std::vector<std::pair<std::string, PlanPtr>> variants = {{"patchindex", rewritten}};
  if (index.patch_count() == 0) variants.emplace_back("patchindex+zbp", zero_branch_prune(rewritten));
  for (const auto& [name, p] : variants) {
    RowBatch out;
    const uint64_t ns = timed(p, out, st);
    if (!same_result(config.query, naive_out, out, "value")) {
      result.verified = false;
      continue;
    }
    result.reports.push_back({"query", param, name, ns, out.row_count(), index.patch_count(),
                              index.memory_bytes(), st.blocks_scanned});
  }
  return result;
}

namespace {

struct UpdateWorkload {
  std::vector<Row> inserts;
  std::vector<uint64_t> targets;  // modify/delete: rowIDs in the original table
  std::vector<Value> values;      // modify
};

UpdateWorkload make_workload(const UpdateBenchConfig& c, uint64_t value_range) {
  std::mt19937_64 rng(c.seed ^ 0x5eedULL);
  UpdateWorkload w;
  if (c.op == UpdateOp::kInsert) {
    for (uint64_t i = 0; i < c.count; ++i) {
      w.inserts.push_back({Value{static_cast<int64_t>(c.rows + i)},
                           Value{static_cast<int64_t>(bounded_random(rng, value_range))}});
    }
    return w;
  }
  w.targets = sample_positions(rng, c.rows, std::min(c.count, c.rows));
  for (uint64_t i = w.targets.size(); i > 1; --i) {
    std::swap(w.targets[i - 1], w.targets[bounded_random(rng, i)]);
  }
  if (c.op == UpdateOp::kModify) {
    for (size_t i = 0; i < w.targets.size(); ++i) {
      w.values.emplace_back(static_cast<int64_t>(bounded_random(rng, value_range)));
    }
  }
  return w;
}

// Current rowID of an original row after the earlier deletes in `gone`
// (ascending original rowIDs).
uint64_t current_rowid(uint64_t original, const std::vector<uint64_t>& gone) {
  return original - static_cast<uint64_t>(
                        std::lower_bound(gone.begin(), gone.end(), original) - gone.begin());
}

}  // namespace

UpdateBenchResult bench_update(const UpdateBenchConfig& config) {
  if (config.repetitions == 0) throw ConfigError("at least one repetition is required");
  if (config.count == 0) throw ConfigError("update count must be positive");
  GenSpec spec;
  spec.constraint = config.constraint;
  spec.rows = config.rows;
  spec.exception_rate = config.exception_rate;
  spec.partitions = config.partitions;
  spec.seed = config.seed;
  const ColumnTable base = generate(spec);
  const uint64_t value_range = config.constraint == ConstraintType::kNearlyUnique
                                   ? spec.duplicate_domain + config.rows
                                   : 2 * config.rows;
  const UpdateWorkload work = make_workload(config, value_range);
  const Constraint constraint = config.constraint == ConstraintType::kNearlyUnique
                                    ? Constraint::nearly_unique()
                                    : Constraint::nearly_sorted(SortOrder::kAscending);
  const size_t value_col = base.schema().index_of("value");

  UpdateBenchResult result;
  const std::string experiment = "update_" + std::string(to_string(config.op));
  const char* variants[] = {"none", "bitmap", "identifiers"};
  for (uint64_t g : config.granularities) {
    if (g == 0) throw ConfigError("granularity must be positive");
    for (int v = 0; v < 3; ++v) {
      std::vector<double> times;
      WorkloadReport report{experiment, "granularity=" + std::to_string(g), variants[v]};
      for (unsigned rep = 0; rep < config.repetitions; ++rep) {
        ColumnTable table = base;
        std::optional<PatchIndex> index;
        std::vector<PatchIndex*> indexes;
        if (v > 0) {
          IndexOptions options;
          options.store = v == 1 ? StoreKind::kBitmap : StoreKind::kIdentifiers;
          options.pool = config.pool;
          index.emplace(PatchIndex::discover(table, "value", constraint, options));
          indexes.push_back(&*index);
        }
        UpdateStats stats;
        std::vector<uint64_t> gone;
        const uint64_t n = config.op == UpdateOp::kInsert ? work.inserts.size()
                                                          : work.targets.size();
        const auto start = Clock::now();
        for (uint64_t lo = 0; lo < n; lo += g) {
          const uint64_t hi = std::min(n, lo + g);
          switch (config.op) {
            case UpdateOp::kInsert: {
              const std::vector<Row> batch(work.inserts.begin() + lo, work.inserts.begin() + hi);
              insert_statement(table, indexes, batch, &stats);
              break;
            }
            case UpdateOp::kModify:
              modify_statement(table, indexes,
                               std::span<const uint64_t>(work.targets).subspan(lo, hi - lo),
                               value_col, std::span<const Value>(work.values).subspan(lo, hi - lo),
                               &stats);
              break;
            case UpdateOp::kDelete: {
              std::vector<uint64_t> rows;
              for (uint64_t i = lo; i < hi; ++i) {
                rows.push_back(current_rowid(work.targets[i], gone));
              }
              delete_statement(table, indexes, rows);
              for (uint64_t i = lo; i < hi; ++i) {
                gone.insert(std::upper_bound(gone.begin(), gone.end(), work.targets[i]),
                            work.targets[i]);
              }
              break;
            }
          }
        }
        times.push_back(static_cast<double>(elapsed_ns(start)));
        if (index && !constraint_holds(table, *index)) result.verified = false;
        report.rows = table.row_count();
        report.patches = index ? index->patch_count() : 0;
        report.memory_bytes = index ? index->memory_bytes() : 0;
        report.blocks_scanned = stats.blocks_scanned;
      }
      report.runtime_ns = static_cast<uint64_t>(median(times));
      result.reports.push_back(std::move(report));
    }
  }
  return result;
}

}  // namespace patchindex
