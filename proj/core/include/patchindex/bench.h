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

// Benchmark runners behind the CLI `bench` verbs.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patchindex/patch_index.h"
#include "patchindex/plan.h"
#include "patchindex/workload_report.h"

namespace patchindex {

class WorkerPool;

// Plain bitvector whose delete shifts every later bit. Baseline for the
// sharded bitmap.
class NaiveBitvector {
 public:
  explicit NaiveBitvector(uint64_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

  uint64_t size() const { return bits_; }
  bool get(uint64_t pos) const { return (words_[pos >> 6] >> (pos & 63)) & 1; }
  void set(uint64_t pos) { words_[pos >> 6] |= uint64_t{1} << (pos & 63); }
  void erase(uint64_t pos);

 private:
  uint64_t bits_;
  std::vector<uint64_t> words_;
};

// 64 / shard_bits, in percent.
double shard_overhead_pct(uint64_t shard_bits);
// Shortest decimal form with at most two fraction digits ("0.39", "25").
std::string format_pct(double pct);

struct ShardSweepConfig {
  uint64_t bits = 10'000'000;
  uint64_t deletes = 100'000;
  unsigned min_log2 = 8;
  unsigned max_log2 = 19;
  unsigned repetitions = 5;  // median reported
  uint64_t seed = 42;
  WorkerPool* pool = nullptr;  // parallel variant; shared pool when null
};

// Bulk delete of fixed random positions per shard size, for the "scalar"
// (single-threaded, scalar shift) and "parallel_widelane" variants. Param is
// "shard_bits=<n>;overhead_pct=<p>".
std::vector<WorkloadReport> bench_shard_sweep(const ShardSweepConfig& config);

struct DeleteLatency {
  double naive_single_ns = 0;    // per element
  double sharded_single_ns = 0;  // per element
  double sharded_bulk_ns = 0;    // per element
};

// Median over `repetitions` runs of each measurement.
DeleteLatency measure_delete_latency(uint64_t bits, uint64_t naive_deletes,
                                     uint64_t sharded_deletes, unsigned repetitions,
                                     uint64_t seed, uint64_t shard_bits =
                                                        ShardedBitmap::kDefaultShardBits);

enum class QueryKind { kDistinct, kSort, kJoin };
std::string_view to_string(QueryKind kind);

struct QueryBenchConfig {
  QueryKind query = QueryKind::kDistinct;
  uint64_t rows = 1'000'000;
  double exception_rate = 0.01;
  uint64_t dimension_rows = 100'000;  // join only
  size_t partitions = 4;
  StoreKind store = StoreKind::kBitmap;
  unsigned repetitions = 3;
  uint64_t seed = 42;
  WorkerPool* pool = nullptr;
};

struct QueryBenchResult {
  std::vector<WorkloadReport> reports;  // naive, patchindex, patchindex+zbp
  bool verified = true;
  std::string explain_naive;
  std::string explain_rewritten;
};

// Generates the dataset and index (untimed), then times the naive plan and
// the rewritten plan (plus the pruned plan when the index has no patches).
// Every rewritten result is compared with the naive one before it is reported.
QueryBenchResult bench_query(const QueryBenchConfig& config);

enum class UpdateOp { kInsert, kModify, kDelete };
std::string_view to_string(UpdateOp op);

struct UpdateBenchConfig {
  UpdateOp op = UpdateOp::kInsert;
  ConstraintType constraint = ConstraintType::kNearlyUnique;
  uint64_t rows = 1'000'000;
  double exception_rate = 0.5;
  uint64_t count = 1000;
  std::vector<uint64_t> granularities = {5, 10, 50, 100, 500, 1000};
  size_t partitions = 4;
  unsigned repetitions = 1;
  uint64_t seed = 42;
  WorkerPool* pool = nullptr;
};

struct UpdateBenchResult {
  std::vector<WorkloadReport> reports;  // per granularity: none, bitmap, identifiers
  bool verified = true;                 // constraint held after every run
};

UpdateBenchResult bench_update(const UpdateBenchConfig& config);

// Median of a non-empty sample.
double median(std::vector<double> v);

}  // namespace patchindex
