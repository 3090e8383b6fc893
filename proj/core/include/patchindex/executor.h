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

// Materializing executor for plan trees.

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "patchindex/column_store.h"
#include "patchindex/plan.h"

namespace patchindex {

class WorkerPool;

struct ExecStats {
  uint64_t rows_scanned = 0;
  uint64_t blocks_scanned = 0;
  // Evaluations of each ReuseCache subtree.
  std::map<std::string, int> reuse_evaluations;
};

class Executor {
 public:
  explicit Executor(WorkerPool* pool = nullptr) : pool_(pool) {}

  // Runs the plan. Stats and reuse caches are reset per call.
  RowBatch execute(const PlanPtr& root);
  const ExecStats& stats() const { return stats_; }

 private:
  RowBatch run(const PlanNode& node);
  RowBatch run_scan(const PlanNode& node);
  const RowBatch& materialize(const std::string& tag);

  WorkerPool* pool_;
  ExecStats stats_;
  std::map<std::string, const PlanNode*> cache_nodes_;
  std::map<std::string, RowBatch> cache_;
};

// Order-insensitive fingerprint of a batch's values (column names ignored).
uint64_t batch_checksum(const RowBatch& batch);

}  // namespace patchindex
