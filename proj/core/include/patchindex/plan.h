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

// Operator trees for the query engine.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "patchindex/column_store.h"
#include "patchindex/patch_index.h"
#include "patchindex/sorted_subsequence.h"

namespace patchindex {

enum class ScanMode : uint8_t { kAll, kExcludePatches, kUsePatches };

enum class OpKind : uint8_t {
  kScan,
  kSelect,
  kProject,
  kHashAggregateDistinct,
  kGroupAggregate,
  kSort,
  kHashJoin,
  kMergeJoin,
  kUnion,
  kMergeSortedStreams,
  kReuseCache,
  kReuseLoad,
};

std::string_view to_string(ScanMode mode);
std::string_view to_string(OpKind kind);

struct PlanNode;
using PlanPtr = std::shared_ptr<PlanNode>;

struct PlanNode {
  OpKind kind = OpKind::kScan;
  std::vector<PlanPtr> children;

  // kScan
  const ColumnTable* table = nullptr;
  const PatchIndex* index = nullptr;  // required unless mode == kAll
  ScanMode mode = ScanMode::kAll;

  // kScan / kProject: output columns
  std::vector<std::string> columns;
  // kProject: optional constant column appended to the output
  std::optional<std::pair<std::string, int64_t>> constant;

  // kSelect: lo <= column <= hi, NULLs rejected
  std::string column;
  int64_t lo = 0;
  int64_t hi = 0;

  // Aggregates, sorts and merges use `key`; joins use `key` (left child) and
  // `right_key` (right child).
  std::string key;
  std::string right_key;
  SortOrder order = SortOrder::kAscending;
  size_t build_side = 1;  // kHashJoin: child whose rows fill the hash table
  std::string count_name = "count";

  // kReuseCache / kReuseLoad
  std::string tag;

  // Filled by annotate().
  double est_rows = 0;
  double cost = 0;  // whole subtree
  bool guaranteed_empty = false;
};

namespace plan {

PlanPtr scan(const ColumnTable& table, std::vector<std::string> columns,
             ScanMode mode = ScanMode::kAll, const PatchIndex* index = nullptr);
PlanPtr select(PlanPtr child, std::string column, int64_t lo, int64_t hi);
PlanPtr project(PlanPtr child, std::vector<std::string> columns,
                std::optional<std::pair<std::string, int64_t>> constant = std::nullopt);
PlanPtr distinct(PlanPtr child, std::string key);
PlanPtr group_count(PlanPtr child, std::string key, std::string count_name = "count");
PlanPtr sort(PlanPtr child, std::string key, SortOrder order = SortOrder::kAscending);
PlanPtr hash_join(PlanPtr left, PlanPtr right, std::string left_key, std::string right_key,
                  size_t build_side = 1);
PlanPtr merge_join(PlanPtr left, PlanPtr right, std::string left_key, std::string right_key);
PlanPtr union_all(std::vector<PlanPtr> children);
PlanPtr merge_sorted(std::vector<PlanPtr> children, std::string key,
                     SortOrder order = SortOrder::kAscending);
PlanPtr reuse_cache(PlanPtr child, std::string tag);
PlanPtr reuse_load(std::string tag);

}  // namespace plan

// ReuseCache nodes of a tree by tag.
std::map<std::string, const PlanNode*> reuse_caches(const PlanPtr& root);

// Cost-model weights per input row.
struct CostWeights {
  double scan = 1;
  double select = 1;
  double project = 0;
  double merge_join = 2;
  double hash_build = 4;
  double hash_probe = 1;
  double hash_aggregate = 4;
  double sort_factor = 1;  // times n * log2(n)
  double union_row = 1;
  double merge_row = 1;
  double reuse_row = 1;
  double select_selectivity = 0.5;
};

// Fills est_rows, cost and guaranteed_empty bottom-up. Patch-branch
// cardinalities come from the index's exact patch count.
void annotate(const PlanPtr& root, const CostWeights& weights = {});

// Annotated cost of the whole tree.
double plan_cost(const PlanPtr& root, const CostWeights& weights = {});

// One node per line, two spaces of indentation per level, with cardinality and
// cost annotations.
std::string explain(const PlanPtr& root);

// Output column names of a node.
std::vector<std::string> output_columns(const PlanNode& node,
                                        const std::map<std::string, const PlanNode*>& caches);

// True when the node's output is ordered on `key` by `order`.
bool ordered_on(const PlanNode& node, const std::string& key, SortOrder order,
                const std::map<std::string, const PlanNode*>& caches = {});

}  // namespace patchindex
