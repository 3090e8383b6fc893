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

#include "patchindex/plan.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "patchindex/error.h"

namespace patchindex {

std::string_view to_string(ScanMode mode) {
  switch (mode) {
    case ScanMode::kAll:
      return "all";
    case ScanMode::kExcludePatches:
      return "exclude_patches";
    case ScanMode::kUsePatches:
      return "use_patches";
  }
  return "?";
}

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::kScan:
      return "Scan";
    case OpKind::kSelect:
      return "Select";
    case OpKind::kProject:
      return "Project";
    case OpKind::kHashAggregateDistinct:
      return "HashAggregateDistinct";
    case OpKind::kGroupAggregate:
      return "GroupAggregate";
    case OpKind::kSort:
      return "Sort";
    case OpKind::kHashJoin:
      return "HashJoin";
    case OpKind::kMergeJoin:
      return "MergeJoin";
    case OpKind::kUnion:
      return "Union";
    case OpKind::kMergeSortedStreams:
      return "MergeSortedStreams";
    case OpKind::kReuseCache:
      return "ReuseCache";
    case OpKind::kReuseLoad:
      return "ReuseLoad";
  }
  return "?";
}

namespace plan {

namespace {

PlanPtr node(OpKind kind, std::vector<PlanPtr> children = {}) {
  auto n = std::make_shared<PlanNode>();
  n->kind = kind;
  n->children = std::move(children);
  return n;
}

}  // namespace

PlanPtr scan(const ColumnTable& table, std::vector<std::string> columns, ScanMode mode,
             const PatchIndex* index) {
  if (mode != ScanMode::kAll && index == nullptr) {
    throw PlanError("patch-aware scan modes need an index");
  }
  auto n = node(OpKind::kScan);
  n->table = &table;
  n->index = index;
  n->mode = mode;
  n->columns = std::move(columns);
  return n;
}

PlanPtr select(PlanPtr child, std::string column, int64_t lo, int64_t hi) {
  auto n = node(OpKind::kSelect, {std::move(child)});
  n->column = std::move(column);
  n->lo = lo;
  n->hi = hi;
  return n;
}

PlanPtr project(PlanPtr child, std::vector<std::string> columns,
                std::optional<std::pair<std::string, int64_t>> constant) {
  auto n = node(OpKind::kProject, {std::move(child)});
  n->columns = std::move(columns);
  n->constant = std::move(constant);
  return n;
}

PlanPtr distinct(PlanPtr child, std::string key) {
  auto n = node(OpKind::kHashAggregateDistinct, {std::move(child)});
  n->key = std::move(key);
  return n;
}

PlanPtr group_count(PlanPtr child, std::string key, std::string count_name) {
  auto n = node(OpKind::kGroupAggregate, {std::move(child)});
  n->key = std::move(key);
  n->count_name = std::move(count_name);
  return n;
}

PlanPtr sort(PlanPtr child, std::string key, SortOrder order) {
  auto n = node(OpKind::kSort, {std::move(child)});
  n->key = std::move(key);
  n->order = order;
  return n;
}

PlanPtr hash_join(PlanPtr left, PlanPtr right, std::string left_key, std::string right_key,
                  size_t build_side) {
  if (build_side > 1) throw PlanError("hash join build side must be 0 or 1");
  auto n = node(OpKind::kHashJoin, {std::move(left), std::move(right)});
  n->key = std::move(left_key);
  n->right_key = std::move(right_key);
  n->build_side = build_side;
  return n;
}

PlanPtr merge_join(PlanPtr left, PlanPtr right, std::string left_key, std::string right_key) {
  auto n = node(OpKind::kMergeJoin, {std::move(left), std::move(right)});
  n->key = std::move(left_key);
  n->right_key = std::move(right_key);
  return n;
}

PlanPtr union_all(std::vector<PlanPtr> children) {
  if (children.empty()) throw PlanError("union needs at least one input");
  return node(OpKind::kUnion, std::move(children));
}

PlanPtr merge_sorted(std::vector<PlanPtr> children, std::string key, SortOrder order) {
  if (children.empty()) throw PlanError("merge needs at least one input");
  auto n = node(OpKind::kMergeSortedStreams, std::move(children));
  n->key = std::move(key);
  n->order = order;
  return n;
}

PlanPtr reuse_cache(PlanPtr child, std::string tag) {
  auto n = node(OpKind::kReuseCache, {std::move(child)});
  n->tag = std::move(tag);
  return n;
}

PlanPtr reuse_load(std::string tag) {
  auto n = node(OpKind::kReuseLoad);
  n->tag = std::move(tag);
  return n;
}

}  // namespace plan

std::map<std::string, const PlanNode*> reuse_caches(const PlanPtr& root) {
  std::map<std::string, const PlanNode*> out;
  std::function<void(const PlanNode&)> walk = [&](const PlanNode& n) {
    if (n.kind == OpKind::kReuseCache) out[n.tag] = &n;
    for (const auto& c : n.children) walk(*c);
  };
  if (root) walk(*root);
  return out;
}

namespace {

double scan_input_rows(const PlanNode& n) {
  const double rows = static_cast<double>(n.table->row_count());
  if (n.mode == ScanMode::kUsePatches) return static_cast<double>(n.index->patch_count());
  return rows;
}

double scan_output_rows(const PlanNode& n) {
  const double rows = static_cast<double>(n.table->row_count());
  if (n.mode == ScanMode::kAll) return rows;
  const double patches = static_cast<double>(n.index->patch_count());
  return n.mode == ScanMode::kUsePatches ? patches : rows - patches;
}

double n_log_n(double n) { return n < 2 ? n : n * std::log2(n); }

void annotate_node(PlanNode& n, const CostWeights& w,
                   const std::map<std::string, const PlanNode*>& caches) {
  for (auto& c : n.children) annotate_node(*c, w, caches);
  double child_cost = 0;
  bool any_empty = false;
  bool all_empty = !n.children.empty();
  for (const auto& c : n.children) {
    child_cost += c->cost;
    any_empty = any_empty || c->guaranteed_empty;
    all_empty = all_empty && c->guaranteed_empty;
  }
  const double in = n.children.empty() ? 0 : n.children[0]->est_rows;
  double own = 0;
  switch (n.kind) {
    case OpKind::kScan:
      n.est_rows = scan_output_rows(n);
      own = w.scan * scan_input_rows(n);
      n.guaranteed_empty = n.mode == ScanMode::kUsePatches && n.index->patch_count() == 0;
      break;
    case OpKind::kSelect:
      n.est_rows = in * w.select_selectivity;
      own = w.select * in;
      n.guaranteed_empty = any_empty;
      break;
    case OpKind::kProject:
      n.est_rows = in;
      own = w.project * in;
      n.guaranteed_empty = any_empty;
      break;
    case OpKind::kHashAggregateDistinct:
    case OpKind::kGroupAggregate:
      n.est_rows = in;
      own = w.hash_aggregate * in;
      n.guaranteed_empty = any_empty;
      break;
    case OpKind::kSort:
      n.est_rows = in;
      own = w.sort_factor * n_log_n(in);
      n.guaranteed_empty = any_empty;
      break;
    case OpKind::kHashJoin: {
      const double build = n.children[n.build_side]->est_rows;
      const double probe = n.children[1 - n.build_side]->est_rows;
      n.est_rows = n.children[0]->est_rows;
      own = w.hash_build * build + w.hash_probe * probe;
      n.guaranteed_empty = any_empty;
      break;
    }
    case OpKind::kMergeJoin:
      n.est_rows = n.children[0]->est_rows;
      own = w.merge_join * (n.children[0]->est_rows + n.children[1]->est_rows);
      n.guaranteed_empty = any_empty;
      break;
    case OpKind::kUnion:
    case OpKind::kMergeSortedStreams: {
      double total = 0;
      for (const auto& c : n.children) total += c->est_rows;
      n.est_rows = total;
      own = (n.kind == OpKind::kUnion ? w.union_row : w.merge_row) * total;
      n.guaranteed_empty = all_empty;
      break;
    }
    case OpKind::kReuseCache:
      n.est_rows = in;
      own = w.reuse_row * in;
      n.guaranteed_empty = any_empty;
      break;
    case OpKind::kReuseLoad: {
      auto it = caches.find(n.tag);
      if (it == caches.end()) throw PlanError("ReuseLoad without ReuseCache for tag " + n.tag);
      const PlanNode& cached = *it->second->children.at(0);
      // The cache child may not be annotated yet when the load comes first.
      annotate_node(const_cast<PlanNode&>(cached), w, caches);
      n.est_rows = cached.est_rows;
      own = w.reuse_row * n.est_rows;
      n.guaranteed_empty = cached.guaranteed_empty;
      break;
    }
  }
  n.cost = child_cost + own;
}

}  // namespace

void annotate(const PlanPtr& root, const CostWeights& weights) {
  if (!root) throw PlanError("empty plan");
  annotate_node(*root, weights, reuse_caches(root));
}

double plan_cost(const PlanPtr& root, const CostWeights& weights) {
  annotate(root, weights);
  return root->cost;
}

namespace {

std::string describe(const PlanNode& n) {
  std::string s(to_string(n.kind));
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
  };
  switch (n.kind) {
    case OpKind::kScan:
      s += "[mode=" + std::string(to_string(n.mode)) + " cols=" + join(n.columns) + "]";
      break;
    case OpKind::kSelect:
      s += "[" + std::to_string(n.lo) + "<=" + n.column + "<=" + std::to_string(n.hi) + "]";
      break;
    case OpKind::kProject:
      s += "[" + join(n.columns);
      if (n.constant) s += "," + n.constant->first + "=" + std::to_string(n.constant->second);
      s += "]";
      break;
    case OpKind::kHashAggregateDistinct:
    case OpKind::kGroupAggregate:
      s += "[key=" + n.key + "]";
      break;
    case OpKind::kSort:
    case OpKind::kMergeSortedStreams:
      s += "[key=" + n.key + " " + std::string(to_string(n.order)) + "]";
      break;
    case OpKind::kHashJoin:
      s += "[" + n.key + "=" + n.right_key + " build=" + (n.build_side == 0 ? "left" : "right") +
           "]";
      break;
    case OpKind::kMergeJoin:
      s += "[" + n.key + "=" + n.right_key + "]";
      break;
    case OpKind::kReuseCache:
    case OpKind::kReuseLoad:
      s += "[tag=" + n.tag + "]";
      break;
    case OpKind::kUnion:
      break;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), " rows=%.0f cost=%.0f", n.est_rows, n.cost);
  s += buf;
  if (n.guaranteed_empty) s += " empty";
  return s;
}

}  // namespace

std::string explain(const PlanPtr& root) {
  annotate(root);
  std::string out;
  std::function<void(const PlanNode&, size_t)> walk = [&](const PlanNode& n, size_t depth) {
    out += std::string(2 * depth, ' ') + describe(n) + "\n";
    for (const auto& c : n.children) walk(*c, depth + 1);
  };
  walk(*root, 0);
  return out;
}

std::vector<std::string> output_columns(const PlanNode& n,
                                        const std::map<std::string, const PlanNode*>& caches) {
  switch (n.kind) {
    case OpKind::kScan:
      return n.columns;
    case OpKind::kProject: {
      auto cols = n.columns;
      if (n.constant) cols.push_back(n.constant->first);
      return cols;
    }
    case OpKind::kHashAggregateDistinct:
      return {n.key};
    case OpKind::kGroupAggregate:
      return {n.key, n.count_name};
    case OpKind::kHashJoin:
    case OpKind::kMergeJoin: {
      auto left = output_columns(*n.children[0], caches);
      for (auto c : output_columns(*n.children[1], caches)) {
        while (std::find(left.begin(), left.end(), c) != left.end()) c += "_r";
        left.push_back(c);
      }
      return left;
    }
    case OpKind::kReuseLoad: {
      auto it = caches.find(n.tag);
      if (it == caches.end()) throw PlanError("ReuseLoad without ReuseCache for tag " + n.tag);
      return output_columns(*it->second, caches);
    }
    default:
      return output_columns(*n.children.at(0), caches);
  }
}

bool ordered_on(const PlanNode& n, const std::string& key, SortOrder order,
                const std::map<std::string, const PlanNode*>& caches) {
  switch (n.kind) {
    case OpKind::kScan: {
      if (std::find(n.columns.begin(), n.columns.end(), key) == n.columns.end()) return false;
      if (n.mode == ScanMode::kExcludePatches && n.index->column() == key &&
          n.index->constraint() == Constraint::nearly_sorted(order)) {
        return true;
      }
      const int col = n.table->schema().find(key);
      return order == SortOrder::kAscending && col >= 0 &&
             n.table->is_sorted(static_cast<size_t>(col));
    }
    case OpKind::kSelect:
    case OpKind::kReuseCache:
      return ordered_on(*n.children[0], key, order, caches);
    case OpKind::kProject:
      return std::find(n.columns.begin(), n.columns.end(), key) != n.columns.end() &&
             ordered_on(*n.children[0], key, order, caches);
    case OpKind::kSort:
    case OpKind::kMergeSortedStreams:
      return n.key == key && n.order == order;
    case OpKind::kMergeJoin:
      return n.key == key && ordered_on(*n.children[0], key, order, caches);
    case OpKind::kReuseLoad: {
      auto it = caches.find(n.tag);
      return it != caches.end() && ordered_on(*it->second, key, order, caches);
    }
    default:
      return false;
  }
}

}  // namespace patchindex
