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

#include "patchindex/rewrite.h"

#include <algorithm>
#include <atomic>
#include <functional>
#include <set>

namespace patchindex {

namespace {

// Select/Project nodes between an operator and its base scan.
struct Chain {
  std::vector<const PlanNode*> nodes;  // top to bottom
  const PlanNode* scan = nullptr;
};

bool find_chain(const PlanPtr& top, Chain& out) {
  const PlanNode* n = top.get();
  while (n && (n->kind == OpKind::kSelect || n->kind == OpKind::kProject)) {
    out.nodes.push_back(n);
    n = n->children.at(0).get();
  }
  if (!n || n->kind != OpKind::kScan || n->mode != ScanMode::kAll) return false;
  out.scan = n;
  return true;
}

// Copies the chain on top of a new scan of the same table and columns.
PlanPtr rebuild(const Chain& chain, ScanMode mode, const PatchIndex& index) {
  PlanPtr cur = plan::scan(*chain.scan->table, chain.scan->columns, mode, &index);
  for (auto it = chain.nodes.rbegin(); it != chain.nodes.rend(); ++it) {
    auto copy = std::make_shared<PlanNode>(**it);
    copy->children = {cur};
    cur = copy;
  }
  return cur;
}

bool scans_indexed_column(const Chain& chain, const PatchIndex& index, const std::string& key) {
  if (index.column() != key || !index.matches(*chain.scan->table)) return false;
  const auto& cols = chain.scan->columns;
  return std::find(cols.begin(), cols.end(), key) != cols.end();
}

std::string fresh_tag() {
  static std::atomic<int> counter{0};
  return "reuse" + std::to_string(counter++);
}

}  // namespace

PlanPtr rewrite_distinct(const PlanPtr& plan, const PatchIndex& index) {
  if (!plan || !index.constraint().is_unique()) return nullptr;
  if (plan->kind != OpKind::kHashAggregateDistinct && plan->kind != OpKind::kGroupAggregate) {
    return nullptr;
  }
  Chain chain;
  if (!find_chain(plan->children.at(0), chain)) return nullptr;
  if (!scans_indexed_column(chain, index, plan->key)) return nullptr;

  PlanPtr rows = rebuild(chain, ScanMode::kExcludePatches, index);
  const bool key_only = output_columns(*rows, {}) == std::vector<std::string>{plan->key};
  PlanPtr patches = rebuild(chain, ScanMode::kUsePatches, index);
  if (plan->kind == OpKind::kHashAggregateDistinct) {
    if (!key_only) rows = plan::project(rows, {plan->key});
    return plan::union_all({rows, plan::distinct(patches, plan->key)});
  }
  // Grouping decoupled: every non-patch key occurs once.
  rows = plan::project(rows, {plan->key}, std::make_pair(plan->count_name, int64_t{1}));
  return plan::union_all({rows, plan::group_count(patches, plan->key, plan->count_name)});
}

PlanPtr rewrite_sort(const PlanPtr& plan, const PatchIndex& index) {
  if (!plan || plan->kind != OpKind::kSort) return nullptr;
  if (!(index.constraint() == Constraint::nearly_sorted(plan->order))) return nullptr;
  Chain chain;
  if (!find_chain(plan->children.at(0), chain)) return nullptr;
  if (!scans_indexed_column(chain, index, plan->key)) return nullptr;

  PlanPtr rows = rebuild(chain, ScanMode::kExcludePatches, index);
  PlanPtr patches = plan::sort(rebuild(chain, ScanMode::kUsePatches, index), plan->key, plan->order);
  return plan::merge_sorted({rows, patches}, plan->key, plan->order);
}

PlanPtr rewrite_join(const PlanPtr& plan, const PatchIndex& index) {
  if (!plan || plan->kind != OpKind::kHashJoin) return nullptr;
  if (!(index.constraint() == Constraint::nearly_sorted(SortOrder::kAscending))) return nullptr;
  Chain chain;
  if (!find_chain(plan->children.at(0), chain)) return nullptr;
  if (!scans_indexed_column(chain, index, plan->key)) return nullptr;
  const PlanPtr& x = plan->children.at(1);
  if (!ordered_on(*x, plan->right_key, SortOrder::kAscending, reuse_caches(x))) return nullptr;

  const std::string tag = fresh_tag();
  PlanPtr rows = rebuild(chain, ScanMode::kExcludePatches, index);
  PlanPtr patches = rebuild(chain, ScanMode::kUsePatches, index);
  PlanPtr cache = plan::reuse_cache(x, tag);
  annotate(patches);
  annotate(x);
  const size_t build = patches->est_rows < x->est_rows ? 0 : 1;
  return plan::union_all({
      plan::merge_join(rows, plan::reuse_load(tag), plan->key, plan->right_key),
      plan::hash_join(patches, cache, plan->key, plan->right_key, build),
  });
}

PlanPtr zero_branch_prune(const PlanPtr& plan) {
  if (!plan) return plan;
  annotate(plan);
  const auto caches = reuse_caches(plan);

  std::function<PlanPtr(const PlanPtr&)> prune = [&](const PlanPtr& n) -> PlanPtr {
    auto copy = std::make_shared<PlanNode>(*n);
    copy->children.clear();
    for (const auto& c : n->children) copy->children.push_back(prune(c));
    if (n->kind == OpKind::kUnion || n->kind == OpKind::kMergeSortedStreams) {
      std::vector<PlanPtr> live;
      for (const auto& c : copy->children) {
        if (!c->guaranteed_empty) live.push_back(c);
      }
      if (live.empty()) live.push_back(copy->children.front());
      if (live.size() == 1) return live.front();
      copy->children = std::move(live);
    }
    return copy;
  };
  PlanPtr out = prune(plan);

  // Loads whose cache was pruned away read the cached subtree directly, and
  // caches nobody loads become plain subtrees.
  const auto kept = reuse_caches(out);
  std::set<std::string> loaded;
  std::function<void(const PlanNode&)> find_loads = [&](const PlanNode& n) {
    if (n.kind == OpKind::kReuseLoad) loaded.insert(n.tag);
    for (const auto& c : n.children) find_loads(*c);
  };
  find_loads(*out);
  std::function<PlanPtr(const PlanPtr&)> fix = [&](const PlanPtr& n) -> PlanPtr {
    if (n->kind == OpKind::kReuseLoad && !kept.count(n->tag)) {
      return fix(caches.at(n->tag)->children.at(0));
    }
    if (n->kind == OpKind::kReuseCache && !loaded.count(n->tag)) return fix(n->children.at(0));
    for (auto& c : n->children) c = fix(c);
    return n;
  };
  out = fix(out);
  annotate(out);
  return out;
}

PlanPtr choose_plan(const PlanPtr& naive, const PlanPtr& rewritten, const PatchIndex& index) {
  if (!rewritten) return naive;
  if (index.patch_count() == 0) return zero_branch_prune(rewritten);
  return plan_cost(rewritten) < plan_cost(naive) ? rewritten : naive;
}

}  // namespace patchindex
