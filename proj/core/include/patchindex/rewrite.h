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

// PatchIndex-aware plan rewrites, plan choice and zero-branch pruning.

#pragma once

#include "patchindex/patch_index.h"
#include "patchindex/plan.h"

namespace patchindex {

// Distinct (or single-key group count) over a Select/Project chain on a full
// scan of the NUC-indexed column. Returns nullptr when the pattern does not
// match.
PlanPtr rewrite_distinct(const PlanPtr& plan, const PatchIndex& index);

// Sort on the NSC-indexed column, same order as the index, over a
// Select/Project chain on a full scan. nullptr when declined.
PlanPtr rewrite_sort(const PlanPtr& plan, const PatchIndex& index);

// HashJoin whose left input is a Select/Project chain over a full scan of the
// fact table (ascending NSC index on the left key) and whose right input is
// ordered on the right key. nullptr when declined.
PlanPtr rewrite_join(const PlanPtr& plan, const PatchIndex& index);

// Removes subtrees that cannot produce rows and collapses the Union/Merge
// nodes above them. Returns a new tree; the input is unchanged.
PlanPtr zero_branch_prune(const PlanPtr& plan);

// Picks the cheaper plan by the cost model. With no patches the rewritten plan
// is always taken, after zero-branch pruning.
PlanPtr choose_plan(const PlanPtr& naive, const PlanPtr& rewritten, const PatchIndex& index);

}  // namespace patchindex
