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

// Synthetic two-column datasets with a controlled exception rate.

#pragma once

#include <cstdint>
#include <random>

#include "patchindex/column_store.h"
#include "patchindex/patch_index.h"

namespace patchindex {

// Uniform integer in [0, bound) with a result that does not depend on the
// standard library's distribution implementation.
uint64_t bounded_random(std::mt19937_64& rng, uint64_t bound);

// Exactly `k` distinct positions from [0, n), ascending.
std::vector<uint64_t> sample_positions(std::mt19937_64& rng, uint64_t n, uint64_t k);

struct GenSpec {
  ConstraintType constraint = ConstraintType::kNearlyUnique;
  uint64_t rows = 1'000'000;
  double exception_rate = 0.0;
  // NUC: number of values exceptions are spread over.
  uint64_t duplicate_domain = 100'000;
  // NSC: sorted values span [0, value_domain); 0 means `rows`.
  uint64_t value_domain = 0;
  size_t partitions = 1;
  uint64_t block_size = ColumnTable::kDefaultBlockSize;
  uint64_t seed = 42;
};

// Number of exception rows the generator places: ceil(e * t).
uint64_t exception_rows(const GenSpec& spec);

// Columns `key` (0..t-1, declared sorted) and `value`.
//
// NUC: exception rows take values from [0, d) with d = min(duplicate_domain,
// n/2), each used at least twice; every other row holds
// duplicate_domain + rowID, so unique values are ascending and disjoint from
// the duplicate values. A single exception row copies another row's value.
//
// NSC: non-exception rows hold floor(rowID * domain / t); exception rows hold
// a uniform value from [0, domain).
ColumnTable generate(const GenSpec& spec);

// Dimension table for join workloads: `key` 0..rows-1 (declared sorted) and a
// random `attr` column.
ColumnTable generate_dimension(uint64_t rows, size_t partitions, uint64_t seed,
                               uint64_t block_size = ColumnTable::kDefaultBlockSize);

}  // namespace patchindex
