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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace patchindex {

enum class SortOrder : uint8_t { kAscending, kDescending };

std::string_view to_string(SortOrder order);

// True when a may precede b in a sequence sorted by `order` (ties allowed).
inline bool in_order(int64_t a, int64_t b, SortOrder order) {
  return order == SortOrder::kAscending ? a <= b : a >= b;
}

// Positions (increasing) of a longest subsequence of `values` that is sorted
// by `order`, ties allowed. O(n log n) tail-array method. Among all longest
// subsequences the returned one ends with the best possible tail: the smallest
// last value for ascending order, the largest for descending.
std::vector<size_t> longest_sorted_subsequence(std::span<const int64_t> values,
                                               SortOrder order);

}  // namespace patchindex
