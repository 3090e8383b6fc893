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

#include "patchindex/sorted_subsequence.h"

#include <algorithm>
#include <limits>

namespace patchindex {

std::string_view to_string(SortOrder order) {
  return order == SortOrder::kAscending ? "asc" : "desc";
}

std::vector<size_t> longest_sorted_subsequence(std::span<const int64_t> values,
                                               SortOrder order) {
  constexpr size_t kNone = std::numeric_limits<size_t>::max();
  const size_t n = values.size();
  if (n == 0) return {};

  // tails[k]: index of the best last element of a sorted subsequence of
  // length k + 1 seen so far. tail_values mirrors values[tails[k]], mapped so
  // that the comparison is always "non-decreasing".
  std::vector<size_t> tails;
  std::vector<int64_t> tail_values;
  std::vector<size_t> prev(n, kNone);
  const bool ascending = order == SortOrder::kAscending;

  for (size_t i = 0; i < n; ++i) {
    const int64_t v = values[i];
    size_t k;
    if (ascending) {
      k = static_cast<size_t>(
          std::upper_bound(tail_values.begin(), tail_values.end(), v) - tail_values.begin());
    } else {
      // Non-increasing: first tail strictly smaller than v.
      k = static_cast<size_t>(
          std::upper_bound(tail_values.begin(), tail_values.end(), v, std::greater<>()) -
          tail_values.begin());
    }
    if (k > 0) prev[i] = tails[k - 1];
    if (k == tails.size()) {
      tails.push_back(i);
      tail_values.push_back(v);
    } else {
      tails[k] = i;
      tail_values[k] = v;
    }
  }

  std::vector<size_t> picked(tails.size());
  size_t cur = tails.back();
  for (size_t k = picked.size(); k-- > 0;) {
    picked[k] = cur;
    cur = prev[cur];
  }
  return picked;
}

}  // namespace patchindex
