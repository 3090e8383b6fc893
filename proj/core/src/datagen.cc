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

#include "patchindex/datagen.h"

#include <cmath>

#include "patchindex/error.h"

namespace patchindex {

uint64_t bounded_random(std::mt19937_64& rng, uint64_t bound) {
  if (bound == 0) throw ConfigError("bounded_random: empty range");
  // Rejecting the short bottom of the range keeps the result unbiased.
  const uint64_t threshold = (0 - bound) % bound;
  uint64_t x;
  do {
    x = rng();
  } while (x < threshold);
  return x % bound;
}

std::vector<uint64_t> sample_positions(std::mt19937_64& rng, uint64_t n, uint64_t k) {
  if (k > n) throw ConfigError("sample_positions: k exceeds n");
  std::vector<uint64_t> out;
  out.reserve(k);
  // Selection sampling: row i is taken with probability needed / remaining.
  for (uint64_t i = 0; i < n && out.size() < k; ++i) {
    if (bounded_random(rng, n - i) < k - out.size()) out.push_back(i);
  }
  return out;
}

uint64_t exception_rows(const GenSpec& spec) {
  const double x = spec.exception_rate * static_cast<double>(spec.rows);
  return std::min<uint64_t>(spec.rows, static_cast<uint64_t>(std::ceil(x - 1e-9)));
}

namespace {

void validate(const GenSpec& spec) {
  if (!(spec.exception_rate >= 0.0 && spec.exception_rate <= 1.0)) {
    throw ConfigError("exception rate must be in [0, 1]");
  }
  if (spec.partitions == 0) throw ConfigError("at least one partition is required");
  if (spec.constraint == ConstraintType::kNearlyUnique && spec.duplicate_domain == 0) {
    throw ConfigError("duplicate domain must be positive");
  }
}

Schema two_columns(const char* second) {
  return Schema{{ColumnSpec{"key", ColumnType::kInt64, 0, false},
                 ColumnSpec{second, ColumnType::kInt64, 0, false}}};
}

ColumnTable load_table(Schema schema, size_t partitions, uint64_t block_size,
                       const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
  ColumnTable table(std::move(schema), partitions, block_size);
  const uint64_t t = a.size();
  for (size_t p = 0; p < partitions; ++p) {
    const uint64_t lo = t * p / partitions;
    const uint64_t hi = t * (p + 1) / partitions;
    table.load_int_column(p, 0, std::vector<int64_t>(a.begin() + lo, a.begin() + hi));
    table.load_int_column(p, 1, std::vector<int64_t>(b.begin() + lo, b.begin() + hi));
    table.finish_load(p, hi - lo);
  }
  table.declare_sorted(0);
  return table;
}

}  // namespace

ColumnTable generate(const GenSpec& spec) {
  validate(spec);
  const uint64_t t = spec.rows;
  std::mt19937_64 rng(spec.seed);
  std::vector<int64_t> key(t);
  std::vector<int64_t> value(t);
  for (uint64_t i = 0; i < t; ++i) key[i] = static_cast<int64_t>(i);

  const uint64_t n = exception_rows(spec);
  const std::vector<uint64_t> pos = sample_positions(rng, t, n);

  if (spec.constraint == ConstraintType::kNearlyUnique) {
    const auto base = static_cast<int64_t>(spec.duplicate_domain);
    for (uint64_t i = 0; i < t; ++i) value[i] = base + static_cast<int64_t>(i);
    if (n == 1 && t > 1) {
      const uint64_t other = (pos[0] + 1 + bounded_random(rng, t - 1)) % t;
      value[pos[0]] = value[other];
    } else if (n > 1) {
      const uint64_t d = std::min(spec.duplicate_domain, n / 2);
      std::vector<int64_t> draws(n);
      for (uint64_t i = 0; i < n; ++i) {
        draws[i] = i < 2 * d ? static_cast<int64_t>(i / 2)
                             : static_cast<int64_t>(bounded_random(rng, d));
      }
      // Shuffle so the guaranteed pairs are not adjacent.
      for (uint64_t i = n; i > 1; --i) std::swap(draws[i - 1], draws[bounded_random(rng, i)]);
      for (uint64_t i = 0; i < n; ++i) value[pos[i]] = draws[i];
    }
  } else {
    const uint64_t domain = spec.value_domain ? spec.value_domain : t;
    for (uint64_t i = 0; i < t; ++i) {
      value[i] = static_cast<int64_t>(static_cast<unsigned __int128>(i) * domain / t);
    }
    for (uint64_t p : pos) value[p] = static_cast<int64_t>(bounded_random(rng, domain));
  }
  return load_table(two_columns("value"), spec.partitions, spec.block_size, key, value);
}

ColumnTable generate_dimension(uint64_t rows, size_t partitions, uint64_t seed,
                               uint64_t block_size) {
  if (partitions == 0) throw ConfigError("at least one partition is required");
  std::mt19937_64 rng(seed);
  std::vector<int64_t> key(rows);
  std::vector<int64_t> attr(rows);
  for (uint64_t i = 0; i < rows; ++i) {
    key[i] = static_cast<int64_t>(i);
    attr[i] = static_cast<int64_t>(bounded_random(rng, 1'000'000));
  }
  return load_table(two_columns("attr"), partitions, block_size, key, attr);
}

}  // namespace patchindex
