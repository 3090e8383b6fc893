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

#include "patchindex/patch_index.h"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.h"
#include "patchindex/error.h"
#include "patchindex/worker_pool.h"

namespace patchindex {
namespace {

using testing::make_table;

IntVector ints(std::vector<std::optional<int64_t>> v) {
  IntVector out;
  for (auto x : v) out.push(x);
  return out;
}

TEST(PatchIndex, NucDiscovery) {
  EXPECT_TRUE(nuc_patches(ints({7, 8, 9})).empty());
  EXPECT_EQ(nuc_patches(ints({5, 5, 6})), (std::vector<uint64_t>{0, 1}));
  EXPECT_EQ(nuc_patches(ints({1, std::nullopt, 2, std::nullopt})),
            (std::vector<uint64_t>{1, 3}));
}

TEST(PatchIndex, NucMatchesBruteForce) {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 100; ++it) {
    std::vector<std::optional<int64_t>> v(rng() % 300);
    for (auto& x : v) {
      if (rng() % 20 == 0) continue;
      x = static_cast<int64_t>(rng() % 200);
    }
    EXPECT_EQ(nuc_patches(ints(v)), testing::duplicate_rows(v));
  }
}

TEST(PatchIndex, NscDiscovery) {
  const auto sorted = nsc_patches(ints({1, 2, 3, 4}), SortOrder::kAscending);
  EXPECT_TRUE(sorted.patches.empty());
  EXPECT_EQ(sorted.tail_value, 4);
  const auto base = nsc_patches(ints({1, 2, 10}), SortOrder::kAscending);
  EXPECT_TRUE(base.patches.empty());
  EXPECT_EQ(base.tail_value, 10);
  EXPECT_EQ(base.tail_row, 2u);
  const auto desc = nsc_patches(ints({9, std::nullopt, 8, 10, 1}), SortOrder::kDescending);
  EXPECT_EQ(desc.patches.size(), 2u);
  EXPECT_EQ(desc.tail_value, 1);
}

TEST(PatchIndex, NscPatchCountMatchesOracle) {
  std::mt19937_64 rng(22);
  for (int it = 0; it < 50; ++it) {
    std::vector<int64_t> v(rng() % 1000);
    for (auto& x : v) x = static_cast<int64_t>(rng() % 100);
    IntVector iv;
    for (auto x : v) iv.push(x);
    for (SortOrder o : {SortOrder::kAscending, SortOrder::kDescending}) {
      EXPECT_EQ(nsc_patches(iv, o).patches.size(), v.size() - testing::lss_length_dp(v, o));
    }
  }
}

TEST(PatchIndex, IdentifierRenumbering) {
  PatchStore s(StoreKind::kIdentifiers, 20);
  const std::vector<uint64_t> add{3, 9};
  s.add_patches(add);
  s.drop_rows({});
  EXPECT_EQ(s.patches(), add);
  const std::vector<uint64_t> drop{5};
  s.drop_rows(drop);
  EXPECT_EQ(s.patches(), (std::vector<uint64_t>{3, 8}));
  EXPECT_EQ(s.row_count(), 19u);
  const std::vector<uint64_t> drop_patch{8, 3};
  s.drop_rows(drop_patch);
  EXPECT_TRUE(s.patches().empty());
  EXPECT_EQ(s.patch_count(), 0u);
}

TEST(PatchIndex, StoreErrors) {
  for (StoreKind k : {StoreKind::kBitmap, StoreKind::kIdentifiers}) {
    PatchStore s(k, 10);
    const std::vector<uint64_t> big{10};
    const std::vector<uint64_t> asc{1, 2};
    EXPECT_THROW(s.add_patches(big), BoundsError);
    EXPECT_THROW(s.is_patch(10), BoundsError);
    EXPECT_THROW(s.drop_rows(asc), ContractError);
  }
}

TEST(PatchIndex, StoreVariantsEquivalent) {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 30; ++it) {
    uint64_t rows = 1 + testing::uniform(rng, 3000);
    PatchStore a(StoreKind::kBitmap, rows, 64);
    PatchStore b(StoreKind::kIdentifiers, rows);
    for (int op = 0; op < 100 && rows > 0; ++op) {
      const unsigned kind = rng() % 4;
      if (kind == 0) {
        std::vector<uint64_t> add;
        for (int k = 0; k < 10; ++k) add.push_back(testing::uniform(rng, rows));
        a.add_patches(add);
        b.add_patches(add);
      } else if (kind == 1) {
        const std::vector<uint64_t> rm{testing::uniform(rng, rows)};
        a.remove_patches(rm);
        b.remove_patches(rm);
      } else if (kind == 2) {
        std::set<uint64_t, std::greater<>> d;
        for (int k = 0; k < 5; ++k) d.insert(testing::uniform(rng, rows));
        const std::vector<uint64_t> desc(d.begin(), d.end());
        a.drop_rows(desc);
        b.drop_rows(desc);
        rows -= desc.size();
      } else {
        const uint64_t g = testing::uniform(rng, 100);
        rows += g;
        a.grow(g);
        b.grow(g);
      }
      ASSERT_EQ(a.row_count(), b.row_count());
      ASSERT_EQ(a.patches(), b.patches());
      ASSERT_EQ(a.patch_count(), b.patch_count());
      for (uint64_t r = 0; r < rows; r += 7) ASSERT_EQ(a.is_patch(r), b.is_patch(r));
    }
  }
}

TEST(PatchIndex, PartitionTransparency) {
  std::mt19937_64 rng(24);
  std::vector<int64_t> v(5000);
  for (auto& x : v) x = static_cast<int64_t>(rng() % 4000);
  const auto one = make_table(v, 1);
  const auto four = make_table(v, 4);
  for (Constraint c : {Constraint::nearly_unique(), Constraint::nearly_sorted()}) {
    const auto a = PatchIndex::discover(one, "value", c);
    WorkerPool pool(2);
    const auto b = PatchIndex::discover(four, "value", c, {StoreKind::kIdentifiers, 1 << 14, &pool});
    EXPECT_EQ(a.patches(), b.patches()) << to_string(c);
    EXPECT_EQ(b.partition_count(), 4u);
    EXPECT_TRUE(constraint_holds(four, b));
    EXPECT_EQ(a.last_sorted_value(), b.last_sorted_value());
  }
}

TEST(PatchIndex, GlobalRowIds) {
  const auto t = make_table(std::vector<int64_t>{1, 2, 3, 4, 1, 6}, 3);
  auto idx = PatchIndex::discover(t, "value", Constraint::nearly_unique());
  EXPECT_EQ(idx.patches(), (std::vector<uint64_t>{0, 4}));
  EXPECT_TRUE(idx.is_patch(4));
  EXPECT_FALSE(idx.is_patch(5));
  EXPECT_NEAR(idx.exception_rate(), 2.0 / 6.0, 1e-12);
  const std::vector<uint64_t> drop{4, 1};
  idx.drop_rows(drop);
  EXPECT_EQ(idx.patches(), (std::vector<uint64_t>{0}));
  EXPECT_EQ(idx.row_count(), 4u);
  EXPECT_THROW(idx.is_patch(4), BoundsError);
  EXPECT_THROW(PatchIndex::discover(t, "missing", Constraint::nearly_unique()), PlanError);
}

TEST(PatchIndex, ConstraintHoldsDetectsViolation) {
  const auto t = make_table(std::vector<int64_t>{1, 1, 2});
  PatchIndex idx("value", Constraint::nearly_unique(), std::vector<uint64_t>{3});
  std::string why;
  EXPECT_FALSE(constraint_holds(t, idx, &why));
  EXPECT_FALSE(why.empty());
  const std::vector<uint64_t> p{0};
  idx.add_patches(p);
  EXPECT_FALSE(constraint_holds(t, idx, &why));
  EXPECT_NE(why.find("patch row 0"), std::string::npos) << why;
  const std::vector<uint64_t> q{1};
  idx.add_patches(q);
  EXPECT_TRUE(constraint_holds(t, idx));
}

TEST(PatchIndex, MemoryFormulas) {
  for (uint64_t t : {uint64_t{1'000'000}, uint64_t{10'000'000}}) {
    PatchStore bitmap(StoreKind::kBitmap, t);
    const double bformula = static_cast<double>(t) / 8.0 * 1.0039;
    EXPECT_NEAR(static_cast<double>(bitmap.memory_bytes()), bformula, 0.01 * bformula);
    PatchStore ids(StoreKind::kIdentifiers, t);
    std::vector<uint64_t> p;
    for (uint64_t r = 0; r < t; r += 100) p.push_back(r);
    ids.add_patches(p);
    const double iformula = 0.01 * static_cast<double>(t) * 8.0;
    EXPECT_NEAR(static_cast<double>(ids.memory_bytes()), iformula, 0.01 * iformula);
  }
}

TEST(PatchIndex, MemoryCrossoverAtOneSixtyFourth) {
  const uint64_t t = 1'000'000;
  PatchStore bitmap(StoreKind::kBitmap, t);
  auto ids_bytes = [&](double e) {
    PatchStore ids(StoreKind::kIdentifiers, t);
    std::vector<uint64_t> p;
    const auto n = static_cast<uint64_t>(e * static_cast<double>(t));
    for (uint64_t i = 0; i < n; ++i) p.push_back(i * (t / n));
    ids.add_patches(p);
    return ids.memory_bytes();
  };
  EXPECT_LT(ids_bytes(0.015), bitmap.memory_bytes());
  EXPECT_GT(ids_bytes(0.0165), bitmap.memory_bytes());
}

}  // namespace
}  // namespace patchindex
