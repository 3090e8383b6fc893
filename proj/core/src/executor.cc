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

#include "patchindex/executor.h"

#include <algorithm>
#include <numeric>
#include <queue>
#include <utility>

#include "patchindex/error.h"
#include "patchindex/worker_pool.h"

namespace patchindex {

namespace {

uint64_t mix(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Open-addressing map from int64 to a dense slot number.
class IntHashMap {
 public:
  explicit IntHashMap(size_t expected) {
    size_t cap = 16;
    while (cap < expected * 2) cap <<= 1;
    keys_.resize(cap);
    slots_.assign(cap, kEmpty);
    mask_ = cap - 1;
  }

  // Returns {slot, inserted}.
  std::pair<uint32_t, bool> insert(int64_t key) {
    if ((size_ + 1) * 2 > keys_.size()) rehash();
    size_t h = mix(static_cast<uint64_t>(key)) & mask_;
    while (slots_[h] != kEmpty) {
      if (keys_[h] == key) return {slots_[h], false};
      h = (h + 1) & mask_;
    }
    keys_[h] = key;
    slots_[h] = static_cast<uint32_t>(size_);
    return {static_cast<uint32_t>(size_++), true};
  }

  // kEmpty when absent.
  uint32_t find(int64_t key) const {
    size_t h = mix(static_cast<uint64_t>(key)) & mask_;
    while (slots_[h] != kEmpty) {
      if (keys_[h] == key) return slots_[h];
      h = (h + 1) & mask_;
    }
    return kEmpty;
  }

  size_t size() const { return size_; }

  static constexpr uint32_t kEmpty = 0xFFFFFFFFu;

 private:
  void rehash() {
    std::vector<int64_t> keys = std::move(keys_);
    std::vector<uint32_t> slots = std::move(slots_);
    keys_.assign(keys.size() * 2, 0);
    slots_.assign(keys.size() * 2, kEmpty);
    mask_ = keys_.size() - 1;
    for (size_t i = 0; i < keys.size(); ++i) {
      if (slots[i] == kEmpty) continue;
      size_t h = mix(static_cast<uint64_t>(keys[i])) & mask_;
      while (slots_[h] != kEmpty) h = (h + 1) & mask_;
      keys_[h] = keys[i];
      slots_[h] = slots[i];
    }
  }

  std::vector<int64_t> keys_;
  std::vector<uint32_t> slots_;
  size_t mask_ = 0;
  size_t size_ = 0;
};

RowBatch empty_like(const RowBatch& in, bool rowids) {
  RowBatch out;
  out.names = in.names;
  out.columns.resize(in.columns.size());
  if (!rowids) out.rowids.clear();
  return out;
}

void gather_column(const IntVector& in, const std::vector<size_t>& rows, IntVector& out) {
  const size_t base = out.values.size();
  out.values.resize(base + rows.size());
  for (size_t i = 0; i < rows.size(); ++i) out.values[base + i] = in.values[rows[i]];
  if (!in.valid.empty() || !out.valid.empty()) {
    out.valid.resize(base, 1);
    out.valid.resize(base + rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      out.valid[base + i] = in.valid.empty() ? 1 : in.valid[rows[i]];
    }
  }
}

RowBatch gather(const RowBatch& in, const std::vector<size_t>& rows) {
  RowBatch out = empty_like(in, false);
  for (size_t c = 0; c < in.columns.size(); ++c) gather_column(in.columns[c], rows, out.columns[c]);
  if (!in.rowids.empty()) {
    out.rowids.resize(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) out.rowids[i] = in.rowids[rows[i]];
  }
  return out;
}

// Joined output: row lrows[i] of `left` next to row rrows[i] of `right`.
RowBatch gather_pairs(const RowBatch& left, const std::vector<size_t>& lrows,
                      const RowBatch& right, const std::vector<size_t>& rrows);

// NULLs sort first ascending, last descending.
bool key_before(const IntVector& v, size_t a, size_t b, SortOrder order) {
  const bool na = v.is_null(a);
  const bool nb = v.is_null(b);
  if (na || nb) return order == SortOrder::kAscending ? (na && !nb) : (!na && nb);
  return order == SortOrder::kAscending ? v.values[a] < v.values[b] : v.values[a] > v.values[b];
}

void check_sorted_input(const IntVector& v, SortOrder order, const char* what) {
  for (size_t i = 1; i < v.size(); ++i) {
    if (key_before(v, i, i - 1, order)) {
      throw PlanError(std::string(what) + ": input is not sorted on the key");
    }
  }
}

RowBatch concat(std::vector<RowBatch> parts) {
  if (parts.empty()) return RowBatch{};
  bool rowids = true;
  for (const auto& p : parts) {
    if (p.names != parts[0].names) throw PlanError("union inputs have different columns");
    rowids = rowids && (p.row_count() == 0 || !p.rowids.empty());
  }
  size_t total = 0;
  for (const auto& p : parts) total += p.row_count();
  RowBatch out = std::move(parts[0]);
  if (!rowids) out.rowids.clear();
  for (auto& c : out.columns) c.values.reserve(total);
  for (size_t i = 1; i < parts.size(); ++i) {
    for (size_t c = 0; c < out.columns.size(); ++c) out.columns[c].append(parts[i].columns[c]);
    if (rowids) out.rowids.insert(out.rowids.end(), parts[i].rowids.begin(), parts[i].rowids.end());
  }
  return out;
}

std::vector<std::string> join_names(const RowBatch& l, const RowBatch& r) {
  std::vector<std::string> names = l.names;
  for (auto n : r.names) {
    while (std::find(names.begin(), names.end(), n) != names.end()) n += "_r";
    names.push_back(n);
  }
  return names;
}

RowBatch gather_pairs(const RowBatch& left, const std::vector<size_t>& lrows,
                      const RowBatch& right, const std::vector<size_t>& rrows) {
  RowBatch out;
  out.names = join_names(left, right);
  out.columns.resize(out.names.size());
  const size_t lcols = left.columns.size();
  for (size_t c = 0; c < lcols; ++c) gather_column(left.columns[c], lrows, out.columns[c]);
  for (size_t c = 0; c < right.columns.size(); ++c) {
    gather_column(right.columns[c], rrows, out.columns[lcols + c]);
  }
  return out;
}

}  // namespace

uint64_t batch_checksum(const RowBatch& batch) {
  uint64_t sum = 0;
  for (size_t r = 0; r < batch.row_count(); ++r) {
    uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& col : batch.columns) {
      const uint64_t v = col.is_null(r) ? 0x5bd1e995ULL : mix(static_cast<uint64_t>(col.values[r]));
      h = mix(h ^ v);
    }
    sum += h;
  }
  return sum ^ mix(batch.row_count());
}

RowBatch Executor::execute(const PlanPtr& root) {
  if (!root) throw PlanError("empty plan");
  stats_ = {};
  cache_.clear();
  cache_nodes_ = reuse_caches(root);
  return run(*root);
}

const RowBatch& Executor::materialize(const std::string& tag) {
  auto hit = cache_.find(tag);
  if (hit != cache_.end()) return hit->second;
  auto node = cache_nodes_.find(tag);
  if (node == cache_nodes_.end()) throw PlanError("ReuseLoad without ReuseCache for tag " + tag);
  RowBatch result = run(*node->second->children.at(0));
  ++stats_.reuse_evaluations[tag];
  return cache_.emplace(tag, std::move(result)).first->second;
}

RowBatch Executor::run_scan(const PlanNode& n) {
  const ColumnTable& table = *n.table;
  const size_t parts = table.partition_count();
  if (n.mode != ScanMode::kAll) {
    if (!n.index->matches(table)) throw PlanError("index does not match the scanned table");
  }
  std::vector<RowBatch> out(parts);
  std::vector<ScanStats> st(parts);
  std::vector<size_t> cols;
  for (const auto& name : n.columns) cols.push_back(table.schema().index_of(name));

  auto scan_one = [&](size_t p) {
    if (n.mode == ScanMode::kAll) {
      out[p] = table.scan_partition(p, n.columns, nullptr, &st[p]);
      return;
    }
    const PatchStore& store = n.index->partition(p);
    const Partition& part = table.partition(p);
    const uint64_t base = n.index->partition_offset(p);
    if (n.mode == ScanMode::kUsePatches) {
      RowBatch b;
      b.names = n.columns;
      b.columns.resize(cols.size());
      uint64_t last_block = UINT64_MAX;
      store.for_each_patch([&](uint64_t row) {
        for (size_t k = 0; k < cols.size(); ++k) b.columns[k].push(part.int_value(cols[k], row));
        b.rowids.push_back(base + row);
        const uint64_t block = row / part.block_size();
        if (block != last_block) ++st[p].blocks_scanned;
        last_block = block;
      });
      st[p].rows_scanned += b.rowids.size();
      out[p] = std::move(b);
      return;
    }
    // Exclude patches: keep the runs between patches.
    ScanRange keep;
    uint64_t next = 0;
    store.for_each_patch([&](uint64_t row) {
      if (row > next) keep.add(next, row);
      next = row + 1;
    });
    if (next < part.row_count()) keep.add(next, part.row_count());
    out[p] = table.scan_partition(p, n.columns, &keep, &st[p]);
  };
  if (pool_ && parts > 1) {
    pool_->run(parts, scan_one);
  } else {
    for (size_t p = 0; p < parts; ++p) scan_one(p);
  }
  for (const auto& s : st) {
    stats_.rows_scanned += s.rows_scanned;
    stats_.blocks_scanned += s.blocks_scanned;
  }
  if (parts == 0) {
    RowBatch b;
    b.names = n.columns;
    b.columns.resize(cols.size());
    return b;
  }
  return concat(std::move(out));
}

RowBatch Executor::run(const PlanNode& n) {
  switch (n.kind) {
    case OpKind::kScan:
      return run_scan(n);

    case OpKind::kSelect: {
      RowBatch in = run(*n.children[0]);
      const IntVector& v = in.columns.at(in.index_of(n.column));
      std::vector<size_t> rows;
      for (size_t r = 0; r < v.size(); ++r) {
        if (!v.is_null(r) && v.values[r] >= n.lo && v.values[r] <= n.hi) rows.push_back(r);
      }
      return gather(in, rows);
    }

    case OpKind::kProject: {
      RowBatch in = run(*n.children[0]);
      const size_t rows = in.row_count();
      RowBatch out;
      for (const auto& name : n.columns) {
        out.names.push_back(name);
        out.columns.push_back(in.columns.at(in.index_of(name)));
      }
      if (n.constant) {
        IntVector c;
        c.values.assign(rows, n.constant->second);
        out.names.push_back(n.constant->first);
        out.columns.push_back(std::move(c));
      }
      out.rowids = std::move(in.rowids);
      return out;
    }

    case OpKind::kHashAggregateDistinct:
    case OpKind::kGroupAggregate: {
      RowBatch in = run(*n.children[0]);
      const IntVector& v = in.columns.at(in.index_of(n.key));
      IntHashMap map(std::min<size_t>(v.size(), 1 << 20));
      IntVector keys;
      std::vector<int64_t> counts;
      int64_t nulls = 0;
      for (size_t r = 0; r < v.size(); ++r) {
        if (v.is_null(r)) {
          ++nulls;
          continue;
        }
        auto [slot, inserted] = map.insert(v.values[r]);
        if (inserted) {
          keys.push(v.values[r]);
          counts.push_back(0);
        }
        ++counts[slot];
      }
      if (nulls) {
        keys.push(std::nullopt);
        counts.push_back(nulls);
      }
      RowBatch out;
      out.names.push_back(n.key);
      out.columns.push_back(std::move(keys));
      if (n.kind == OpKind::kGroupAggregate) {
        out.names.push_back(n.count_name);
        IntVector c;
        c.values = std::move(counts);
        out.columns.push_back(std::move(c));
      }
      return out;
    }

    case OpKind::kSort: {
      RowBatch in = run(*n.children[0]);
      const IntVector& v = in.columns.at(in.index_of(n.key));
      std::vector<size_t> perm(v.size());
      if (v.valid.empty()) {
        // No NULLs: sort (key, position) pairs directly.
        std::vector<std::pair<int64_t, size_t>> keyed(v.size());
        for (size_t i = 0; i < v.size(); ++i) keyed[i] = {v.values[i], i};
        if (n.order == SortOrder::kAscending) {
          std::sort(keyed.begin(), keyed.end());
        } else {
          std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
          });
        }
        for (size_t i = 0; i < v.size(); ++i) perm[i] = keyed[i].second;
      } else {
        std::iota(perm.begin(), perm.end(), size_t{0});
        std::stable_sort(perm.begin(), perm.end(),
                         [&](size_t a, size_t b) { return key_before(v, a, b, n.order); });
      }
      return gather(in, perm);
    }

    case OpKind::kMergeSortedStreams: {
      std::vector<RowBatch> ins;
      for (const auto& c : n.children) ins.push_back(run(*c));
      std::vector<size_t> keycol;
      for (auto& b : ins) {
        if (b.names != ins[0].names) throw PlanError("merge inputs have different columns");
        keycol.push_back(b.index_of(n.key));
        check_sorted_input(b.columns[keycol.back()], n.order, "MergeSortedStreams");
      }
      RowBatch out = empty_like(ins[0], false);
      size_t total = 0;
      for (const auto& b : ins) total += b.row_count();
      using Cursor = std::pair<size_t, size_t>;  // input, row
      // True when `a` must be emitted after `b`; ties go to the earlier input.
      auto later = [&](const Cursor& a, const Cursor& b) {
        const IntVector& va = ins[a.first].columns[keycol[a.first]];
        const IntVector& vb = ins[b.first].columns[keycol[b.first]];
        const bool na = va.is_null(a.second);
        const bool nb = vb.is_null(b.second);
        if (na != nb) return n.order == SortOrder::kAscending ? nb : na;
        if (!na) {
          const int64_t x = va.values[a.second];
          const int64_t y = vb.values[b.second];
          if (x != y) return n.order == SortOrder::kAscending ? y < x : y > x;
        }
        return a.first > b.first;
      };
      // Emission order per input, then column-wise copies.
      std::vector<std::vector<size_t>> picks(ins.size());
      std::vector<uint32_t> source;
      source.reserve(total);
      auto emit = [&](size_t i, size_t r) {
        picks[i].push_back(r);
        source.push_back(static_cast<uint32_t>(i));
      };
      if (ins.size() == 2) {
        const size_t n0 = ins[0].row_count();
        const size_t n1 = ins[1].row_count();
        picks[0].reserve(n0);
        picks[1].reserve(n1);
        size_t a = 0;
        size_t b = 0;
        while (a < n0 && b < n1) {
          if (later({0, a}, {1, b})) {
            emit(1, b++);
          } else {
            emit(0, a++);
          }
        }
        while (a < n0) emit(0, a++);
        while (b < n1) emit(1, b++);
      } else {
        std::priority_queue<Cursor, std::vector<Cursor>, decltype(later)> heap(later);
        for (size_t i = 0; i < ins.size(); ++i) {
          if (ins[i].row_count()) heap.push({i, 0});
        }
        while (!heap.empty()) {
          auto [i, r] = heap.top();
          heap.pop();
          emit(i, r);
          if (r + 1 < ins[i].row_count()) heap.push({i, r + 1});
        }
      }
      for (size_t c = 0; c < out.columns.size(); ++c) {
        IntVector& dst = out.columns[c];
        std::vector<IntVector> parts(ins.size());
        for (size_t i = 0; i < ins.size(); ++i) gather_column(ins[i].columns[c], picks[i], parts[i]);
        bool nullable = false;
        for (const auto& part : parts) nullable = nullable || !part.valid.empty();
        dst.values.resize(total);
        if (nullable) dst.valid.resize(total);
        std::vector<size_t> pos(ins.size(), 0);
        for (size_t k = 0; k < total; ++k) {
          const uint32_t i = source[k];
          const size_t j = pos[i]++;
          dst.values[k] = parts[i].values[j];
          if (nullable) dst.valid[k] = parts[i].valid.empty() ? 1 : parts[i].valid[j];
        }
      }
      return out;
    }

    case OpKind::kUnion: {
      std::vector<RowBatch> ins;
      for (const auto& c : n.children) ins.push_back(run(*c));
      return concat(std::move(ins));
    }

    case OpKind::kHashJoin: {
      RowBatch left = run(*n.children[0]);
      RowBatch right = run(*n.children[1]);
      const IntVector& lk = left.columns.at(left.index_of(n.key));
      const IntVector& rk = right.columns.at(right.index_of(n.right_key));
      const bool build_left = n.build_side == 0;
      const IntVector& bk = build_left ? lk : rk;
      const IntVector& pk = build_left ? rk : lk;
      // Chained buckets: head per distinct key, next per build row.
      IntHashMap map(bk.size());
      std::vector<uint32_t> head;
      std::vector<uint32_t> next(bk.size(), IntHashMap::kEmpty);
      for (size_t r = bk.size(); r-- > 0;) {
        if (bk.is_null(r)) continue;
        auto [slot, inserted] = map.insert(bk.values[r]);
        if (inserted) head.push_back(IntHashMap::kEmpty);
        next[r] = head[slot];
        head[slot] = static_cast<uint32_t>(r);
      }
      std::vector<size_t> lrows;
      std::vector<size_t> rrows;
      for (size_t p = 0; p < pk.size(); ++p) {
        if (pk.is_null(p)) continue;
        const uint32_t slot = map.find(pk.values[p]);
        if (slot == IntHashMap::kEmpty) continue;
        for (uint32_t b = head[slot]; b != IntHashMap::kEmpty; b = next[b]) {
          lrows.push_back(build_left ? b : p);
          rrows.push_back(build_left ? p : b);
        }
      }
      return gather_pairs(left, lrows, right, rrows);
    }

    case OpKind::kMergeJoin: {
      RowBatch left = run(*n.children[0]);
      RowBatch right = run(*n.children[1]);
      const IntVector& lk = left.columns.at(left.index_of(n.key));
      const IntVector& rk = right.columns.at(right.index_of(n.right_key));
      check_sorted_input(lk, SortOrder::kAscending, "MergeJoin");
      check_sorted_input(rk, SortOrder::kAscending, "MergeJoin");
      std::vector<size_t> lrows;
      std::vector<size_t> rrows;
      lrows.reserve(lk.size());
      rrows.reserve(lk.size());
      size_t r = 0;
      for (size_t l = 0; l < lk.size(); ++l) {
        if (lk.is_null(l)) continue;
        const int64_t v = lk.values[l];
        while (r < rk.size() && (rk.is_null(r) || rk.values[r] < v)) ++r;
        // Several right rows may share a key.
        for (size_t q = r; q < rk.size() && !rk.is_null(q) && rk.values[q] == v; ++q) {
          lrows.push_back(l);
          rrows.push_back(q);
        }
      }
      return gather_pairs(left, lrows, right, rrows);
    }

    case OpKind::kReuseCache:
      return materialize(n.tag);

    case OpKind::kReuseLoad:
      return materialize(n.tag);
  }
  throw PlanError("unknown operator");
}

}  // namespace patchindex
