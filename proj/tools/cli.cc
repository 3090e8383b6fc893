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

#include "cli.h"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "patchindex/bench.h"
#include "patchindex/datagen.h"
#include "patchindex/error.h"
#include "patchindex/executor.h"
#include "patchindex/rewrite.h"
#include "patchindex/table_file.h"
#include "patchindex/update_pipeline.h"
#include "patchindex/worker_pool.h"

namespace patchindex {

namespace {

struct VerifyFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  uint64_t seed = 42;
  size_t threads = 0;
  std::string csv_out;
  std::string format = "text";
};

Constraint parse_constraint(const std::string& s) {
  if (s == "nuc") return Constraint::nearly_unique();
  if (s == "nsc" || s == "nsc-asc") return Constraint::nearly_sorted(SortOrder::kAscending);
  if (s == "nsc-desc") return Constraint::nearly_sorted(SortOrder::kDescending);
  throw ConfigError("unknown constraint '" + s + "' (nuc, nsc-asc, nsc-desc)");
}

StoreKind parse_store(const std::string& s) {
  if (s == "bitmap") return StoreKind::kBitmap;
  if (s == "identifiers") return StoreKind::kIdentifiers;
  throw ConfigError("unknown store '" + s + "' (bitmap, identifiers)");
}

std::string index_summary(const PatchIndex& index) {
  std::ostringstream s;
  s << "column=" << index.column() << " constraint=" << to_string(index.constraint())
    << " store=" << to_string(index.store_kind()) << " rows=" << index.row_count()
    << " patches=" << index.patch_count() << " exception_rate=" << index.exception_rate()
    << " memory_bytes=" << index.memory_bytes();
  if (index.tail_row()) {
    s << " tail_row=" << *index.tail_row() << " tail_value=" << *index.last_sorted_value();
  }
  return s.str();
}

void emit_reports(const Globals& g, const std::vector<WorkloadReport>& reports,
                  std::ostream& out) {
  if (!g.csv_out.empty()) {
    std::ofstream f(g.csv_out, std::ios::trunc);
    if (!f) throw FormatError("cannot open " + g.csv_out + " for writing");
    write_csv(f, reports);
  }
  if (g.format == "csv") {
    write_csv(out, reports);
    return;
  }
  for (const auto& r : reports) {
    out << r.experiment << " " << r.param << " " << r.variant << " runtime_ns=" << r.runtime_ns
        << " rows=" << r.rows << " patches=" << r.patches << " memory_bytes=" << r.memory_bytes
        << " blocks_scanned=" << r.blocks_scanned << "\n";
  }
}

PatchIndex load_or_discover(const ColumnTable& table, const std::string& index_path,
                            const std::string& column, const Constraint& constraint,
                            WorkerPool* pool) {
  if (!index_path.empty()) {
    PatchIndex index = IndexFile::load(index_path, pool);
    if (!index.matches(table)) throw ConfigError("index does not match the table layout");
    return index;
  }
  IndexOptions options;
  options.pool = pool;
  return PatchIndex::discover(table, column, constraint, options);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate-constraint indexes over a small column store", "patchindex"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  app.add_option("--csv-out", g.csv_out, "Also write benchmark CSV to this path");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a dataset table file");
  gen->fallthrough();
  std::string gen_constraint = "nuc";
  GenSpec spec;
  std::string gen_out;
  uint64_t dim_rows = 0;
  std::string dim_out;
  gen->add_option("--constraint", gen_constraint, "nuc or nsc")
      ->check(CLI::IsMember({"nuc", "nsc"}))
      ->capture_default_str();
  gen->add_option("--rows", spec.rows, "Row count")->capture_default_str();
  gen->add_option("--exception-rate", spec.exception_rate, "Exception rate in [0, 1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen->add_option("--partitions", spec.partitions, "Partitions")->capture_default_str();
  gen->add_option("--duplicate-domain", spec.duplicate_domain, "NUC duplicate values")
      ->capture_default_str();
  gen->add_option("--value-domain", spec.value_domain, "NSC value domain (0 = rows)");
  gen->add_option("--block-size", spec.block_size, "Zone-map block size")->capture_default_str();
  gen->add_option("--out", gen_out, "Output table file")->required();
  gen->add_option("--dimension-rows", dim_rows, "Also write a dimension table of this size");
  gen->add_option("--dim-out", dim_out, "Dimension table output file");

  // index
  auto* idx = app.add_subcommand("index", "Create, inspect or rebuild a patch index");
  idx->require_subcommand(1);
  idx->fallthrough();
  std::string idx_table, idx_path, idx_out, idx_column = "value", idx_constraint = "nuc",
                                            idx_store = "bitmap";
  uint64_t idx_shard_bits = ShardedBitmap::kDefaultShardBits;
  auto* idx_create = idx->add_subcommand("create", "Discover an index over a table column");
  idx_create->fallthrough();
  idx_create->add_option("--table", idx_table, "Table file")->required();
  idx_create->add_option("--column", idx_column, "Indexed column")->capture_default_str();
  idx_create->add_option("--constraint", idx_constraint, "nuc, nsc-asc or nsc-desc")
      ->capture_default_str();
  idx_create->add_option("--store", idx_store, "bitmap or identifiers")->capture_default_str();
  idx_create->add_option("--shard-bits", idx_shard_bits, "Bitmap shard size")
      ->capture_default_str();
  idx_create->add_option("--out", idx_out, "Output index file")->required();
  auto* idx_stats = idx->add_subcommand("stats", "Print index statistics");
  idx_stats->fallthrough();
  idx_stats->add_option("--index", idx_path, "Index file")->required();
  idx_stats->add_option("--table", idx_table, "Check the constraint against this table");
  auto* idx_rebuild = idx->add_subcommand("rebuild", "Rediscover an index from its table");
  idx_rebuild->fallthrough();
  idx_rebuild->add_option("--table", idx_table, "Table file")->required();
  idx_rebuild->add_option("--index", idx_path, "Index file to rebuild")->required();
  idx_rebuild->add_option("--out", idx_out, "Output path (default: overwrite)");

  // query
  auto* query = app.add_subcommand("query", "Run a distinct, sort or join query");
  query->fallthrough();
  std::string q_kind, q_table, q_index, q_dim, q_plan = "auto", q_column = "value",
                                               q_dim_key = "key";
  bool q_explain = false, q_verify = false, q_zbp = false;
  query->add_option("kind", q_kind, "distinct, sort or join")
      ->required()
      ->check(CLI::IsMember({"distinct", "sort", "join"}));
  query->add_option("--table", q_table, "Table file")->required();
  query->add_option("--index", q_index, "Index file (discovered when absent)");
  query->add_option("--dim", q_dim, "Dimension table file (join)");
  query->add_option("--column", q_column, "Query column")->capture_default_str();
  query->add_option("--dim-key", q_dim_key, "Dimension join key")->capture_default_str();
  query->add_option("--plan", q_plan, "naive, patchindex or auto")
      ->check(CLI::IsMember({"naive", "patchindex", "auto"}))
      ->capture_default_str();
  query->add_flag("--zbp", q_zbp, "Apply zero-branch pruning to the rewritten plan");
  query->add_flag("--explain", q_explain, "Print the executed plan");
  query->add_flag("--verify", q_verify, "Compare the result with the naive plan");

  // update
  auto* update = app.add_subcommand("update", "Apply seeded updates in statement batches");
  update->fallthrough();
  std::string u_op, u_table, u_index, u_column = "value";
  uint64_t u_count = 1000, u_gran = 100;
  bool u_verify = false, u_save = false;
  update->add_option("op", u_op, "insert, modify or delete")
      ->required()
      ->check(CLI::IsMember({"insert", "modify", "delete"}));
  update->add_option("--table", u_table, "Table file")->required();
  update->add_option("--index", u_index, "Index file (discovered as NUC when absent)");
  update->add_option("--column", u_column, "Indexed column")->capture_default_str();
  update->add_option("--count", u_count, "Rows to change")->capture_default_str();
  update->add_option("--granularity", u_gran, "Rows per statement")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  update->add_flag("--verify", u_verify, "Check the constraint after every statement");
  update->add_flag("--save", u_save, "Write the table and index back");

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmarks with CSV output");
  bench->require_subcommand(1);
  bench->fallthrough();
  ShardSweepConfig sweep;
  auto* b_sweep = bench->add_subcommand("shard-sweep", "Bulk delete runtime per shard size");
  b_sweep->fallthrough();
  b_sweep->add_option("--bits", sweep.bits, "Bitmap size")->capture_default_str();
  b_sweep->add_option("--deletes", sweep.deletes, "Deleted positions")->capture_default_str();
  b_sweep->add_option("--min-log2", sweep.min_log2, "Smallest shard size exponent")
      ->capture_default_str();
  b_sweep->add_option("--max-log2", sweep.max_log2, "Largest shard size exponent")
      ->capture_default_str();
  b_sweep->add_option("--reps", sweep.repetitions, "Repetitions (median)")
      ->capture_default_str();

  QueryBenchConfig qb;
  std::string qb_kind = "distinct", qb_store = "bitmap";
  std::vector<double> qb_rates = {0.0, 0.01, 0.2, 0.5, 0.99};
  bool qb_explain = false;
  auto* b_query = bench->add_subcommand("query", "Naive vs rewritten query plans");
  b_query->fallthrough();
  b_query->add_option("--query", qb_kind, "distinct, sort or join")
      ->check(CLI::IsMember({"distinct", "sort", "join"}))
      ->capture_default_str();
  b_query->add_option("--rows", qb.rows, "Fact rows")->capture_default_str();
  b_query->add_option("--exception-rates", qb_rates, "Comma-separated exception rates")
      ->delimiter(',')
      ->capture_default_str();
  b_query->add_option("--dimension-rows", qb.dimension_rows, "Dimension rows (join)")
      ->capture_default_str();
  b_query->add_option("--partitions", qb.partitions, "Partitions")->capture_default_str();
  b_query->add_option("--store", qb_store, "bitmap or identifiers")->capture_default_str();
  b_query->add_option("--reps", qb.repetitions, "Repetitions (median)")->capture_default_str();
  b_query->add_flag("--explain", qb_explain, "Print both plans per exception rate");

  UpdateBenchConfig ub;
  std::string ub_op = "insert", ub_constraint = "nuc";
  auto* b_update = bench->add_subcommand("update", "Update handling per statement granularity");
  b_update->fallthrough();
  b_update->add_option("--op", ub_op, "insert, modify or delete")
      ->check(CLI::IsMember({"insert", "modify", "delete"}))
      ->capture_default_str();
  b_update->add_option("--constraint", ub_constraint, "nuc or nsc")
      ->check(CLI::IsMember({"nuc", "nsc"}))
      ->capture_default_str();
  b_update->add_option("--rows", ub.rows, "Table rows")->capture_default_str();
  b_update->add_option("--exception-rate", ub.exception_rate, "Exception rate")
      ->capture_default_str();
  b_update->add_option("--count", ub.count, "Rows changed per run")->capture_default_str();
  b_update->add_option("--granularities", ub.granularities, "Comma-separated statement sizes")
      ->delimiter(',')
      ->capture_default_str();
  b_update->add_option("--partitions", ub.partitions, "Partitions")->capture_default_str();
  b_update->add_option("--reps", ub.repetitions, "Repetitions (median)")->capture_default_str();

  std::vector<std::string> argv_store = {"patchindex"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::unique_ptr<WorkerPool> owned;
    WorkerPool* pool = &WorkerPool::shared();
    if (g.threads > 0) {
      owned = std::make_unique<WorkerPool>(g.threads);
      pool = owned.get();
    }

    if (*gen) {
      spec.constraint = gen_constraint == "nuc" ? ConstraintType::kNearlyUnique
                                                : ConstraintType::kNearlySorted;
      spec.seed = g.seed;
      const ColumnTable table = generate(spec);
      TableFile::save(table, gen_out);
      out << "wrote " << gen_out << " rows=" << table.row_count()
          << " exception_rows=" << exception_rows(spec) << "\n";
      if (dim_rows > 0) {
        if (dim_out.empty()) throw ConfigError("--dimension-rows needs --dim-out");
        TableFile::save(generate_dimension(dim_rows, spec.partitions, g.seed + 1, spec.block_size),
                        dim_out);
        out << "wrote " << dim_out << " rows=" << dim_rows << "\n";
      }
      return kExitOk;
    }

    if (*idx) {
      if (*idx_create) {
        const ColumnTable table = TableFile::load(idx_table);
        IndexOptions options;
        options.store = parse_store(idx_store);
        options.shard_bits = idx_shard_bits;
        options.pool = pool;
        const PatchIndex index =
            PatchIndex::discover(table, idx_column, parse_constraint(idx_constraint), options);
        IndexFile::save(index, idx_out);
        out << index_summary(index) << "\n";
        return kExitOk;
      }
      if (*idx_stats) {
        const PatchIndex index = IndexFile::load(idx_path, pool);
        out << index_summary(index) << "\n";
        if (!idx_table.empty()) {
          std::string why;
          if (!constraint_holds(TableFile::load(idx_table), index, &why)) {
            throw VerifyFailed("constraint check failed: " + why);
          }
          out << "constraint holds\n";
        }
        return kExitOk;
      }
      const ColumnTable table = TableFile::load(idx_table);
      const PatchIndex old = IndexFile::load(idx_path, pool);
      IndexOptions options = old.options();
      options.pool = pool;
      const PatchIndex index = PatchIndex::discover(table, old.column(), old.constraint(), options);
      IndexFile::save(index, idx_out.empty() ? idx_path : idx_out);
      out << index_summary(index) << "\n";
      return kExitOk;
    }

    if (*query) {
      const ColumnTable table = TableFile::load(q_table);
      const Constraint constraint = q_kind == "distinct"
                                        ? Constraint::nearly_unique()
                                        : Constraint::nearly_sorted(SortOrder::kAscending);
      const PatchIndex index = load_or_discover(table, q_index, q_column, constraint, pool);
      std::optional<ColumnTable> dim;
      PlanPtr naive;
      PlanPtr rewritten;
      if (q_kind == "distinct") {
        naive = plan::distinct(plan::scan(table, {q_column}), q_column);
        rewritten = rewrite_distinct(naive, index);
      } else if (q_kind == "sort") {
        naive = plan::sort(plan::scan(table, {"key", q_column}), q_column);
        rewritten = rewrite_sort(naive, index);
      } else {
        if (q_dim.empty()) throw ConfigError("join needs --dim");
        dim.emplace(TableFile::load(q_dim));
        std::vector<std::string> dim_cols;
        for (const auto& c : dim->schema().columns) {
          if (c.type == ColumnType::kInt64) dim_cols.push_back(c.name);
        }
        naive = plan::hash_join(plan::scan(table, {"key", q_column}), plan::scan(*dim, dim_cols),
                                q_column, q_dim_key, 1);
        rewritten = rewrite_join(naive, index);
      }
      if (rewritten && q_zbp) rewritten = zero_branch_prune(rewritten);
      PlanPtr chosen = naive;
      if (q_plan == "patchindex") {
        if (!rewritten) throw ConfigError("the rewrite does not apply to this table and index");
        chosen = rewritten;
      } else if (q_plan == "auto") {
        chosen = choose_plan(naive, rewritten, index);
      }
      if (q_explain) out << explain(chosen);
      Executor exec(pool);
      const auto start = std::chrono::steady_clock::now();
      const RowBatch result = exec.execute(chosen);
      const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      out << "query=" << q_kind << " plan=" << (chosen == naive ? "naive" : "patchindex")
          << " rows=" << result.row_count() << " checksum=" << batch_checksum(result)
          << " runtime_ns=" << ns << " patches=" << index.patch_count() << "\n";
      if (q_verify && chosen != naive) {
        const RowBatch expect = exec.execute(naive);
        bool same = expect.row_count() == result.row_count() &&
                    batch_checksum(expect) == batch_checksum(result);
        if (same && q_kind == "sort") {
          const IntVector& a = expect.columns[expect.index_of(q_column)];
          const IntVector& b = result.columns[result.index_of(q_column)];
          same = a.values == b.values && a.valid == b.valid;
        }
        if (!same) throw VerifyFailed("result differs from the naive plan");
        out << "verified against naive plan\n";
      } else if (q_verify) {
        out << "verified (naive plan executed)\n";
      }
      return kExitOk;
    }

    if (*update) {
      ColumnTable table = TableFile::load(u_table);
      PatchIndex index =
          load_or_discover(table, u_index, u_column, Constraint::nearly_unique(), pool);
      const size_t col = table.schema().index_of(index.column());
      std::mt19937_64 rng(g.seed);
      const uint64_t range = 2 * std::max<uint64_t>(table.row_count(), 1);
      PatchIndex* indexes[] = {&index};
      UpdateStats stats;
      uint64_t done = 0;
      const auto start = std::chrono::steady_clock::now();
      while (done < u_count) {
        const uint64_t n = std::min(u_gran, u_count - done);
        if (u_op == "insert") {
          std::vector<Row> rows;
          for (uint64_t i = 0; i < n; ++i) {
            Row row(table.schema().columns.size(), Value{int64_t{0}});
            row[col] = Value{static_cast<int64_t>(bounded_random(rng, range))};
            rows.push_back(std::move(row));
          }
          insert_statement(table, indexes, rows, &stats);
        } else {
          if (table.row_count() < n) throw ConfigError("not enough rows left");
          std::vector<uint64_t> ids = sample_positions(rng, table.row_count(), n);
          if (u_op == "modify") {
            std::vector<Value> values;
            for (uint64_t i = 0; i < n; ++i) {
              values.emplace_back(static_cast<int64_t>(bounded_random(rng, range)));
            }
            modify_statement(table, indexes, ids, col, values, &stats);
          } else {
            delete_statement(table, indexes, ids);
          }
        }
        done += n;
        std::string why;
        if (u_verify && !constraint_holds(table, index, &why)) {
          throw VerifyFailed("constraint violated after a statement: " + why);
        }
      }
      const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      out << "update=" << u_op << " count=" << u_count << " granularity=" << u_gran
          << " runtime_ns=" << ns << " blocks_scanned=" << stats.blocks_scanned << "\n"
          << index_summary(index) << "\n";
      if (u_save) {
        TableFile::save(table, u_table);
        if (!u_index.empty()) IndexFile::save(index, u_index);
      }
      return kExitOk;
    }

    if (*b_sweep) {
      sweep.seed = g.seed;
      sweep.pool = pool;
      emit_reports(g, bench_shard_sweep(sweep), out);
      return kExitOk;
    }
    if (*b_query) {
      qb.query = qb_kind == "distinct" ? QueryKind::kDistinct
                 : qb_kind == "sort"   ? QueryKind::kSort
                                       : QueryKind::kJoin;
      qb.store = parse_store(qb_store);
      qb.seed = g.seed;
      qb.pool = pool;
      std::vector<WorkloadReport> all;
      bool verified = true;
      for (double e : qb_rates) {
        qb.exception_rate = e;
        QueryBenchResult r = bench_query(qb);
        if (qb_explain) out << r.explain_naive << r.explain_rewritten;
        verified = verified && r.verified;
        all.insert(all.end(), r.reports.begin(), r.reports.end());
      }
      emit_reports(g, all, out);
      if (!verified) throw VerifyFailed("a rewritten plan disagreed with the naive plan");
      return kExitOk;
    }
    if (*b_update) {
      ub.op = ub_op == "insert"   ? UpdateOp::kInsert
              : ub_op == "modify" ? UpdateOp::kModify
                                  : UpdateOp::kDelete;
      ub.constraint =
          ub_constraint == "nuc" ? ConstraintType::kNearlyUnique : ConstraintType::kNearlySorted;
      ub.seed = g.seed;
      ub.pool = pool;
      UpdateBenchResult r = bench_update(ub);
      emit_reports(g, r.reports, out);
      if (!r.verified) throw VerifyFailed("constraint violated after an update run");
      return kExitOk;
    }
  } catch (const VerifyFailed& e) {
    err << "verification failed: " << e.what() << "\n";
    return kExitVerifyFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace patchindex
