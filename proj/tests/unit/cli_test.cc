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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace patchindex {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("patchindex_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const char* name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"generate", "--constraint", "bogus"}).code, kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_EQ(cli({"index", "stats", "--index", path("missing.pxi")}).code, kExitUsage);
}

TEST_F(Cli, GenerateIsDeterministic) {
  for (const char* name : {"a.tbl", "b.tbl"}) {
    const auto r = cli({"--seed", "7", "generate", "--rows", "5000", "--exception-rate", "0.1",
                        "--out", path(name)});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  EXPECT_EQ(slurp(path("a.tbl")), slurp(path("b.tbl")));
}

TEST_F(Cli, IndexAndQueries) {
  ASSERT_EQ(cli({"generate", "--constraint", "nsc", "--rows", "20000", "--exception-rate", "0.05",
                 "--value-domain", "1000", "--dimension-rows", "1000", "--dim-out", path("d.tbl"),
                 "--out", path("f.tbl")})
                .code,
            kExitOk);
  auto r = cli({"index", "create", "--table", path("f.tbl"), "--column", "value", "--constraint",
                "nsc-asc", "--out", path("f.pxi")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  r = cli({"index", "stats", "--index", path("f.pxi"), "--table", path("f.tbl")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("constraint holds"), std::string::npos);
  for (const char* q : {"sort", "join"}) {
    r = cli({"query", q, "--table", path("f.tbl"), "--index", path("f.pxi"), "--dim", path("d.tbl"),
             "--plan", "patchindex", "--verify", "--explain"});
    EXPECT_EQ(r.code, kExitOk) << q << r.err;
    EXPECT_NE(r.out.find("verified against naive plan"), std::string::npos) << r.out;
  }
}

TEST_F(Cli, VerifyMismatchExitsOne) {
  ASSERT_EQ(cli({"generate", "--rows", "2000", "--out", path("clean.tbl")}).code, kExitOk);
  ASSERT_EQ(cli({"generate", "--rows", "2000", "--exception-rate", "0.5", "--out", path("dirty.tbl")}).code,
            kExitOk);
  ASSERT_EQ(cli({"index", "create", "--table", path("clean.tbl"), "--column", "value", "--constraint",
                 "nuc", "--out", path("clean.pxi")})
                .code,
            kExitOk);
  const auto r = cli({"query", "distinct", "--table", path("dirty.tbl"), "--index", path("clean.pxi"),
                      "--plan", "patchindex", "--verify"});
  EXPECT_EQ(r.code, kExitVerifyFailed) << r.out << r.err;
  EXPECT_EQ(cli({"index", "stats", "--index", path("clean.pxi"), "--table", path("dirty.tbl")}).code,
            kExitVerifyFailed);
}

TEST_F(Cli, UpdateAndBench) {
  ASSERT_EQ(cli({"generate", "--rows", "5000", "--exception-rate", "0.1", "--out", path("t.tbl")}).code,
            kExitOk);
  for (const char* op : {"insert", "modify", "delete"}) {
    const auto r = cli({"update", op, "--table", path("t.tbl"), "--count", "50", "--granularity", "10",
                        "--verify"});
    EXPECT_EQ(r.code, kExitOk) << op << r.err;
  }
  const auto csv = path("sweep.csv");
  auto r = cli({"--csv-out", csv, "bench", "shard-sweep", "--bits", "50000", "--deletes", "500",
                "--min-log2", "8", "--max-log2", "10", "--reps", "1"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(slurp(csv).rfind("experiment,", 0), 0u);
  r = cli({"--format", "csv", "bench", "query", "--query", "sort", "--rows", "5000",
           "--exception-rates", "0,0.2", "--reps", "1"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("sort;e=20%"), std::string::npos) << r.out;
  r = cli({"bench", "update", "--rows", "5000", "--count", "100", "--granularities", "10,100"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
}

}  // namespace
}  // namespace patchindex
