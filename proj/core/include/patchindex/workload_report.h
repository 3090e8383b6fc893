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

// One benchmark measurement and its CSV form.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace patchindex {

struct WorkloadReport {
  std::string experiment;
  std::string param;
  std::string variant;
  uint64_t runtime_ns = 0;
  uint64_t rows = 0;
  uint64_t patches = 0;
  uint64_t memory_bytes = 0;
  uint64_t blocks_scanned = 0;

  friend bool operator==(const WorkloadReport&, const WorkloadReport&) = default;
};

// "experiment,param,variant,runtime_ns,rows,patches,memory_bytes,blocks_scanned"
const std::string& csv_header();
std::string to_csv_row(const WorkloadReport& report);
void write_csv(std::ostream& out, const std::vector<WorkloadReport>& reports,
               bool header = true);
// Parses output of write_csv (with header). Throws FormatError.
std::vector<WorkloadReport> read_csv(std::istream& in);

}  // namespace patchindex
