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

#include "patchindex/workload_report.h"

#include <istream>
#include <ostream>

#include "patchindex/error.h"

namespace patchindex {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw FormatError("unterminated quote in CSV line");
  return fields;
}

uint64_t parse_u64(const std::string& s) {
  size_t used = 0;
  uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw FormatError("bad integer in CSV: " + s);
  }
  if (used != s.size()) throw FormatError("bad integer in CSV: " + s);
  return v;
}

}  // namespace

const std::string& csv_header() {
  static const std::string header =
      "experiment,param,variant,runtime_ns,rows,patches,memory_bytes,blocks_scanned";
  return header;
}

std::string to_csv_row(const WorkloadReport& r) {
  return quote(r.experiment) + "," + quote(r.param) + "," + quote(r.variant) + "," +
         std::to_string(r.runtime_ns) + "," + std::to_string(r.rows) + "," +
         std::to_string(r.patches) + "," + std::to_string(r.memory_bytes) + "," +
         std::to_string(r.blocks_scanned);
}

void write_csv(std::ostream& out, const std::vector<WorkloadReport>& reports, bool header) {
  if (header) out << csv_header() << "\n";
  for (const auto& r : reports) out << to_csv_row(r) << "\n";
}

std::vector<WorkloadReport> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw FormatError("missing CSV header");
  std::vector<WorkloadReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 8) throw FormatError("CSV row needs 8 fields");
    out.push_back({f[0], f[1], f[2], parse_u64(f[3]), parse_u64(f[4]), parse_u64(f[5]),
                   parse_u64(f[6]), parse_u64(f[7])});
  }
  return out;
}

}  // namespace patchindex
