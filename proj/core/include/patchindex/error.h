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

#include <stdexcept>
#include <string>

namespace patchindex {

// Invalid construction parameters (shard size, generator spec, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Position or rowID outside the addressable range.
class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Caller broke an input contract, e.g. unsorted or duplicate delete positions.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed plan, unknown column, index/table mismatch.
class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Table file could not be read or written.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace patchindex
