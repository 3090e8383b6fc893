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

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace patchindex {

// Fixed-size pool that runs batches of independent work units. The calling
// thread participates, so a pool of size 1 owns no threads and runs inline.
class WorkerPool {
 public:
  // 0 selects std::thread::hardware_concurrency().
  explicit WorkerPool(size_t threads = 0);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  size_t size() const { return workers_.size() + 1; }

  // Calls fn(i) for every i in [0, units) and returns once all have finished.
  // The first exception thrown by a unit is rethrown here.
  void run(size_t units, const std::function<void(size_t)>& fn);

  // Process-wide pool sized to hardware parallelism.
  static WorkerPool& shared();

 private:
  void worker_loop();
  void drain(const std::function<void(size_t)>& fn, size_t generation);

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(size_t)>* job_ = nullptr;
  size_t units_ = 0;
  size_t next_ = 0;
  size_t finished_ = 0;
  size_t generation_ = 0;
  std::exception_ptr error_;
  bool stop_ = false;
};

}  // namespace patchindex
