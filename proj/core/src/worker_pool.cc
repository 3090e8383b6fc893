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

#include "patchindex/worker_pool.h"

#include <algorithm>
#include <exception>

namespace patchindex {

WorkerPool::WorkerPool(size_t threads) {
  if (threads == 0) threads = std::max<size_t>(1, std::thread::hardware_concurrency());
  workers_.reserve(threads - 1);
  for (size_t i = 1; i < threads; ++i) {
    workers_.emplace_back([this] { worker_loop(); });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : workers_) t.join();
}

WorkerPool& WorkerPool::shared() {
  static WorkerPool pool;
  return pool;
}

void WorkerPool::drain(const std::function<void(size_t)>& fn,
                       size_t generation) {
  std::unique_lock<std::mutex> lock(mu_);
  while (generation_ == generation && next_ < units_) {
    const size_t unit = next_++;
    lock.unlock();
    try {
      fn(unit);
    } catch (...) {
      lock.lock();
      if (!error_) error_ = std::current_exception();
      ++finished_;
      continue;
    }
    lock.lock();
    ++finished_;
  }
  if (generation_ == generation && finished_ == units_) done_.notify_all();
}

void WorkerPool::run(size_t units, const std::function<void(size_t)>& fn) {
  if (units == 0) return;
  if (workers_.empty() || units == 1) {
    for (size_t i = 0; i < units; ++i) fn(i);
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    job_ = &fn;
    units_ = units;
    next_ = 0;
    finished_ = 0;
    error_ = nullptr;
    ++generation_;
  }
  size_t generation;
  {
    std::lock_guard<std::mutex> lock(mu_);
    generation = generation_;
  }
  wake_.notify_all();
  drain(fn, generation);
  std::unique_lock<std::mutex> lock(mu_);
  done_.wait(lock, [this] { return finished_ == units_; });
  job_ = nullptr;
  if (error_) std::rethrow_exception(error_);
}

void WorkerPool::worker_loop() {
  size_t seen = 0;
  for (;;) {
    const std::function<void(size_t)>* job = nullptr;
    size_t generation;
    {
      std::unique_lock<std::mutex> lock(mu_);
      wake_.wait(lock, [&] { return stop_ || (generation_ != seen && job_); });
      if (stop_) return;
      seen = generation_;
      generation = generation_;
      job = job_;
    }
    drain(*job, generation);
  }
}

}  // namespace patchindex
