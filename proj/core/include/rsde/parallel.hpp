// Copyright 2026 The rsde Authors
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
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rsde {

// Work is always split into chunks of this many items, independent of the
// number of threads, so chunked reductions have a fixed topology.
inline constexpr std::size_t kChunkSize = 2048;

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

// Fixed-size worker pool. `for_chunks` blocks until every chunk is done.
// Results never depend on the thread count; only wall time does.
class ThreadPool {
 public:
  explicit ThreadPool(int threads = 1);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int threads() const { return static_cast<int>(workers_.size()) + 1; }

  // Calls fn(chunk, begin, end) for each kChunkSize-sized slice of [0, n).
  void for_chunks(std::size_t n,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

 private:
  void worker_loop();
  void drain();

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable work_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t, std::size_t, std::size_t)>* job_ = nullptr;
  std::size_t job_n_ = 0;
  std::size_t next_chunk_ = 0;
  std::size_t total_chunks_ = 0;
  std::size_t finished_chunks_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

// Sum of values[i] computed as per-chunk partials combined in chunk order.
double deterministic_sum(const std::vector<double>& values);

}  // namespace rsde
