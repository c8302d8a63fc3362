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

#include "rsde/parallel.hpp"

#include <algorithm>

namespace rsde {

ThreadPool::ThreadPool(int threads) {
  const int extra = std::max(threads, 1) - 1;
  workers_.reserve(extra);
  for (int i = 0; i < extra; ++i) workers_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  work_cv_.notify_all();
  for (auto& w : workers_) w.join();
}

void ThreadPool::drain() {
  while (true) {
    std::size_t chunk;
    {
      std::lock_guard lock(mutex_);
      if (job_ == nullptr || next_chunk_ >= total_chunks_) return;
      chunk = next_chunk_++;
    }
    const std::size_t begin = chunk * kChunkSize;
    const std::size_t end = std::min(job_n_, begin + kChunkSize);
    try {
      (*job_)(chunk, begin, end);
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      if (++finished_chunks_ == total_chunks_) done_cv_.notify_all();
    }
  }
}

void ThreadPool::worker_loop() {
  std::size_t seen = 0;
  while (true) {
    {
      std::unique_lock lock(mutex_);
      work_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
    }
    drain();
  }
}

void ThreadPool::for_chunks(
    std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t chunks = chunk_count(n);
  if (chunks == 0) return;
  if (workers_.empty() || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c)
      fn(c, c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
    return;
  }
  {
    std::lock_guard lock(mutex_);
    job_ = &fn;
    job_n_ = n;
    next_chunk_ = 0;
    total_chunks_ = chunks;
    finished_chunks_ = 0;
    error_ = nullptr;
    ++generation_;
  }
  work_cv_.notify_all();
  drain();
  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [&] { return finished_chunks_ == total_chunks_; });
  job_ = nullptr;
  if (error_) {
    auto err = error_;
    error_ = nullptr;
    lock.unlock();
    std::rethrow_exception(err);
  }
}

double deterministic_sum(const std::vector<double>& values) {
  double total = 0.0;
  for (std::size_t c = 0; c < chunk_count(values.size()); ++c) {
    double partial = 0.0;
    const std::size_t end = std::min(values.size(), (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) partial += values[i];
    total += partial;
  }
  return total;
}

}  // namespace rsde
