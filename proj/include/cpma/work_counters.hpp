/*
 * Copyright 2026 The CPMA Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CPMA_WORK_COUNTERS_HPP
#define CPMA_WORK_COUNTERS_HPP

#include <atomic>
#include <cstdint>
#include <mutex>
#include <unordered_set>

#include "cpma/layout.hpp"

namespace cpma
{
/**
 * Instrumentation for the batch algorithms. A set only updates counters while one is attached
 * (PackedSet::set_counters), so benchmarks pay a single null check.
 */
class WorkCounters
{
 public:
  struct Snapshot {
    std::uint64_t nodes_counted = 0;
    std::uint64_t cells_counted = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t recounts = 0;
    std::uint64_t elements_moved = 0;
    std::uint64_t searches_performed = 0;
  };

  void reset()
  {
    nodes_counted_ = 0;
    cells_counted_ = 0;
    cache_hits_ = 0;
    recounts_ = 0;
    elements_moved_ = 0;
    searches_performed_ = 0;
    begin_counting_phase();
  }

  /// Forget which nodes were counted; called at the start of every counting phase.
  void begin_counting_phase()
  {
    std::lock_guard lock(mutex_);
    counted_.clear();
  }

  /// Records that `node` had its occupancy computed; a second call in one phase is a recount.
  void node_counted(NodeId node, std::uint64_t cells)
  {
    nodes_counted_.fetch_add(1, std::memory_order_relaxed);
    cells_counted_.fetch_add(cells, std::memory_order_relaxed);
    std::lock_guard lock(mutex_);
    if (!counted_.insert((std::uint64_t{node.level} << 58) | node.index).second) {
      recounts_.fetch_add(1, std::memory_order_relaxed);
    }
  }

  void cache_hit() { cache_hits_.fetch_add(1, std::memory_order_relaxed); }
  void moved(std::uint64_t n) { elements_moved_.fetch_add(n, std::memory_order_relaxed); }
  void searched() { searches_performed_.fetch_add(1, std::memory_order_relaxed); }

  [[nodiscard]] Snapshot snapshot() const
  {
    return Snapshot{nodes_counted_.load(), cells_counted_.load(),  cache_hits_.load(),
                    recounts_.load(),      elements_moved_.load(), searches_performed_.load()};
  }

 private:
  std::atomic<std::uint64_t> nodes_counted_{0};
  std::atomic<std::uint64_t> cells_counted_{0};
  std::atomic<std::uint64_t> cache_hits_{0};
  std::atomic<std::uint64_t> recounts_{0};
  std::atomic<std::uint64_t> elements_moved_{0};
  std::atomic<std::uint64_t> searches_performed_{0};
  std::mutex mutex_;
  std::unordered_set<std::uint64_t> counted_;
};

}  // namespace cpma

#endif  // CPMA_WORK_COUNTERS_HPP
