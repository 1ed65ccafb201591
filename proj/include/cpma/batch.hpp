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

#ifndef CPMA_BATCH_HPP
#define CPMA_BATCH_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cpma/common.hpp"
#include "cpma/layout.hpp"

namespace cpma
{
/// A strictly increasing, zero-free key sequence ready for batch_insert / batch_erase.
class Batch
{
 public:
  Batch() = default;

  /// Sorts (in parallel) and removes duplicates. Throws DomainError on a zero key.
  static Batch sort_dedupe(std::vector<Key> raw);

  /// Adopts keys the caller already sorted; throws DomainError if they are not strictly increasing.
  static Batch from_sorted(std::vector<Key> sorted);

  [[nodiscard]] std::span<const Key> keys() const { return keys_; }
  [[nodiscard]] std::size_t size() const { return keys_.size(); }
  [[nodiscard]] bool empty() const { return keys_.empty(); }

 private:
  explicit Batch(std::vector<Key> keys) : keys_(std::move(keys)) {}

  std::vector<Key> keys_;
};

inline Batch sort_dedupe(std::vector<Key> raw) { return Batch::sort_dedupe(std::move(raw)); }

/// Strategy cutoffs for batch updates.
struct BatchPolicy {
  /// Batches smaller than this are applied as point updates.
  std::size_t point_threshold = 100;
  /// Batches with k >= rebuild_fraction * n rebuild the whole structure by merging.
  double rebuild_fraction = 0.5;
  /// Per-leaf merges of at least this many batch elements use the parallel merge.
  std::size_t parallel_merge_threshold = 1024;
};

enum class UpdateKind { insert, erase };

/// A leaf whose merged content no longer fits in place; held out of the array until redistribution.
struct OverflowBuffer {
  std::size_t leaf = 0;
  std::vector<Key> elements;
  /// Slots the elements would occupy in place (always > leaf_size).
  std::size_t logical_size = 0;
};

/// Output of the batch-merge phase.
struct MergeResult {
  /// Sorted ids of every leaf whose content changed.
  std::vector<std::size_t> modified_leaves;
  /// Sorted by leaf.
  std::vector<OverflowBuffer> overflows;
  /// Elements added (insert) or removed (erase).
  std::size_t changed = 0;
};

/// Output of the counting phase.
struct CountingResult {
  /// Pairwise disjoint nodes to redistribute, ordered by region start.
  std::vector<NodeId> targets;
  /// The root violated its bound; the structure must grow (insert) or shrink (erase).
  bool resize = false;
  /// Occupancy of every node counted while walking up, per level, sorted by index.
  std::vector<std::vector<std::pair<std::uint64_t, std::size_t>>> counted;
};

}  // namespace cpma

#endif  // CPMA_BATCH_HPP
