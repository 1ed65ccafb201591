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

#ifndef CPMA_PACKED_SET_HPP
#define CPMA_PACKED_SET_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include <oneapi/tbb/concurrent_vector.h>

#include "cpma/batch.hpp"
#include "cpma/common.hpp"
#include "cpma/layout.hpp"
#include "cpma/leaf_codec.hpp"
#include "cpma/parallel.hpp"
#include "cpma/work_counters.hpp"

namespace cpma
{
struct SizeStats {
  std::size_t elements = 0;
  std::size_t capacity = 0;  ///< slots
  std::size_t bytes = 0;     ///< backing array bytes
  double bytes_per_element = 0.0;
};

/**
 * A packed memory array over one contiguous slot array, generic over the leaf codec.
 *
 * `PackedSet<UncompressedLeaf>` is the PMA (density counts cells) and
 * `PackedSet<CompressedLeaf>` is the CPMA (density counts filled bytes). Keys are in
 * [1, 2^64 - 1]; the structure has set semantics.
 *
 * Thread safety: any number of concurrent readers, or one writer. Writers parallelize
 * internally; results are identical for every worker count.
 */
template <class Codec>
class PackedSet
{
 public:
  using codec_type = Codec;
  using slot_type = typename Codec::slot_type;

  static LayoutConfig default_config()
  {
    LayoutConfig config;
    config.min_leaf = Codec::default_min_leaf;
    return config;
  }

  explicit PackedSet(LayoutConfig config = default_config(), BatchPolicy policy = {})
      : config_{config}, policy_{policy}, layout_{Layout::for_capacity(0, config)}
  {
    if (config.min_leaf < Codec::granule) {
      throw ConfigError("min_leaf too small for this leaf codec");
    }
    slots_.assign(layout_.capacity(), slot_type{0});
  }

  /// Restores a structure from a raw slot array (see snapshot.hpp). Leaves are decoded with
  /// full validation; throws CorruptionError on malformed data.
  static PackedSet restore(const Layout &layout, std::vector<slot_type> slots, BatchPolicy policy = {});

  // ---- point operations -------------------------------------------------------------------

  /// Inserts `x`; returns false if it was already present. Throws DomainError for x == 0.
  bool insert(Key x);
  /// Removes `x`; returns false if it was absent.
  bool erase(Key x);
  [[nodiscard]] bool contains(Key x) const
  {
    const auto s = search(x);
    return s && *s == x;
  }
  /// Smallest element >= x.
  [[nodiscard]] std::optional<Key> search(Key x) const;

  /// Applies f to every element in [start, end) in ascending order.
  template <class F>
  void range_map(Key start, Key end, F &&f) const
  {
    if (start >= end || size_ == 0) {
      return;
    }
    const std::size_t first = find_leaf(std::max<Key>(start, 1), 0, layout_.num_leaves());
    for (std::size_t l = first; l < layout_.num_leaves(); ++l) {
      if (Codec::scan(leaf(l), start, end, f)) {
        return;
      }
    }
  }

  /// Sum (mod 2^64) of the elements in [start, end).
  [[nodiscard]] std::uint64_t range_sum(Key start, Key end) const
  {
    std::uint64_t sum = 0;
    range_map(start, end, [&sum](Key k) { sum += k; });
    return sum;
  }

  /// Applies f to every element in ascending order.
  template <class F>
  void for_each(F &&f) const
  {
    for (std::size_t l = 0; l < layout_.num_leaves(); ++l) {
      Codec::for_each(leaf(l), f);
    }
  }

  /// Sum of all elements, computed with a parallel scan over the leaves.
  [[nodiscard]] std::uint64_t parallel_sum() const;

  [[nodiscard]] std::vector<Key> to_vector() const;

  // ---- batch operations -------------------------------------------------------------------

  /// Inserts every key of the batch. Small batches use point inserts, batches with
  /// k >= rebuild_fraction * n rebuild by merging, the rest run merge/count/redistribute.
  void batch_insert(const Batch &batch);
  void batch_erase(const Batch &batch);
  void batch_insert(std::vector<Key> raw) { batch_insert(Batch::sort_dedupe(std::move(raw))); }
  void batch_erase(std::vector<Key> raw) { batch_erase(Batch::sort_dedupe(std::move(raw))); }

  /// Phase 1: merges the batch into destination leaves, spilling to overflow buffers.
  MergeResult merge_phase(const Batch &batch, UpdateKind kind);
  /// Phase 2: bottom-up, level-synchronous counting; finds the regions to redistribute.
  CountingResult counting_phase(const MergeResult &merged, UpdateKind kind);
  /// Phase 3: redistributes every target in parallel (or resizes) and drains overflow buffers.
  void redistribute_phase(MergeResult &merged, const CountingResult &counted, UpdateKind kind);

  /// Evenly respreads the region of `node`. Returns false (and changes nothing) when some
  /// leaf of the region cannot hold its share.
  bool redistribute(NodeId node);

  // ---- inspection -------------------------------------------------------------------------

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] bool empty() const { return size_ == 0; }
  [[nodiscard]] const Layout &layout() const { return layout_; }
  [[nodiscard]] std::size_t capacity() const { return layout_.capacity(); }
  [[nodiscard]] std::span<const slot_type> slots() const { return slots_; }
  [[nodiscard]] std::span<const slot_type> leaf(std::size_t l) const
  {
    return std::span<const slot_type>(slots_).subspan(l * layout_.leaf_size(), layout_.leaf_size());
  }
  /// Occupied slots of leaf `l`.
  [[nodiscard]] std::size_t leaf_used(std::size_t l) const { return Codec::used(leaf(l)); }
  /// Largest per-leaf occupancy a redistribution may produce.
  [[nodiscard]] std::size_t leaf_limit() const { return leaf_limit(layout_); }
  [[nodiscard]] SizeStats size_stats() const;
  /// FNV-1a over the raw slot array; equal checksums mean bit-identical layouts.
  [[nodiscard]] std::uint64_t checksum() const;
  /// Number of grow/shrink operations performed so far.
  [[nodiscard]] std::size_t resize_count() const { return resizes_; }

  [[nodiscard]] const BatchPolicy &policy() const { return policy_; }
  void set_policy(const BatchPolicy &policy) { policy_ = policy; }
  void set_counters(WorkCounters *counters) { counters_ = counters; }

 private:
  struct SpreadPlan {
    std::vector<std::size_t> cuts;  // num_leaves + 1 element offsets
    std::size_t total = 0;          // occupied slots after the spread
    std::size_t max_leaf = 0;
  };

  std::span<slot_type> leaf_mut(std::size_t l)
  {
    return std::span<slot_type>(slots_).subspan(l * layout_.leaf_size(), layout_.leaf_size());
  }
  [[nodiscard]] Key head(std::size_t l) const { return Codec::head(leaf(l)); }

  static std::size_t leaf_limit(const Layout &layout)
  {
    const auto bound = static_cast<std::size_t>(layout.upper_bound(0) * static_cast<double>(layout.leaf_size()));
    return std::min(layout.leaf_size(), bound + Codec::granule);
  }

  std::size_t find_leaf(Key x, std::size_t lo, std::size_t hi) const;
  std::size_t next_nonempty(std::size_t l, std::size_t hi) const;

  void merge_leaf(std::size_t l, std::span<const Key> keys, UpdateKind kind,
                  tbb::concurrent_vector<OverflowBuffer> &spill, tbb::concurrent_vector<std::pair<std::size_t, std::size_t>> &touched);
  void merge_recursive(std::span<const Key> keys, std::size_t leaf_lo, std::size_t leaf_hi, UpdateKind kind,
                       tbb::concurrent_vector<OverflowBuffer> &spill,
                       tbb::concurrent_vector<std::pair<std::size_t, std::size_t>> &touched);

  using LevelCache = std::vector<std::pair<std::uint64_t, std::size_t>>;
  std::size_t count_leaf(std::size_t l, std::span<const OverflowBuffer> overflows) const;
  std::size_t count_subtree(NodeId node, const std::vector<LevelCache> &cache, std::span<const OverflowBuffer> overflows) const;
  std::size_t count_region(NodeId node, std::span<const OverflowBuffer> overflows, std::span<const unsigned char> consumed) const;

  void gather(std::size_t first, std::size_t last, std::span<const OverflowBuffer> overflows,
              std::span<const unsigned char> consumed, std::vector<Key> &out) const;
  std::vector<Key> gather_all(std::span<const OverflowBuffer> overflows) const;
  bool redistribute_region(NodeId node, std::span<const OverflowBuffer> overflows, std::span<unsigned char> consumed);

  SpreadPlan plan_spread(std::span<const Key> keys, std::size_t num_leaves) const;
  void write_spread(std::span<const Key> keys, const SpreadPlan &plan, slot_type *dest, std::size_t leaf_size,
                    std::size_t num_leaves);
  void install(const Layout &layout, std::span<const Key> keys, const SpreadPlan &plan);

  void rebuild(std::span<const Key> keys);
  void grow(std::span<const Key> keys);
  void shrink(std::span<const Key> keys);
  void resolve(MergeResult &merged, UpdateKind kind);

  LayoutConfig config_;
  BatchPolicy policy_;
  Layout layout_;
  std::vector<slot_type> slots_;
  std::size_t size_ = 0;
  std::size_t resizes_ = 0;
  WorkCounters *counters_ = nullptr;
};

using Pma = PackedSet<UncompressedLeaf>;
using Cpma = PackedSet<CompressedLeaf>;

extern template class PackedSet<UncompressedLeaf>;
extern template class PackedSet<CompressedLeaf>;

}  // namespace cpma

#endif  // CPMA_PACKED_SET_HPP
