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

#include "cpma/packed_set.hpp"

#include <numeric>
#include <string>

namespace cpma
{
namespace
{
// Below this many batch keys the merge recursion runs serially.
constexpr std::size_t kSerialMergeCutoff = 256;
// Case-2 subtree counts below this level recurse serially.
constexpr std::uint32_t kSerialCountLevel = 6;

/// Smallest index i <= mid with keys[i] >= bound, galloping backwards. Pre: keys[mid] >= bound.
std::size_t gallop_back(std::span<const Key> keys, std::size_t mid, Key bound)
{
  std::size_t right = mid;
  std::size_t step = 1;
  std::size_t left = 0;
  while (step <= right) {
    if (keys[right - step] < bound) {
      left = right - step + 1;
      break;
    }
    right -= step;
    step <<= 1;
  }
  return static_cast<std::size_t>(std::lower_bound(keys.begin() + left, keys.begin() + right, bound) - keys.begin());
}

/// Smallest index i > mid with keys[i] >= bound, or keys.size(). Pre: keys[mid] < bound.
std::size_t gallop_forward(std::span<const Key> keys, std::size_t mid, Key bound)
{
  std::size_t left = mid + 1;
  std::size_t step = 1;
  const std::size_t n = keys.size();
  while (true) {
    const std::size_t probe = left + step - 1;
    if (probe >= n) {
      return static_cast<std::size_t>(std::lower_bound(keys.begin() + left, keys.end(), bound) - keys.begin());
    }
    if (keys[probe] >= bound) {
      return static_cast<std::size_t>(std::lower_bound(keys.begin() + left, keys.begin() + probe, bound) -
                                      keys.begin());
    }
    left = probe + 1;
    step <<= 1;
  }
}

const OverflowBuffer *find_overflow(std::span<const OverflowBuffer> overflows, std::size_t leaf)
{
  const auto it = std::lower_bound(overflows.begin(), overflows.end(), leaf,
                                   [](const OverflowBuffer &b, std::size_t l) { return b.leaf < l; });
  return it != overflows.end() && it->leaf == leaf ? &*it : nullptr;
}


}  // namespace

template <class Codec>
PackedSet<Codec> PackedSet<Codec>::restore(const Layout &layout, std::vector<slot_type> slots, BatchPolicy policy)
{
  if (slots.size() != layout.capacity()) {
    throw CorruptionError("slot array size does not match the layout");
  }
  PackedSet set(layout.config(), policy);
  set.layout_ = layout;
  set.slots_ = std::move(slots);
  Key prev = 0;
  for (std::size_t l = 0; l < layout.num_leaves(); ++l) {
    const auto keys = codec::leaf_decode(set.leaf(l));
    if (!keys.empty() && keys.front() <= prev) {
      throw CorruptionError("leaves out of order at leaf " + std::to_string(l));
    }
    if (!keys.empty()) {
      prev = keys.back();
    }
    set.size_ += keys.size();
  }
  return set;
}

// ---- search -----------------------------------------------------------------------------------

template <class Codec>
std::size_t PackedSet<Codec>::find_leaf(Key x, std::size_t lo, std::size_t hi) const
{
  // last nonempty leaf in [lo, hi) whose head is <= x, or lo if there is none
  std::size_t result = lo;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    std::size_t probe = mid;
    while (probe > lo && head(probe) == 0) {
      --probe;
    }
    const Key h = head(probe);
    if (h == 0) {
      lo = mid + 1;
    } else if (h <= x) {
      result = probe;
      lo = mid + 1;
    } else {
      hi = probe;
    }
  }
  return result;
}

template <class Codec>
std::size_t PackedSet<Codec>::next_nonempty(std::size_t l, std::size_t hi) const
{
  while (l < hi && head(l) == 0) {
    ++l;
  }
  return l;
}

template <class Codec>
std::optional<Key> PackedSet<Codec>::search(Key x) const
{
  if (size_ == 0) {
    return std::nullopt;
  }
  x = std::max<Key>(x, 1);
  const std::size_t l = find_leaf(x, 0, layout_.num_leaves());
  if (auto s = Codec::successor(leaf(l), x)) {
    return s;
  }
  const std::size_t n = next_nonempty(l + 1, layout_.num_leaves());
  if (n < layout_.num_leaves()) {
    return head(n);
  }
  return std::nullopt;
}

template <class Codec>
std::uint64_t PackedSet<Codec>::parallel_sum() const
{
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (layout_.num_leaves() + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> partial(chunks, 0);
  par::parallel_for(0, chunks, [&](std::size_t c) {
    std::uint64_t s = 0;
    const std::size_t end = std::min(layout_.num_leaves(), (c + 1) * kChunk);
    for (std::size_t l = c * kChunk; l < end; ++l) {
      Codec::for_each(leaf(l), [&s](Key k) { s += k; });
    }
    partial[c] = s;
  });
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

template <class Codec>
std::vector<Key> PackedSet<Codec>::to_vector() const
{
  return gather_all({});
}

// ---- point updates ----------------------------------------------------------------------------

template <class Codec>
bool PackedSet<Codec>::insert(Key x)
{
  if (x == 0) {
    throw DomainError("key 0 is reserved as the empty sentinel");
  }
  if (counters_ != nullptr) {
    counters_->searched();
  }
  const std::size_t l = find_leaf(x, 0, layout_.num_leaves());
  const LeafStatus status = Codec::insert(leaf_mut(l), x);
  if (status == LeafStatus::duplicate) {
    return false;
  }
  ++size_;
  MergeResult merged;
  merged.modified_leaves.push_back(l);
  merged.changed = 1;
  if (status == LeafStatus::applied) {
    if (!layout_.exceeds_upper(0, leaf_used(l))) {
      return true;
    }
  } else {
    OverflowBuffer buffer;
    buffer.leaf = l;
    Codec::decode(leaf(l), buffer.elements);
    buffer.elements.insert(std::upper_bound(buffer.elements.begin(), buffer.elements.end(), x), x);
    buffer.logical_size = Codec::encoded_size(buffer.elements);
    merged.overflows.push_back(std::move(buffer));
  }
  resolve(merged, UpdateKind::insert);
  return true;
}

template <class Codec>
bool PackedSet<Codec>::erase(Key x)
{
  if (x == 0 || size_ == 0) {
    return false;
  }
  const std::size_t l = find_leaf(x, 0, layout_.num_leaves());
  if (Codec::erase(leaf_mut(l), x) != LeafStatus::applied) {
    return false;
  }
  --size_;
  if (layout_.is_minimal() || !layout_.below_lower(0, leaf_used(l))) {
    return true;
  }
  MergeResult merged;
  merged.modified_leaves.push_back(l);
  merged.changed = 1;
  resolve(merged, UpdateKind::erase);
  return true;
}

template <class Codec>
void PackedSet<Codec>::resolve(MergeResult &merged, UpdateKind kind)
{
  if (merged.modified_leaves.empty() || (kind == UpdateKind::erase && layout_.is_minimal())) {
    return;
  }
  const CountingResult counted = counting_phase(merged, kind);
  redistribute_phase(merged, counted, kind);
}

// ---- batch updates ----------------------------------------------------------------------------

template <class Codec>
void PackedSet<Codec>::batch_insert(const Batch &batch)
{
  if (batch.empty()) {
    return;
  }
  if (batch.size() < policy_.point_threshold) {
    for (Key k : batch.keys()) {
      insert(k);
    }
    return;
  }
  if (static_cast<double>(batch.size()) >= policy_.rebuild_fraction * static_cast<double>(size_)) {
    const std::vector<Key> current = to_vector();
    std::vector<Key> merged;
    par::merge_union<Key>(current, batch.keys(), merged);
    rebuild(merged);
    return;
  }
  MergeResult merged = merge_phase(batch, UpdateKind::insert);
  resolve(merged, UpdateKind::insert);
}

template <class Codec>
void PackedSet<Codec>::batch_erase(const Batch &batch)
{
  if (batch.empty() || size_ == 0) {
    return;
  }
  if (batch.size() < policy_.point_threshold) {
    for (Key k : batch.keys()) {
      erase(k);
    }
    return;
  }
  if (static_cast<double>(batch.size()) >= policy_.rebuild_fraction * static_cast<double>(size_)) {
    const std::vector<Key> current = to_vector();
    std::vector<Key> remaining;
    par::set_difference<Key>(current, batch.keys(), remaining);
    if (remaining.size() != current.size()) {
      rebuild(remaining);
    }
    return;
  }
  MergeResult merged = merge_phase(batch, UpdateKind::erase);
  resolve(merged, UpdateKind::erase);
}

template <class Codec>
MergeResult PackedSet<Codec>::merge_phase(const Batch &batch, UpdateKind kind)
{
  MergeResult result;
  if (batch.empty()) {
    return result;
  }
  tbb::concurrent_vector<OverflowBuffer> spill;
  tbb::concurrent_vector<std::pair<std::size_t, std::size_t>> touched;
  merge_recursive(batch.keys(), 0, layout_.num_leaves(), kind, spill, touched);

  std::vector<std::pair<std::size_t, std::size_t>> changes(touched.begin(), touched.end());
  par::sort(changes.begin(), changes.end());
  result.modified_leaves.reserve(changes.size());
  for (const auto &[leaf_id, n] : changes) {
    if (!result.modified_leaves.empty() && result.modified_leaves.back() == leaf_id) {
      throw ContractViolation("merge phase touched leaf " + std::to_string(leaf_id) + " twice");
    }
    result.modified_leaves.push_back(leaf_id);
    result.changed += n;
  }
  result.overflows.reserve(spill.size());
  for (auto &b : spill) {
    result.overflows.push_back(std::move(b));
  }
  std::sort(result.overflows.begin(), result.overflows.end(),
            [](const OverflowBuffer &a, const OverflowBuffer &b) { return a.leaf < b.leaf; });
  if (kind == UpdateKind::insert) {
    size_ += result.changed;
  } else {
    size_ -= result.changed;
  }
  return result;
}

template <class Codec>
void PackedSet<Codec>::merge_recursive(std::span<const Key> keys, std::size_t leaf_lo, std::size_t leaf_hi,
                                       UpdateKind kind, tbb::concurrent_vector<OverflowBuffer> &spill,
                                       tbb::concurrent_vector<std::pair<std::size_t, std::size_t>> &touched)
{
  if (keys.empty()) {
    return;
  }
  // every key here belongs to a leaf in [leaf_lo, leaf_hi)
  const std::size_t mid = keys.size() / 2;
  const Key x = keys[mid];
  if (counters_ != nullptr) {
    counters_->searched();
  }
  const std::size_t l = find_leaf(x, leaf_lo, leaf_hi);
  const Key h = head(l);
  // keys below head(l) belong to an earlier leaf, unless l is the first leaf of the range
  const std::size_t begin = (h != 0 && h <= x && l != leaf_lo) ? gallop_back(keys, mid, h) : 0;
  const std::size_t next = next_nonempty(l + 1, leaf_hi);
  const std::size_t end = next < leaf_hi ? gallop_forward(keys, mid, head(next)) : keys.size();

  auto mine = [&] { merge_leaf(l, keys.subspan(begin, end - begin), kind, spill, touched); };
  auto left = [&] { merge_recursive(keys.first(begin), leaf_lo, l, kind, spill, touched); };
  auto right = [&] { merge_recursive(keys.subspan(end), l + 1, leaf_hi, kind, spill, touched); };
  if (keys.size() <= kSerialMergeCutoff) {
    left();
    mine();
    right();
  } else {
    par::par_do(left, mine, right);
  }
}

template <class Codec>
void PackedSet<Codec>::merge_leaf(std::size_t l, std::span<const Key> keys, UpdateKind kind,
                                  tbb::concurrent_vector<OverflowBuffer> &spill,
                                  tbb::concurrent_vector<std::pair<std::size_t, std::size_t>> &touched)
{
  if (keys.empty()) {
    return;
  }
  auto target = leaf_mut(l);
  if (kind == UpdateKind::insert && keys.size() == 1) {
    const LeafStatus status = Codec::insert(target, keys[0]);
    if (status == LeafStatus::duplicate) {
      return;
    }
    if (status == LeafStatus::applied) {
      touched.push_back({l, 1});
      return;
    }
  }
  const bool large = keys.size() >= policy_.parallel_merge_threshold;
  std::vector<Key> existing;
  std::vector<Key> merged;
  existing.reserve(layout_.leaf_size());
  Codec::decode(target, existing);
  if (kind == UpdateKind::insert) {
    if (large) {
      par::merge_union<Key>(existing, keys, merged);
    } else {
      merged.reserve(existing.size() + keys.size());
      std::set_union(existing.begin(), existing.end(), keys.begin(), keys.end(), std::back_inserter(merged));
    }
    const std::size_t added = merged.size() - existing.size();
    if (added == 0) {
      return;
    }
    const std::size_t bytes = Codec::encoded_size(merged);
    if (bytes <= layout_.leaf_size()) {
      Codec::write(merged, target);
    } else {
      spill.push_back(OverflowBuffer{l, std::move(merged), bytes});
    }
    touched.push_back({l, added});
  } else {
    if (large) {
      par::set_difference<Key>(existing, keys, merged);
    } else {
      std::set_difference(existing.begin(), existing.end(), keys.begin(), keys.end(), std::back_inserter(merged));
    }
    const std::size_t removed = existing.size() - merged.size();
    if (removed == 0) {
      return;
    }
    Codec::write(merged, target);
    touched.push_back({l, removed});
  }
}

// ---- counting ---------------------------------------------------------------------------------

template <class Codec>
std::size_t PackedSet<Codec>::count_leaf(std::size_t l, std::span<const OverflowBuffer> overflows) const
{
  if (counters_ != nullptr) {
    counters_->node_counted(NodeId{0, l}, layout_.leaf_size());
  }
  if (const auto *b = find_overflow(overflows, l)) {
    return b->logical_size;
  }
  return leaf_used(l);
}

template <class Codec>
std::size_t PackedSet<Codec>::count_subtree(NodeId node, const std::vector<LevelCache> &cache,
                                            std::span<const OverflowBuffer> overflows) const
{
  const auto &level = cache[node.level];
  const auto hit = std::lower_bound(level.begin(), level.end(), std::pair<std::uint64_t, std::size_t>{node.index, 0},
                                    [](const auto &a, const auto &b) { return a.first < b.first; });
  if (hit != level.end() && hit->first == node.index) {
    if (counters_ != nullptr) {
      counters_->cache_hit();
    }
    return hit->second;
  }
  if (node.level == 0) {
    return count_leaf(node.index, overflows);
  }
  const auto [a, b] = layout_.children(node);
  std::size_t left = 0;
  std::size_t right = 0;
  if (node.level <= kSerialCountLevel) {
    left = count_subtree(a, cache, overflows);
    right = count_subtree(b, cache, overflows);
  } else {
    par::par_do([&] { left = count_subtree(a, cache, overflows); }, [&] { right = count_subtree(b, cache, overflows); });
  }
  if (counters_ != nullptr) {
    counters_->node_counted(node, 0);
  }
  return left + right;
}

template <class Codec>
CountingResult PackedSet<Codec>::counting_phase(const MergeResult &merged, UpdateKind kind)
{
  CountingResult result;
  const std::uint32_t h = layout_.height();
  result.counted.resize(h + 1);
  if (counters_ != nullptr) {
    counters_->begin_counting_phase();
  }
  const std::span<const OverflowBuffer> overflows = merged.overflows;
  auto violates = [&](std::uint32_t level, std::size_t count) {
    return kind == UpdateKind::insert ? layout_.exceeds_upper(level, count) : layout_.below_lower(level, count);
  };

  std::vector<std::uint64_t> pending(merged.modified_leaves.begin(), merged.modified_leaves.end());
  std::vector<NodeId> candidates;
  for (std::uint32_t level = 0; level <= h && !pending.empty(); ++level) {
    std::vector<std::size_t> counts(pending.size());
    par::parallel_for(0, pending.size(), [&](std::size_t i) {
      if (level == 0) {
        counts[i] = count_leaf(pending[i], overflows);
        return;
      }
      // Case 1 reads both children from the cache; Case 2 counts the missing child top-down.
      const auto [a, b] = layout_.children(NodeId{level, pending[i]});
      counts[i] = count_subtree(a, result.counted, overflows) + count_subtree(b, result.counted, overflows);
      if (counters_ != nullptr) {
        counters_->node_counted(NodeId{level, pending[i]}, 0);
      }
    });

    auto &cache = result.counted[level];
    cache.reserve(pending.size());
    std::vector<std::uint64_t> next;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      cache.emplace_back(pending[i], counts[i]);
      if (!violates(level, counts[i])) {
        if (level > 0) {
          candidates.push_back(NodeId{level, pending[i]});
        }
        continue;
      }
      if (level == h) {
        result.resize = true;
      } else if (next.empty() || next.back() != (pending[i] >> 1)) {
        next.push_back(pending[i] >> 1);
      }
    }
    pending = std::move(next);
  }
  if (result.resize) {
    return result;
  }

  // an ancestor's redistribution subsumes its descendants
  std::unordered_set<std::uint64_t> chosen;
  auto code = [](NodeId n) { return (std::uint64_t{n.level} << 58) | n.index; };
  for (const NodeId &c : candidates) {
    chosen.insert(code(c));
  }
  for (const NodeId &c : candidates) {
    bool covered = false;
    for (NodeId a = c; a.level < h && !covered;) {
      a = NodeId{a.level + 1, a.index >> 1};
      covered = chosen.contains(code(a));
    }
    if (!covered) {
      result.targets.push_back(c);
    }
  }
  std::sort(result.targets.begin(), result.targets.end(),
            [this](NodeId a, NodeId b) { return layout_.region(a).begin < layout_.region(b).begin; });
  return result;
}

// ---- redistribution ---------------------------------------------------------------------------

template <class Codec>
std::size_t PackedSet<Codec>::count_region(NodeId node, std::span<const OverflowBuffer> overflows,
                                           std::span<const unsigned char> consumed) const
{
  const auto [first, last] = layout_.leaves_of(node);
  std::size_t total = 0;
  for (std::size_t l = first; l < last; ++l) {
    const auto *b = find_overflow(overflows, l);
    if (b != nullptr && (consumed.empty() || consumed[static_cast<std::size_t>(b - overflows.data())] == 0)) {
      total += b->logical_size;
    } else {
      total += leaf_used(l);
    }
  }
  return total;
}

template <class Codec>
void PackedSet<Codec>::gather(std::size_t first, std::size_t last, std::span<const OverflowBuffer> overflows,
                              std::span<const unsigned char> consumed, std::vector<Key> &out) const
{
  auto it = std::lower_bound(overflows.begin(), overflows.end(), first,
                             [](const OverflowBuffer &b, std::size_t l) { return b.leaf < l; });
  for (std::size_t l = first; l < last; ++l) {
    if (it != overflows.end() && it->leaf == l) {
      const auto idx = static_cast<std::size_t>(it - overflows.begin());
      ++it;
      if (consumed.empty() || consumed[idx] == 0) {
        out.insert(out.end(), overflows[idx].elements.begin(), overflows[idx].elements.end());
        continue;
      }
    }
    Codec::decode(leaf(l), out);
  }
}

template <class Codec>
std::vector<Key> PackedSet<Codec>::gather_all(std::span<const OverflowBuffer> overflows) const
{
  const std::size_t n = layout_.num_leaves();
  std::vector<std::size_t> offsets(n + 1, 0);
  par::parallel_for(
      0, n,
      [&](std::size_t l) {
        const auto *b = find_overflow(overflows, l);
        offsets[l + 1] = b != nullptr ? b->elements.size() : Codec::count(leaf(l));
      },
      256);
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Key> out(offsets[n]);
  par::parallel_for(
      0, n,
      [&](std::size_t l) {
        Key *dst = out.data() + offsets[l];
        if (const auto *b = find_overflow(overflows, l)) {
          std::copy(b->elements.begin(), b->elements.end(), dst);
        } else {
          Codec::for_each(leaf(l), [&dst](Key k) { *dst++ = k; });
        }
      },
      256);
  return out;
}

template <class Codec>
typename PackedSet<Codec>::SpreadPlan PackedSet<Codec>::plan_spread(std::span<const Key> keys,
                                                                    std::size_t num_leaves) const
{
  SpreadPlan plan;
  const std::size_t m = keys.size();
  plan.cuts.assign(num_leaves + 1, 0);
  plan.cuts[num_leaves] = m;
  if (m == 0) {
    return plan;
  }
  if constexpr (Codec::max_element_cost == 1) {
    // every element costs one cell: leaf i takes [i*m/L, (i+1)*m/L)
    for (std::size_t i = 1; i < num_leaves; ++i) {
      plan.cuts[i] = static_cast<std::size_t>((static_cast<unsigned __int128>(i) * m) / num_leaves);
    }
    plan.total = m;
    plan.max_leaf = (m + num_leaves - 1) / num_leaves;
    return plan;
  } else {
    auto cost = [&keys](std::size_t j) {
      return j == 0 ? Codec::head_cost() : Codec::delta_cost(keys[j - 1], keys[j]);
    };
    std::uint64_t stream = 0;
    for (std::size_t j = 0; j < m; ++j) {
      stream += cost(j);
    }
    // Each leaf gets an even share of the bytes still to place. A leaf head costs a full key
    // instead of its delta; leaves not yet started are charged the average difference.
    const double head_extra =
        m > 1 ? static_cast<double>(Codec::head_cost()) - static_cast<double>(stream - Codec::head_cost()) / static_cast<double>(m - 1)
              : 0.0;
    std::uint64_t placed = 0;  // stream bytes of elements [0, s)
    std::size_t s = 0;
    for (std::size_t i = 0; i < num_leaves; ++i) {
      plan.cuts[i] = s;
      if (s == m) {
        continue;
      }
      const std::size_t left = num_leaves - i;
      const std::size_t c0 = cost(s);
      std::size_t e = s + 1;
      std::size_t bytes = Codec::head_cost();
      if (left == 1) {
        bytes += static_cast<std::size_t>(stream - placed - c0);
        e = m;
      } else {
        const double remaining = static_cast<double>(stream - placed) + static_cast<double>(Codec::head_cost() - c0) +
                                 static_cast<double>(left - 1) * head_extra;
        const double budget = remaining / static_cast<double>(left);
        std::uint64_t consumed = c0;
        while (e < m) {
          const std::size_t c = cost(e);
          if (static_cast<double>(bytes) + 0.5 * static_cast<double>(c) > budget) {
            break;
          }
          bytes += c;
          consumed += c;
          ++e;
        }
        placed += consumed;
      }
      plan.total += bytes;
      plan.max_leaf = std::max(plan.max_leaf, bytes);
      s = e;
    }
    return plan;
  }
}

template <class Codec>
void PackedSet<Codec>::write_spread(std::span<const Key> keys, const SpreadPlan &plan, slot_type *dest,
                                    std::size_t leaf_size, std::size_t num_leaves)
{
  par::parallel_for(
      0, num_leaves,
      [&](std::size_t i) {
        Codec::write(keys.subspan(plan.cuts[i], plan.cuts[i + 1] - plan.cuts[i]),
                     std::span<slot_type>(dest + i * leaf_size, leaf_size));
      },
      512);
}

template <class Codec>
bool PackedSet<Codec>::redistribute_region(NodeId node, std::span<const OverflowBuffer> overflows,
                                           std::span<unsigned char> consumed)
{
  const auto [first, last] = layout_.leaves_of(node);
  std::vector<Key> keys;
  gather(first, last, overflows, consumed, keys);
  const SpreadPlan plan = plan_spread(keys, last - first);
  if (plan.max_leaf > leaf_limit()) {
    return false;
  }
  write_spread(keys, plan, slots_.data() + first * layout_.leaf_size(), layout_.leaf_size(), last - first);
  if (!consumed.empty()) {
    auto it = std::lower_bound(overflows.begin(), overflows.end(), first,
                               [](const OverflowBuffer &b, std::size_t l) { return b.leaf < l; });
    for (; it != overflows.end() && it->leaf < last; ++it) {
      consumed[static_cast<std::size_t>(it - overflows.begin())] = 1;
    }
  }
  if (counters_ != nullptr) {
    counters_->moved(keys.size());
  }
  return true;
}

template <class Codec>
bool PackedSet<Codec>::redistribute(NodeId node)
{
  return redistribute_region(node, {}, {});
}

template <class Codec>
void PackedSet<Codec>::redistribute_phase(MergeResult &merged, const CountingResult &counted, UpdateKind kind)
{
  const std::span<const OverflowBuffer> overflows = merged.overflows;
  auto resize = [&](std::span<const unsigned char> consumed) {
    std::vector<Key> keys;
    if (consumed.empty()) {
      keys = gather_all(overflows);
    } else {
      gather(0, layout_.num_leaves(), overflows, consumed, keys);
    }
    if (kind == UpdateKind::insert) {
      grow(keys);
    } else {
      shrink(keys);
    }
    merged.overflows.clear();
  };
  if (counted.resize) {
    resize({});
    return;
  }

  std::vector<unsigned char> consumed(overflows.size(), 0);
  std::vector<unsigned char> done(counted.targets.size(), 0);
  par::parallel_for(0, counted.targets.size(),
                    [&](std::size_t i) { done[i] = redistribute_region(counted.targets[i], overflows, consumed); });

  // A target whose leaves cannot hold their share escalates to the nearest compliant ancestor
  // that can; past the root the structure resizes.
  std::vector<NodeId> escalated;
  auto violates = [&](std::uint32_t level, std::size_t count) {
    return kind == UpdateKind::insert ? layout_.exceeds_upper(level, count) : layout_.below_lower(level, count);
  };
  for (std::size_t i = 0; i < counted.targets.size(); ++i) {
    if (done[i] != 0) {
      continue;
    }
    NodeId node = counted.targets[i];
    if (std::any_of(escalated.begin(), escalated.end(), [&](NodeId a) { return Layout::covers(a, node); })) {
      continue;
    }
    bool resolved = false;
    while (!resolved && node.level < layout_.height()) {
      node = layout_.parent(node);
      if (violates(node.level, count_region(node, overflows, consumed))) {
        continue;
      }
      resolved = redistribute_region(node, overflows, consumed);
    }
    if (!resolved) {
      resize(consumed);
      return;
    }
    escalated.push_back(node);
  }
  if (std::find(consumed.begin(), consumed.end(), 0) != consumed.end()) {
    throw ContractViolation("an overflow buffer was not covered by any redistribution");
  }
  merged.overflows.clear();
}

// ---- resizing ---------------------------------------------------------------------------------

template <class Codec>
void PackedSet<Codec>::install(const Layout &layout, std::span<const Key> keys, const SpreadPlan &plan)
{
  std::vector<slot_type> fresh(layout.capacity());
  write_spread(keys, plan, fresh.data(), layout.leaf_size(), layout.num_leaves());
  slots_.swap(fresh);
  layout_ = layout;
  size_ = keys.size();
  if (counters_ != nullptr) {
    counters_->moved(keys.size());
  }
}

template <class Codec>
void PackedSet<Codec>::rebuild(std::span<const Key> keys)
{
  std::size_t estimate = Codec::encoded_size(keys);
  while (true) {
    const Layout layout = Layout::for_elements(estimate, config_);
    const SpreadPlan plan = plan_spread(keys, layout.num_leaves());
    if (plan.max_leaf <= leaf_limit(layout) && !layout.exceeds_upper(layout.height(), plan.total)) {
      install(layout, keys, plan);
      return;
    }
    estimate = std::max(estimate + estimate / 64 + 1, plan.total);
  }
}

template <class Codec>
void PackedSet<Codec>::grow(std::span<const Key> keys)
{
  double target = static_cast<double>(layout_.capacity());
  while (true) {
    target *= config_.growing_factor;
    const Layout layout = Layout::for_capacity(static_cast<std::size_t>(std::ceil(target)), config_);
    const SpreadPlan plan = plan_spread(keys, layout.num_leaves());
    // one factor per resize; only a spread that cannot physically fit forces another step
    if (plan.max_leaf <= leaf_limit(layout)) {
      install(layout, keys, plan);
      ++resizes_;
      return;
    }
  }
}

template <class Codec>
void PackedSet<Codec>::shrink(std::span<const Key> keys)
{
  Layout best = layout_;
  SpreadPlan best_plan = plan_spread(keys, layout_.num_leaves());
  double target = static_cast<double>(layout_.capacity());
  while (true) {
    target /= config_.growing_factor;
    const Layout layout = Layout::for_capacity(static_cast<std::size_t>(std::ceil(target)), config_);
    if (layout.capacity() >= best.capacity()) {
      break;
    }
    SpreadPlan plan = plan_spread(keys, layout.num_leaves());
    if (plan.max_leaf > leaf_limit(layout) || layout.exceeds_upper(layout.height(), plan.total)) {
      break;
    }
    const bool settled = !layout.below_lower(layout.height(), plan.total);
    best = layout;
    best_plan = std::move(plan);
    if (settled) {
      break;
    }
  }
  if (!(best == layout_)) {
    ++resizes_;
  }
  install(best, keys, best_plan);
}

// ---- stats ------------------------------------------------------------------------------------

template <class Codec>
SizeStats PackedSet<Codec>::size_stats() const
{
  SizeStats s;
  s.elements = size_;
  s.capacity = layout_.capacity();
  s.bytes = layout_.capacity() * sizeof(slot_type);
  s.bytes_per_element = size_ == 0 ? 0.0 : static_cast<double>(s.bytes) / static_cast<double>(size_);
  return s;
}

template <class Codec>
std::uint64_t PackedSet<Codec>::checksum() const
{
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const auto *bytes = reinterpret_cast<const unsigned char *>(slots_.data());
  const std::size_t n = slots_.size() * sizeof(slot_type);
  for (std::size_t i = 0; i < n; ++i) {
    hash = (hash ^ bytes[i]) * 0x100000001b3ULL;
  }
  return hash;
}

template class PackedSet<UncompressedLeaf>;
template class PackedSet<CompressedLeaf>;

}  // namespace cpma
