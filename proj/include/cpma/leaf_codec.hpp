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

#ifndef CPMA_LEAF_CODEC_HPP
#define CPMA_LEAF_CODEC_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <vector>

#include "cpma/common.hpp"
#include "cpma/varint.hpp"

namespace cpma
{
/// Outcome of an in-place leaf update. `overflow` leaves the leaf untouched.
enum class LeafStatus { applied, duplicate, absent, overflow };

/**
 * Uncompressed leaf: fixed 8-byte cells packed to the left, zero marks an empty cell.
 *
 * Every codec exposes the same static interface; PackedSet is generic over it.
 */
struct UncompressedLeaf {
  using slot_type = Key;
  static constexpr const char *name = "pma";
  static constexpr std::size_t default_min_leaf = 32;
  static constexpr std::size_t max_element_cost = 1;
  /// Rounding slack of an even spread, in slots.
  static constexpr std::size_t granule = 1;

  static constexpr std::size_t head_cost() { return 1; }
  static constexpr std::size_t delta_cost(Key, Key) { return 1; }

  static std::size_t used(std::span<const Key> leaf)
  {
    // packed left: first zero cell ends the prefix
    const auto it = std::partition_point(leaf.begin(), leaf.end(), [](Key k) { return k != 0; });
    return static_cast<std::size_t>(it - leaf.begin());
  }
  static std::size_t count(std::span<const Key> leaf) { return used(leaf); }
  static Key head(std::span<const Key> leaf) { return leaf[0]; }
  static Key last(std::span<const Key> leaf)
  {
    const std::size_t n = used(leaf);
    return n == 0 ? 0 : leaf[n - 1];
  }

  static void decode(std::span<const Key> leaf, std::vector<Key> &out)
  {
    out.insert(out.end(), leaf.begin(), leaf.begin() + static_cast<std::ptrdiff_t>(used(leaf)));
  }

  static std::size_t encoded_size(std::span<const Key> keys) { return keys.size(); }

  /// Pre: keys.size() <= leaf.size().
  static void write(std::span<const Key> keys, std::span<Key> leaf)
  {
    std::copy(keys.begin(), keys.end(), leaf.begin());
    std::fill(leaf.begin() + static_cast<std::ptrdiff_t>(keys.size()), leaf.end(), Key{0});
  }

  static LeafStatus insert(std::span<Key> leaf, Key x)
  {
    const std::size_t n = used(leaf);
    Key *pos = std::lower_bound(leaf.data(), leaf.data() + n, x);
    if (pos != leaf.data() + n && *pos == x) {
      return LeafStatus::duplicate;
    }
    if (n == leaf.size()) {
      return LeafStatus::overflow;
    }
    std::memmove(pos + 1, pos, static_cast<std::size_t>(leaf.data() + n - pos) * sizeof(Key));
    *pos = x;
    return LeafStatus::applied;
  }

  static LeafStatus erase(std::span<Key> leaf, Key x)
  {
    const std::size_t n = used(leaf);
    Key *pos = std::lower_bound(leaf.data(), leaf.data() + n, x);
    if (pos == leaf.data() + n || *pos != x) {
      return LeafStatus::absent;
    }
    std::memmove(pos, pos + 1, static_cast<std::size_t>(leaf.data() + n - pos - 1) * sizeof(Key));
    leaf[n - 1] = 0;
    return LeafStatus::applied;
  }

  static std::optional<Key> successor(std::span<const Key> leaf, Key x)
  {
    const std::size_t n = used(leaf);
    const Key *pos = std::lower_bound(leaf.data(), leaf.data() + n, x);
    if (pos == leaf.data() + n) {
      return std::nullopt;
    }
    return *pos;
  }

  /// Applies f to leaf elements in [start, end); returns true once an element >= end was seen.
  template <class F>
  static bool scan(std::span<const Key> leaf, Key start, Key end, F &f)
  {
    const std::size_t n = used(leaf);
    const Key *pos = std::lower_bound(leaf.data(), leaf.data() + n, start);
    for (; pos != leaf.data() + n; ++pos) {
      if (*pos >= end) {
        return true;
      }
      f(*pos);
    }
    return false;
  }

  template <class F>
  static void for_each(std::span<const Key> leaf, F &&f)
  {
    for (Key k : leaf) {
      if (k == 0) {
        return;
      }
      f(k);
    }
  }
};

/**
 * Compressed leaf: an 8-byte little-endian head followed by varint deltas, packed to the left.
 *
 * Deltas are strictly positive, so a valid tail never contains a zero byte and the first zero
 * after the head marks the start of free space.
 */
struct CompressedLeaf {
  using slot_type = std::uint8_t;
  static constexpr const char *name = "cpma";
  static constexpr std::size_t default_min_leaf = 128;
  static constexpr std::size_t head_bytes = sizeof(Key);
  static constexpr std::size_t max_element_cost = codec::kMaxVarintBytes;
  static constexpr std::size_t granule = head_bytes + codec::kMaxVarintBytes;

  static constexpr std::size_t head_cost() { return head_bytes; }
  static constexpr std::size_t delta_cost(Key prev, Key cur) { return codec::varint_size(cur - prev); }

  static Key load_head(const std::uint8_t *p)
  {
    Key h;
    std::memcpy(&h, p, sizeof(h));
    return h;
  }
  static void store_head(std::uint8_t *p, Key h) { std::memcpy(p, &h, sizeof(h)); }

  static std::size_t used(std::span<const std::uint8_t> leaf)
  {
    if (load_head(leaf.data()) == 0) {
      return 0;
    }
    const std::size_t tail = leaf.size() - head_bytes;
    const void *zero = std::memchr(leaf.data() + head_bytes, 0, tail);
    return zero == nullptr ? leaf.size() : static_cast<std::size_t>(static_cast<const std::uint8_t *>(zero) - leaf.data());
  }

  static std::size_t count(std::span<const std::uint8_t> leaf)
  {
    const std::size_t n = used(leaf);
    if (n == 0) {
      return 0;
    }
    std::size_t c = 1;
    for (std::size_t i = head_bytes; i < n; ++i) {
      c += (leaf[i] & 0x80) == 0;
    }
    return c;
  }

  static Key head(std::span<const std::uint8_t> leaf) { return load_head(leaf.data()); }

  static Key last(std::span<const std::uint8_t> leaf)
  {
    Key cur = load_head(leaf.data());
    if (cur == 0) {
      return 0;
    }
    const std::size_t n = used(leaf);
    for (std::size_t pos = head_bytes; pos < n;) {
      const auto v = codec::read_varint(leaf.data() + pos);
      cur += v.value;
      pos += v.length;
    }
    return cur;
  }

  template <class F>
  static void for_each(std::span<const std::uint8_t> leaf, F &&f)
  {
    Key cur = load_head(leaf.data());
    if (cur == 0) {
      return;
    }
    f(cur);
    const std::uint8_t *p = leaf.data() + head_bytes;
    const std::uint8_t *end = leaf.data() + leaf.size();
    while (p < end && *p != 0) {
      const auto v = codec::read_varint(p);
      cur += v.value;
      p += v.length;
      f(cur);
    }
  }

  static void decode(std::span<const std::uint8_t> leaf, std::vector<Key> &out)
  {
    for_each(leaf, [&out](Key k) { out.push_back(k); });
  }

  static std::size_t encoded_size(std::span<const Key> keys)
  {
    if (keys.empty()) {
      return 0;
    }
    std::size_t bytes = head_bytes;
    for (std::size_t i = 1; i < keys.size(); ++i) {
      bytes += codec::varint_size(keys[i] - keys[i - 1]);
    }
    return bytes;
  }

  /// Pre: encoded_size(keys) <= leaf.size().
  static void write(std::span<const Key> keys, std::span<std::uint8_t> leaf)
  {
    std::size_t pos = 0;
    if (!keys.empty()) {
      store_head(leaf.data(), keys[0]);
      pos = head_bytes;
      for (std::size_t i = 1; i < keys.size(); ++i) {
        pos += codec::write_varint(keys[i] - keys[i - 1], leaf.data() + pos);
      }
    }
    std::memset(leaf.data() + pos, 0, leaf.size() - pos);
  }

  static LeafStatus insert(std::span<std::uint8_t> leaf, Key x)
  {
    std::uint8_t *p = leaf.data();
    const std::size_t cap = leaf.size();
    const Key head = load_head(p);
    if (head == 0) {
      store_head(p, x);
      return LeafStatus::applied;
    }
    if (x == head) {
      return LeafStatus::duplicate;
    }
    const std::size_t n = used(leaf);
    if (x < head) {
      // the old head becomes the first delta
      const Key d = head - x;
      const std::size_t need = codec::varint_size(d);
      if (n + need > cap) {
        return LeafStatus::overflow;
      }
      std::memmove(p + head_bytes + need, p + head_bytes, n - head_bytes);
      codec::write_varint(d, p + head_bytes);
      store_head(p, x);
      return LeafStatus::applied;
    }
    Key cur = head;
    std::size_t pos = head_bytes;
    while (pos < n) {
      const auto v = codec::read_varint(p + pos);
      const Key next = cur + v.value;
      if (next == x) {
        return LeafStatus::duplicate;
      }
      if (next > x) {
        // split the covering delta into (x - cur) and (next - x)
        const Key d1 = x - cur;
        const Key d2 = next - x;
        const std::size_t len = codec::varint_size(d1) + codec::varint_size(d2);
        if (n + len - v.length > cap) {
          return LeafStatus::overflow;
        }
        std::memmove(p + pos + len, p + pos + v.length, n - pos - v.length);
        const std::size_t w = codec::write_varint(d1, p + pos);
        codec::write_varint(d2, p + pos + w);
        return LeafStatus::applied;
      }
      cur = next;
      pos += v.length;
    }
    const std::size_t need = codec::varint_size(x - cur);
    if (n + need > cap) {
      return LeafStatus::overflow;
    }
    codec::write_varint(x - cur, p + n);
    return LeafStatus::applied;
  }

  static LeafStatus erase(std::span<std::uint8_t> leaf, Key x)
  {
    std::uint8_t *p = leaf.data();
    const Key head = load_head(p);
    if (head == 0 || x < head) {
      return LeafStatus::absent;
    }
    const std::size_t n = used(leaf);
    if (x == head) {
      if (n == head_bytes) {
        store_head(p, 0);
        return LeafStatus::applied;
      }
      const auto v = codec::read_varint(p + head_bytes);
      std::memmove(p + head_bytes, p + head_bytes + v.length, n - head_bytes - v.length);
      std::memset(p + n - v.length, 0, v.length);
      store_head(p, head + v.value);
      return LeafStatus::applied;
    }
    Key cur = head;
    std::size_t pos = head_bytes;
    while (pos < n) {
      const auto v = codec::read_varint(p + pos);
      const Key value = cur + v.value;
      if (value > x) {
        return LeafStatus::absent;
      }
      if (value == x) {
        const std::size_t after = pos + v.length;
        if (after == n) {
          std::memset(p + pos, 0, v.length);
          return LeafStatus::applied;
        }
        // merge the deltas on both sides of x
        const auto w = codec::read_varint(p + after);
        const Key merged = v.value + w.value;
        const std::size_t mlen = codec::varint_size(merged);
        const std::size_t old_len = v.length + w.length;
        std::memmove(p + pos + mlen, p + pos + old_len, n - pos - old_len);
        codec::write_varint(merged, p + pos);
        std::memset(p + n - (old_len - mlen), 0, old_len - mlen);
        return LeafStatus::applied;
      }
      cur = value;
      pos += v.length;
    }
    return LeafStatus::absent;
  }

  static std::optional<Key> successor(std::span<const std::uint8_t> leaf, Key x)
  {
    std::optional<Key> found;
    Key cur = load_head(leaf.data());
    if (cur == 0) {
      return found;
    }
    if (cur >= x) {
      return cur;
    }
    const std::uint8_t *p = leaf.data() + head_bytes;
    const std::uint8_t *end = leaf.data() + leaf.size();
    while (p < end && *p != 0) {
      const auto v = codec::read_varint(p);
      cur += v.value;
      p += v.length;
      if (cur >= x) {
        return cur;
      }
    }
    return found;
  }

  template <class F>
  static bool scan(std::span<const std::uint8_t> leaf, Key start, Key end, F &f)
  {
    Key cur = load_head(leaf.data());
    if (cur == 0) {
      return false;
    }
    if (cur >= end) {
      return true;
    }
    if (cur >= start) {
      f(cur);
    }
    const std::uint8_t *p = leaf.data() + head_bytes;
    const std::uint8_t *stop = leaf.data() + leaf.size();
    while (p < stop && *p != 0) {
      const auto v = codec::read_varint(p);
      cur += v.value;
      p += v.length;
      if (cur >= end) {
        return true;
      }
      if (cur >= start) {
        f(cur);
      }
    }
    return false;
  }
};

namespace codec
{
/// Size in bytes of `sorted_keys` as one compressed leaf: 8-byte head plus one varint per delta.
std::size_t encoded_size(std::span<const Key> sorted_keys);

/// Encodes strictly increasing keys (all >= 1) into a zero-padded leaf of `leaf_bytes` bytes.
/// Returns nullopt when the encoding does not fit.
std::optional<std::vector<std::uint8_t>> leaf_encode(std::span<const Key> sorted_keys, std::size_t leaf_bytes);

/// Decodes a compressed leaf, validating it: throws CorruptionError on a truncated varint,
/// a delta overflowing 64 bits, or nonzero bytes in the free space. Never reads out of bounds.
std::vector<Key> leaf_decode(std::span<const std::uint8_t> leaf);

/// Same checks for an uncompressed leaf (packed-left, strictly increasing prefix, zero suffix).
std::vector<Key> leaf_decode(std::span<const Key> leaf);

}  // namespace codec
}  // namespace cpma

#endif  // CPMA_LEAF_CODEC_HPP
