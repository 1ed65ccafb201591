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

#include "cpma/leaf_codec.hpp"

#include <string>

namespace cpma::codec
{
std::vector<std::uint8_t> encode_varint(std::uint64_t v)
{
  std::vector<std::uint8_t> out(varint_size(v));
  write_varint(v, out.data());
  return out;
}

Varint decode_varint(std::span<const std::uint8_t> bytes)
{
  std::uint64_t value = 0;
  unsigned shift = 0;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const std::uint64_t chunk = bytes[i] & 0x7F;
    if (shift == 63 && chunk > 1) {
      throw CorruptionError("varint wider than 64 bits");
    }
    value |= chunk << shift;
    if ((bytes[i] & 0x80) == 0) {
      return {value, i + 1};
    }
    shift += 7;
    if (shift > 63) {
      throw CorruptionError("varint wider than 64 bits");
    }
  }
  throw CorruptionError("truncated varint: continue bit set on the last byte");
}

std::size_t encoded_size(std::span<const Key> sorted_keys) { return CompressedLeaf::encoded_size(sorted_keys); }

std::optional<std::vector<std::uint8_t>> leaf_encode(std::span<const Key> sorted_keys, std::size_t leaf_bytes)
{
  for (std::size_t i = 0; i < sorted_keys.size(); ++i) {
    if (sorted_keys[i] == 0 || (i > 0 && sorted_keys[i] <= sorted_keys[i - 1])) {
      throw DomainError("leaf_encode needs strictly increasing keys >= 1");
    }
  }
  if (leaf_bytes < CompressedLeaf::head_bytes || encoded_size(sorted_keys) > leaf_bytes) {
    return std::nullopt;
  }
  std::vector<std::uint8_t> leaf(leaf_bytes);
  CompressedLeaf::write(sorted_keys, leaf);
  return leaf;
}

std::vector<Key> leaf_decode(std::span<const std::uint8_t> leaf)
{
  std::vector<Key> out;
  if (leaf.size() < CompressedLeaf::head_bytes) {
    throw CorruptionError("leaf shorter than its head");
  }
  const Key head = CompressedLeaf::load_head(leaf.data());
  std::size_t pos = CompressedLeaf::head_bytes;
  if (head != 0) {
    out.push_back(head);
    Key cur = head;
    // the nonzero run after the head is the encoded tail; every varint must terminate inside it
    std::size_t run = pos;
    while (run < leaf.size() && leaf[run] != 0) {
      ++run;
    }
    while (pos < run) {
      const auto v = decode_varint(leaf.subspan(pos, run - pos));
      if (v.value > ~Key{0} - cur) {
        throw CorruptionError("delta overflows the key range");
      }
      cur += v.value;
      out.push_back(cur);
      pos += v.length;
    }
  }
  for (; pos < leaf.size(); ++pos) {
    if (leaf[pos] != 0) {
      throw CorruptionError("nonzero byte in leaf free space at offset " + std::to_string(pos));
    }
  }
  return out;
}

std::vector<Key> leaf_decode(std::span<const Key> leaf)
{
  std::vector<Key> out;
  std::size_t i = 0;
  for (; i < leaf.size() && leaf[i] != 0; ++i) {
    if (!out.empty() && leaf[i] <= out.back()) {
      throw CorruptionError("leaf cells out of order at " + std::to_string(i));
    }
    out.push_back(leaf[i]);
  }
  for (; i < leaf.size(); ++i) {
    if (leaf[i] != 0) {
      throw CorruptionError("nonzero cell after the packed prefix at " + std::to_string(i));
    }
  }
  return out;
}

}  // namespace cpma::codec
