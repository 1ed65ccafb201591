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

#ifndef CPMA_VARINT_HPP
#define CPMA_VARINT_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cpma::codec
{
/// A 64-bit value needs at most ceil(64 / 7) chunks.
inline constexpr std::size_t kMaxVarintBytes = 10;

/// Length of the little-endian base-128 encoding of `v` (0 encodes to one byte).
constexpr std::size_t varint_size(std::uint64_t v)
{
  return v < 0x80 ? 1 : (static_cast<std::size_t>(std::bit_width(v)) + 6) / 7;
}

/// Writes `v` at `out`, low 7 bits first, high bit set on every chunk but the last.
inline std::size_t write_varint(std::uint64_t v, std::uint8_t *out)
{
  std::size_t n = 0;
  while (v >= 0x80) {
    out[n++] = static_cast<std::uint8_t>(v | 0x80);
    v >>= 7;
  }
  out[n++] = static_cast<std::uint8_t>(v);
  return n;
}

struct Varint {
  std::uint64_t value = 0;
  std::size_t length = 0;
};

/// Decodes one varint from trusted data. Callers guarantee a terminating chunk exists.
inline Varint read_varint(const std::uint8_t *in)
{
  std::uint64_t b = in[0];
  if (b < 0x80) {
    return {b, 1};
  }
  std::uint64_t value = b & 0x7F;
  std::size_t i = 1;
  unsigned shift = 7;
  do {
    b = in[i++];
    value |= (b & 0x7F) << shift;
    shift += 7;
  } while ((b & 0x80) != 0 && i < kMaxVarintBytes);
  return {value, i};
}

/// Encodes `v` into a fresh byte vector.
std::vector<std::uint8_t> encode_varint(std::uint64_t v);

/// Decodes the varint at the front of `bytes`; throws CorruptionError on a dangling continue bit
/// or a value wider than 64 bits. Never reads past `bytes`.
Varint decode_varint(std::span<const std::uint8_t> bytes);

}  // namespace cpma::codec

#endif  // CPMA_VARINT_HPP
