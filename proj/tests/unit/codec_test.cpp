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

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "cpma/leaf_codec.hpp"
#include "cpma/random.hpp"
#include "cpma/varint.hpp"

namespace cpma
{
namespace
{
// Little-endian base-128 written out by hand.
std::vector<std::uint8_t> naive_varint(std::uint64_t v)
{
  std::vector<std::uint8_t> out;
  do {
    std::uint8_t byte = v % 128;
    v /= 128;
    if (v != 0) {
      byte += 128;
    }
    out.push_back(byte);
  } while (v != 0);
  return out;
}

TEST(Varint, KnownEncodings)
{
  EXPECT_EQ(codec::encode_varint(0), (std::vector<std::uint8_t>{0x00}));
  EXPECT_EQ(codec::encode_varint(1), (std::vector<std::uint8_t>{0x01}));
  EXPECT_EQ(codec::encode_varint(127), (std::vector<std::uint8_t>{0x7F}));
  EXPECT_EQ(codec::encode_varint(128), (std::vector<std::uint8_t>{0x80, 0x01}));
  EXPECT_EQ(codec::encode_varint(300), (std::vector<std::uint8_t>{0xAC, 0x02}));
  EXPECT_EQ(codec::encode_varint(~std::uint64_t{0}).size(), 10u);
}

TEST(Varint, RoundTripMatchesNaive)
{
  SplitMix64 rng(7);
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t v = rng.next() >> rng.below(64);
    const auto bytes = codec::encode_varint(v);
    ASSERT_EQ(bytes, naive_varint(v));
    ASSERT_EQ(codec::varint_size(v), bytes.size());
    const auto decoded = codec::decode_varint(bytes);
    ASSERT_EQ(decoded.value, v);
    ASSERT_EQ(decoded.length, bytes.size());
  }
}

TEST(Varint, RejectsMalformed)
{
  const std::vector<std::uint8_t> truncated{0x80, 0x80};
  EXPECT_THROW(codec::decode_varint(truncated), CorruptionError);
  std::vector<std::uint8_t> wide(10, 0xFF);
  wide.back() = 0x02;
  EXPECT_THROW(codec::decode_varint(wide), CorruptionError);
  std::vector<std::uint8_t> eleven(11, 0x80);
  eleven.back() = 0x00;
  EXPECT_THROW(codec::decode_varint(eleven), CorruptionError);
}

TEST(CompressedLeaf, LayoutIsHeadThenDeltas)
{
  const std::vector<Key> keys{1000, 1001, 1200, 1000000};
  const auto leaf = codec::leaf_encode(keys, 32);
  ASSERT_TRUE(leaf.has_value());
  const auto &b = *leaf;
  // 8-byte little-endian head
  EXPECT_EQ(b[0], 0xE8);
  EXPECT_EQ(b[1], 0x03);
  EXPECT_TRUE(std::all_of(b.begin() + 2, b.begin() + 8, [](auto x) { return x == 0; }));
  EXPECT_EQ(b[8], 0x01);
  EXPECT_EQ(b[9], 0xC7);
  EXPECT_EQ(b[10], 0x01);
  const auto tail = naive_varint(1000000 - 1200);
  EXPECT_TRUE(std::equal(tail.begin(), tail.end(), b.begin() + 11));
  EXPECT_TRUE(std::all_of(b.begin() + 11 + static_cast<long>(tail.size()), b.end(), [](auto x) { return x == 0; }));
  EXPECT_EQ(codec::encoded_size(keys), 11 + tail.size());
  EXPECT_EQ(codec::leaf_decode(std::span<const std::uint8_t>(b)), keys);
}

TEST(CompressedLeaf, EncodeRejectsUnsortedAndTooSmall)
{
  const std::vector<Key> unsorted{5, 3};
  EXPECT_THROW(codec::leaf_encode(unsorted, 64), DomainError);
  const std::vector<Key> zero{0, 3};
  EXPECT_THROW(codec::leaf_encode(zero, 64), DomainError);
  const std::vector<Key> big{1, ~Key{0}};
  EXPECT_FALSE(codec::leaf_encode(big, 12).has_value());
  EXPECT_TRUE(codec::leaf_encode(big, 18).has_value());
}

TEST(CompressedLeaf, EmptyLeafIsAllZero)
{
  const auto leaf = codec::leaf_encode({}, 32);
  ASSERT_TRUE(leaf.has_value());
  EXPECT_TRUE(codec::leaf_decode(std::span<const std::uint8_t>(*leaf)).empty());
  EXPECT_EQ(CompressedLeaf::used(*leaf), 0u);
}

template <class Codec>
void point_ops_against_vector(std::size_t leaf_size)
{
  using Slot = typename Codec::slot_type;
  std::vector<Slot> leaf(leaf_size, Slot{0});
  std::vector<Key> ref;
  SplitMix64 rng(11);
  for (int i = 0; i < 5000; ++i) {
    const Key x = rng.key(12);
    const bool ins = rng.below(3) != 0;
    const auto it = std::lower_bound(ref.begin(), ref.end(), x);
    const bool present = it != ref.end() && *it == x;
    if (ins) {
      const LeafStatus s = Codec::insert(leaf, x);
      if (present) {
        ASSERT_EQ(s, LeafStatus::duplicate);
      } else if (s == LeafStatus::applied) {
        ref.insert(it, x);
      } else {
        ASSERT_EQ(s, LeafStatus::overflow);
        ref.erase(ref.begin() + static_cast<long>(ref.size() / 2), ref.end());
        Codec::write(ref, leaf);
      }
    } else {
      const LeafStatus s = Codec::erase(leaf, x);
      ASSERT_EQ(s, present ? LeafStatus::applied : LeafStatus::absent);
      if (present) {
        ref.erase(it);
      }
    }
    std::vector<Key> got;
    Codec::decode(leaf, got);
    ASSERT_EQ(got, ref);
    ASSERT_EQ(Codec::count(leaf), ref.size());
    if (!ref.empty()) {
      ASSERT_EQ(Codec::head(leaf), ref.front());
      ASSERT_EQ(Codec::last(leaf), ref.back());
      const auto succ = Codec::successor(leaf, x);
      const auto r = std::lower_bound(ref.begin(), ref.end(), x);
      ASSERT_EQ(succ.has_value(), r != ref.end());
      if (succ) {
        ASSERT_EQ(*succ, *r);
      }
    }
  }
}

TEST(UncompressedLeaf, PointOpsMatchVector) { point_ops_against_vector<UncompressedLeaf>(64); }
TEST(CompressedLeaf, PointOpsMatchVector) { point_ops_against_vector<CompressedLeaf>(160); }

TEST(CompressedLeaf, ScanStopsPastEnd)
{
  const std::vector<Key> keys{10, 20, 30, 40};
  const auto leaf = *codec::leaf_encode(keys, 64);
  std::vector<Key> seen;
  auto f = [&seen](Key k) { seen.push_back(k); };
  const bool done = CompressedLeaf::scan(std::span<const std::uint8_t>(leaf), 15, 35, f);
  EXPECT_TRUE(done);
  EXPECT_EQ(seen, (std::vector<Key>{20, 30}));
}

}  // namespace
}  // namespace cpma
