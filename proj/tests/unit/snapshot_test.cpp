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

#include <cstring>
#include <sstream>
#include <string>

#include "cpma/random.hpp"
#include "cpma/snapshot.hpp"

namespace cpma
{
namespace
{
template <class Set>
Set sample(std::size_t n)
{
  Set set;
  SplitMix64 rng(21);
  std::vector<Key> keys(n);
  for (auto &k : keys) {
    k = rng.key(44);
  }
  set.batch_insert(keys);
  return set;
}

template <class Set>
std::string bytes_of(const Set &set)
{
  std::ostringstream out;
  save_snapshot(set, out);
  return out.str();
}

template <class Codec>
PackedSet<Codec> load(const std::string &bytes)
{
  std::istringstream in(bytes);
  return load_snapshot<Codec>(in);
}

void put_u64(std::string &bytes, std::size_t offset, std::uint64_t v) { std::memcpy(bytes.data() + offset, &v, 8); }

TEST(Snapshot, RoundTripBothCodecs)
{
  const Pma pma = sample<Pma>(30000);
  const Pma pma_back = load<UncompressedLeaf>(bytes_of(pma));
  EXPECT_EQ(pma_back.checksum(), pma.checksum());
  EXPECT_EQ(pma_back.to_vector(), pma.to_vector());

  const Cpma cpma = sample<Cpma>(30000);
  const std::string bytes = bytes_of(cpma);
  EXPECT_EQ(bytes.size(), 88 + cpma.capacity());
  EXPECT_EQ(bytes.substr(0, 8), "CPMASNP1");
  Cpma back = load<CompressedLeaf>(bytes);
  EXPECT_EQ(back.checksum(), cpma.checksum());
  EXPECT_EQ(back.layout(), cpma.layout());
  // the restored set stays usable
  back.insert(12345);
  EXPECT_TRUE(back.contains(12345));
}

TEST(Snapshot, EmptySet)
{
  const Cpma empty;
  EXPECT_TRUE(load<CompressedLeaf>(bytes_of(empty)).empty());
}

TEST(Snapshot, RejectsCorruption)
{
  const std::string good = bytes_of(sample<Cpma>(5000));

  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(load<CompressedLeaf>(bad), CorruptionError);

  EXPECT_THROW(load<UncompressedLeaf>(good), CorruptionError);

  EXPECT_THROW(load<CompressedLeaf>(good.substr(0, 40)), CorruptionError);
  EXPECT_THROW(load<CompressedLeaf>(good.substr(0, good.size() - 1)), CorruptionError);

  bad = good;
  put_u64(bad, 24, 3);  // num_leaves not a power of two
  EXPECT_THROW(load<CompressedLeaf>(bad), CorruptionError);

  bad = good;
  put_u64(bad, 24, std::uint64_t{1} << 60);  // absurd size, must fail before allocating
  EXPECT_THROW(load<CompressedLeaf>(bad), CorruptionError);

  bad = good;
  put_u64(bad, 80, 7);  // element count
  EXPECT_THROW(load<CompressedLeaf>(bad), CorruptionError);

  bad = good;
  std::memset(bad.data() + 88, 0, 8);  // leaf 0 loses its head but keeps its deltas
  EXPECT_THROW(load<CompressedLeaf>(bad), CorruptionError);
}

}  // namespace
}  // namespace cpma
