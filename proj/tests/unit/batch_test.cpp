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

#include "cpma/batch.hpp"
#include "cpma/oracle.hpp"
#include "cpma/packed_set.hpp"
#include "cpma/parallel.hpp"
#include "cpma/random.hpp"

namespace cpma
{
namespace
{
std::vector<Key> random_keys(std::size_t n, unsigned bits, std::uint64_t seed)
{
  SplitMix64 rng(seed);
  std::vector<Key> out(n);
  for (auto &x : out) {
    x = rng.key(bits);
  }
  return out;
}

TEST(Batch, SortDedupe)
{
  const Batch b = Batch::sort_dedupe({5, 3, 5, 9, 3});
  EXPECT_EQ(std::vector<Key>(b.keys().begin(), b.keys().end()), (std::vector<Key>{3, 5, 9}));
  EXPECT_THROW(Batch::sort_dedupe({1, 0}), DomainError);
  EXPECT_THROW(Batch::from_sorted({3, 3}), DomainError);
  EXPECT_THROW(Batch::from_sorted({4, 2}), DomainError);
  EXPECT_NO_THROW(Batch::from_sorted({2, 4}));
}

TEST(ParallelHelpers, MergeUnionAndDifference)
{
  auto a = random_keys(30000, 20, 1);
  auto b = random_keys(20000, 20, 2);
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<Key> want;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(want));
  std::vector<Key> got;
  par::merge_union<Key>(a, b, got, 512);
  EXPECT_EQ(got, want);
  want.clear();
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(want));
  par::set_difference<Key>(a, b, got, 512);
  EXPECT_EQ(got, want);
}

template <class Set>
class PhaseTest : public ::testing::Test
{
};
using SetTypes = ::testing::Types<Pma, Cpma>;
TYPED_TEST_SUITE(PhaseTest, SetTypes);

// Runs the three phases by hand and checks each against an independent computation.
template <class Set>
void run_phases(Set &set, const Batch &batch, UpdateKind kind)
{
  std::vector<Key> want = set.to_vector();
  const auto bk = batch.keys();
  std::vector<Key> expect;
  if (kind == UpdateKind::insert) {
    std::set_union(want.begin(), want.end(), bk.begin(), bk.end(), std::back_inserter(expect));
  } else {
    std::set_difference(want.begin(), want.end(), bk.begin(), bk.end(), std::back_inserter(expect));
  }

  WorkCounters counters;
  set.set_counters(&counters);
  MergeResult merged = set.merge_phase(batch, kind);
  ASSERT_EQ(merged.changed, want.size() > expect.size() ? want.size() - expect.size() : expect.size() - want.size());
  ASSERT_TRUE(std::is_sorted(merged.modified_leaves.begin(), merged.modified_leaves.end()));

  // every key now lives in exactly one leaf or overflow buffer
  std::vector<Key> after;
  std::vector<const OverflowBuffer *> by_leaf(set.layout().num_leaves(), nullptr);
  for (const auto &o : merged.overflows) {
    ASSERT_EQ(by_leaf[o.leaf], nullptr);
    by_leaf[o.leaf] = &o;
  }
  for (std::size_t l = 0; l < set.layout().num_leaves(); ++l) {
    if (by_leaf[l] != nullptr) {
      after.insert(after.end(), by_leaf[l]->elements.begin(), by_leaf[l]->elements.end());
    } else {
      std::vector<Key> tmp;
      Set::codec_type::decode(set.leaf(l), tmp);
      after.insert(after.end(), tmp.begin(), tmp.end());
    }
  }
  ASSERT_EQ(after, expect);

  const TargetSet brute = brute_force_targets(set, merged, kind);
  const CountingResult counted = set.counting_phase(merged, kind);
  ASSERT_EQ(counted.resize, brute.resize);
  if (!counted.resize) {
    ASSERT_EQ(counted.targets, brute.targets);
  }
  ASSERT_EQ(counters.snapshot().recounts, 0u);

  set.redistribute_phase(merged, counted, kind);
  set.set_counters(nullptr);
  ASSERT_EQ(set.to_vector(), expect);
  const auto report = validate(set);
  ASSERT_TRUE(report.ok()) << report.to_string();
}

TYPED_TEST(PhaseTest, UniformInsertAndErase)
{
  TypeParam set;
  set.batch_insert(random_keys(60000, 40, 3));
  for (std::uint64_t round = 0; round < 6; ++round) {
    run_phases(set, Batch::sort_dedupe(random_keys(500 + 3000 * round, 40, 100 + round)), UpdateKind::insert);
  }
  const auto present = set.to_vector();
  std::vector<Key> gone;
  for (std::size_t i = 0; i < present.size(); i += 3) {
    gone.push_back(present[i]);
  }
  gone.resize(std::min<std::size_t>(gone.size(), 20000));
  run_phases(set, Batch::sort_dedupe(std::move(gone)), UpdateKind::erase);
}

TYPED_TEST(PhaseTest, ClusteredInsertEscalates)
{
  TypeParam set;
  set.batch_insert(random_keys(40000, 40, 4));
  const Key start = set.to_vector()[20000];
  std::vector<Key> run(8000);
  for (std::size_t i = 0; i < run.size(); ++i) {
    run[i] = start + 1 + i;
  }
  run_phases(set, Batch::sort_dedupe(std::move(run)), UpdateKind::insert);
}

TYPED_TEST(PhaseTest, ErasingAContiguousBlockUnderflows)
{
  TypeParam set;
  std::vector<Key> keys(30000);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    keys[i] = 1 + 7 * i;
  }
  set.batch_insert(keys);
  std::vector<Key> gone(keys.begin() + 5000, keys.begin() + 12000);
  run_phases(set, Batch::sort_dedupe(std::move(gone)), UpdateKind::erase);
}

TYPED_TEST(PhaseTest, ThreadCountDoesNotChangeLayout)
{
  const auto base = random_keys(50000, 40, 6);
  const auto extra = random_keys(12000, 40, 7);
  std::uint64_t first = 0;
  for (int t : {1, 2, 4}) {
    const std::uint64_t sum = par::with_threads(t, [&] {
      TypeParam set;
      set.batch_insert(base);
      set.batch_insert(extra);
      return set.checksum();
    });
    if (t == 1) {
      first = sum;
    }
    EXPECT_EQ(sum, first) << t << " threads";
  }
}

}  // namespace
}  // namespace cpma
