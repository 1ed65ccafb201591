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

#include <vector>

#include "cpma/oracle.hpp"
#include "cpma/packed_set.hpp"

namespace cpma
{
namespace
{
TEST(RefSet, Basics)
{
  RefSet ref;
  EXPECT_TRUE(ref.insert(5));
  EXPECT_FALSE(ref.insert(5));
  EXPECT_TRUE(ref.insert(2));
  EXPECT_EQ(ref.successor(3), Key{5});
  EXPECT_FALSE(ref.successor(6).has_value());
  ref.batch_insert({9, 1, 9});
  EXPECT_EQ(ref.elements(), (std::vector<Key>{1, 2, 5, 9}));
  EXPECT_EQ(ref.range_sum(2, 9), 7u);
  ref.batch_erase({2, 3});
  EXPECT_EQ(ref.elements(), (std::vector<Key>{1, 5, 9}));
  EXPECT_TRUE(ref.erase(1));
  EXPECT_FALSE(ref.contains(1));
}

TEST(RefSet, ScriptAnswersMatchApplyOp)
{
  std::vector<Op> ops{
      {OpKind::insert, 10, 0, {}},         {OpKind::insert, 10, 0, {}},       {OpKind::batch_insert, 0, 0, {3, 4, 3}},
      {OpKind::search, 5, 0, {}},          {OpKind::range_sum, 1, 11, {}},    {OpKind::erase, 4, 0, {}},
      {OpKind::batch_erase, 0, 0, {3, 7}}, {OpKind::search, 11, 0, {}},
  };
  const RefRun run = ref_apply(ops);
  EXPECT_EQ(run.answers, (std::vector<Answer>{1, 0, 3, 10, 17, 1, 1, 0}));
  Cpma set;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    EXPECT_EQ(apply_op(set, ops[i]), run.answers[i]) << i;
  }
}

Pma pma_from_leaves(const std::vector<std::vector<Key>> &leaves, std::size_t leaf_size)
{
  const Layout layout = Layout::from_geometry(leaf_size, leaves.size(), Pma::default_config());
  std::vector<Key> slots(layout.capacity(), 0);
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    std::copy(leaves[l].begin(), leaves[l].end(), slots.begin() + static_cast<long>(l * leaf_size));
  }
  return Pma::restore(layout, std::move(slots));
}

std::vector<Key> run_of(Key start, std::size_t n)
{
  std::vector<Key> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = start + i;
  }
  return out;
}

TEST(Validate, AcceptsBalancedLayout)
{
  const Pma set = pma_from_leaves({run_of(1, 16), run_of(100, 16), run_of(200, 16), run_of(300, 16)}, 32);
  const auto report = validate(set);
  EXPECT_TRUE(report.ok()) << report.to_string();
  EXPECT_EQ(report.elements, 64u);
}

TEST(Validate, FlagsOverfullLeaf)
{
  const Pma set = pma_from_leaves({run_of(1, 16), run_of(100, 32), run_of(200, 16), run_of(300, 16)}, 32);
  const auto report = validate(set);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front().node, (NodeId{0, 1}));
  EXPECT_DOUBLE_EQ(report.violations.front().measured, 32.0);
}

TEST(Validate, FlagsEmptyLeafInLargeArray)
{
  const Pma set = pma_from_leaves({run_of(1, 16), {}, run_of(200, 16), run_of(300, 16)}, 32);
  const auto report = validate(set);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front().node, (NodeId{0, 1}));
}

TEST(Validate, RestoreRejectsOutOfOrderLeaves)
{
  EXPECT_THROW(pma_from_leaves({run_of(100, 8), run_of(1, 8)}, 32), CorruptionError);
}

TEST(BruteForceTargets, OverflowingLeafEscalatesToParent)
{
  Pma set = pma_from_leaves({run_of(1, 16), run_of(100, 26), run_of(200, 8), run_of(300, 16)}, 32);
  const Batch batch = Batch::sort_dedupe(run_of(130, 8));
  MergeResult merged = set.merge_phase(batch, UpdateKind::insert);
  ASSERT_EQ(merged.overflows.size(), 1u);
  const TargetSet targets = brute_force_targets(set, merged, UpdateKind::insert);
  EXPECT_FALSE(targets.resize);
  // leaf 1 holds 34 > 32 slots; its parent holds 50 of 64, under the level-1 bound
  ASSERT_EQ(targets.targets.size(), 1u);
  EXPECT_EQ(targets.targets.front(), (NodeId{1, 0}));
  const CountingResult counted = set.counting_phase(merged, UpdateKind::insert);
  EXPECT_EQ(counted.targets, targets.targets);
  set.redistribute_phase(merged, counted, UpdateKind::insert);
  EXPECT_TRUE(validate(set).ok());
  EXPECT_EQ(set.size(), 74u);
}

}  // namespace
}  // namespace cpma
