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

#include <bit>

#include "cpma/common.hpp"
#include "cpma/layout.hpp"

namespace cpma
{
namespace
{
TEST(Layout, CapacityGeometry)
{
  LayoutConfig config;
  for (std::size_t target : {1u, 31u, 32u, 100u, 4096u, 100000u, 1234567u}) {
    const Layout layout = Layout::for_capacity(target, config);
    EXPECT_TRUE(std::has_single_bit(layout.num_leaves())) << target;
    EXPECT_GE(layout.capacity(), target);
    EXPECT_GE(layout.leaf_size(), config.min_leaf);
    if (layout.num_leaves() > 1) {
      // leaf size lands in [base, 2 * base)
      const std::size_t base = std::max<std::size_t>(config.min_leaf, std::bit_width(target - 1));
      EXPECT_LT(layout.leaf_size(), 2 * base) << target;
    }
  }
}

TEST(Layout, BoundsAreLinearInLevel)
{
  LayoutConfig config;
  const Layout layout = Layout::for_capacity(32 * 16, config);
  ASSERT_EQ(layout.num_leaves(), 16u);
  ASSERT_EQ(layout.height(), 4u);
  EXPECT_DOUBLE_EQ(layout.upper_bound(0), 0.9);
  EXPECT_DOUBLE_EQ(layout.upper_bound(4), 0.75);
  EXPECT_DOUBLE_EQ(layout.upper_bound(2), 0.825);
  EXPECT_DOUBLE_EQ(layout.lower_bound(0), 0.1);
  EXPECT_DOUBLE_EQ(layout.lower_bound(4), 0.25);
  EXPECT_THROW(static_cast<void>(layout.upper_bound(5)), ContractViolation);
}

TEST(Layout, SingleLeafUsesRootBounds)
{
  const Layout layout = Layout::for_capacity(0, LayoutConfig{});
  EXPECT_EQ(layout.height(), 0u);
  EXPECT_DOUBLE_EQ(layout.upper_bound(0), 0.75);
  EXPECT_TRUE(layout.is_minimal());
}

TEST(Layout, TreeNavigation)
{
  const Layout layout = Layout::from_geometry(40, 8, LayoutConfig{});
  const NodeId leaf{0, 5};
  EXPECT_EQ(layout.parent(leaf), (NodeId{1, 2}));
  EXPECT_EQ(layout.sibling(leaf), (NodeId{0, 4}));
  const auto [l, r] = layout.children(NodeId{1, 2});
  EXPECT_EQ(l, (NodeId{0, 4}));
  EXPECT_EQ(r, (NodeId{0, 5}));
  EXPECT_EQ(layout.region(NodeId{1, 2}).begin, 160u);
  EXPECT_EQ(layout.region(NodeId{1, 2}).end, 240u);
  EXPECT_EQ(layout.leaf_of(239), (NodeId{0, 5}));
  EXPECT_EQ(layout.root(), (NodeId{3, 0}));
  EXPECT_THROW(static_cast<void>(layout.parent(layout.root())), ContractViolation);
  EXPECT_TRUE(Layout::covers(layout.root(), leaf));
  EXPECT_FALSE(Layout::covers(NodeId{1, 0}, leaf));
}

TEST(Layout, RejectsBadConfig)
{
  LayoutConfig config;
  config.growing_factor = 1.0;
  EXPECT_THROW(Layout::for_capacity(100, config), ConfigError);
  config = {};
  config.bounds.upper_root = 0.95;
  EXPECT_THROW(Layout::for_capacity(100, config), ConfigError);
  config = {};
  config.bounds.lower_root = 0.5;
  config.bounds.upper_root = 0.45;
  EXPECT_THROW(Layout::for_capacity(100, config), ConfigError);
  EXPECT_THROW(Layout::from_geometry(40, 6, LayoutConfig{}), ConfigError);
  EXPECT_THROW(Layout::from_geometry(8, 4, LayoutConfig{}), ConfigError);
}

}  // namespace
}  // namespace cpma
