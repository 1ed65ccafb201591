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

#ifndef CPMA_LAYOUT_HPP
#define CPMA_LAYOUT_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <utility>

#include "cpma/common.hpp"

namespace cpma
{
/**
 * Upper (tau) and lower (rho) density bounds at the leaves and at the root.
 *
 * Bounds are interpolated linearly in the tree level. Upper bounds tighten and lower bounds
 * loosen toward the root: rho_leaf <= rho_root < tau_root <= tau_leaf.
 */
struct DensityBounds {
  double upper_leaf = 0.9;
  double upper_root = 0.75;
  double lower_leaf = 0.1;
  double lower_root = 0.25;
};

struct LayoutConfig {
  DensityBounds bounds{};
  double growing_factor = 1.2;
  /// Minimum leaf size in slots (cells for the PMA, bytes for the CPMA).
  std::size_t min_leaf = 32;
};

/// Throws ConfigError when the bounds are misordered or a growth could immediately trigger a shrink.
void validate_config(const LayoutConfig &config);

/// Address of a node of the implicit tree: level 0 is a leaf, level `height` is the root.
struct NodeId {
  std::uint32_t level = 0;
  std::uint64_t index = 0;

  friend constexpr auto operator<=>(const NodeId &, const NodeId &) = default;
};

/// Half-open slot range [begin, end).
struct Region {
  std::size_t begin = 0;
  std::size_t end = 0;

  [[nodiscard]] constexpr std::size_t size() const { return end - begin; }
};

/**
 * Geometry of a packed array: `num_leaves` (a power of two) leaves of `leaf_size` slots each,
 * plus the density schedule of the perfect binary tree over them.
 */
class Layout
{
 public:
  Layout() : Layout(for_capacity(0, LayoutConfig{})) {}

  /// Smallest layout whose capacity is at least `capacity_target`.
  static Layout for_capacity(std::size_t capacity_target, const LayoutConfig &config);

  /// Smallest layout that holds `slots_needed` occupied slots at root density <= tau_root.
  static Layout for_elements(std::size_t slots_needed, const LayoutConfig &config);

  /// Explicit geometry, e.g. from a snapshot header. Throws ConfigError unless num_leaves is a
  /// power of two and leaf_size >= min_leaf.
  static Layout from_geometry(std::size_t leaf_size, std::size_t num_leaves, const LayoutConfig &config);

  [[nodiscard]] std::size_t capacity() const { return leaf_size_ * num_leaves_; }
  [[nodiscard]] std::size_t leaf_size() const { return leaf_size_; }
  [[nodiscard]] std::size_t num_leaves() const { return num_leaves_; }
  [[nodiscard]] std::uint32_t height() const { return height_; }
  [[nodiscard]] const LayoutConfig &config() const { return config_; }
  [[nodiscard]] double growing_factor() const { return config_.growing_factor; }

  /// True for the layout `for_capacity(0)` returns; lower bounds are not enforced there.
  [[nodiscard]] bool is_minimal() const { return num_leaves_ == 1 && leaf_size_ <= minimal_leaf(); }

  [[nodiscard]] double upper_bound(std::uint32_t level) const;
  [[nodiscard]] double lower_bound(std::uint32_t level) const;

  /// Occupied-slot counts allowed at `level`: a node violates when count > max or count < min.
  [[nodiscard]] bool exceeds_upper(std::uint32_t level, std::size_t count) const
  {
    return static_cast<double>(count) > upper_bound(level) * static_cast<double>(region_size(level));
  }
  [[nodiscard]] bool below_lower(std::uint32_t level, std::size_t count) const
  {
    return static_cast<double>(count) < lower_bound(level) * static_cast<double>(region_size(level));
  }

  [[nodiscard]] NodeId root() const { return NodeId{height_, 0}; }
  [[nodiscard]] std::size_t region_size(std::uint32_t level) const { return leaf_size_ << level; }
  [[nodiscard]] std::uint64_t nodes_at(std::uint32_t level) const { return num_leaves_ >> level; }
  [[nodiscard]] Region region(NodeId node) const;
  /// Leaf index range [first, last) covered by `node`.
  [[nodiscard]] std::pair<std::size_t, std::size_t> leaves_of(NodeId node) const;
  [[nodiscard]] bool contains(NodeId node) const;

  [[nodiscard]] NodeId parent(NodeId node) const;
  [[nodiscard]] NodeId sibling(NodeId node) const;
  [[nodiscard]] std::pair<NodeId, NodeId> children(NodeId node) const;
  [[nodiscard]] NodeId leaf_of(std::size_t slot) const;
  /// True when `ancestor` covers `node` (a node covers itself).
  [[nodiscard]] static bool covers(NodeId ancestor, NodeId node)
  {
    return ancestor.level >= node.level && (node.index >> (ancestor.level - node.level)) == ancestor.index;
  }

  friend bool operator==(const Layout &a, const Layout &b)
  {
    return a.leaf_size_ == b.leaf_size_ && a.num_leaves_ == b.num_leaves_;
  }

 private:
  Layout(std::size_t leaf_size, std::size_t num_leaves, const LayoutConfig &config);

  [[nodiscard]] std::size_t minimal_leaf() const { return config_.min_leaf; }

  std::size_t leaf_size_;
  std::size_t num_leaves_;
  std::uint32_t height_;
  LayoutConfig config_;
};

}  // namespace cpma

#endif  // CPMA_LAYOUT_HPP
