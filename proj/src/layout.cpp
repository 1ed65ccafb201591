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

#include "cpma/layout.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace cpma
{
void validate_config(const LayoutConfig &config)
{
  const auto &b = config.bounds;
  if (!(b.lower_leaf >= 0.0 && b.lower_leaf <= b.lower_root && b.lower_root < b.upper_root &&
        b.upper_root <= b.upper_leaf && b.upper_leaf <= 1.0)) {
    throw ConfigError("density bounds must satisfy 0 <= rho_leaf <= rho_root < tau_root <= tau_leaf <= 1");
  }
  if (!(config.growing_factor > 1.0)) {
    throw ConfigError("growing factor must be > 1, got " + std::to_string(config.growing_factor));
  }
  if (!(b.upper_root / config.growing_factor > b.lower_root)) {
    throw ConfigError("tau_root / growing_factor must exceed rho_root so a growth never triggers a shrink");
  }
  if (config.min_leaf < 2) {
    throw ConfigError("min_leaf must be at least 2 slots");
  }
}

Layout::Layout(std::size_t leaf_size, std::size_t num_leaves, const LayoutConfig &config)
    : leaf_size_{leaf_size},
      num_leaves_{num_leaves},
      height_{static_cast<std::uint32_t>(std::countr_zero(num_leaves))},
      config_{config}
{
}

Layout Layout::for_capacity(std::size_t capacity_target, const LayoutConfig &config)
{
  validate_config(config);
  const std::size_t log_n = capacity_target <= 1 ? 1 : std::bit_width(capacity_target - 1);
  const std::size_t base = std::max(config.min_leaf, log_n);
  if (capacity_target <= base) {
    return Layout{base, 1, config};
  }
  // Largest power of two with num_leaves * base <= target; leaf_size then lands in [base, 2*base).
  const std::size_t num_leaves = std::bit_floor(capacity_target / base);
  const std::size_t leaf_size = (capacity_target + num_leaves - 1) / num_leaves;
  return Layout{leaf_size, num_leaves, config};
}

Layout Layout::for_elements(std::size_t slots_needed, const LayoutConfig &config)
{
  validate_config(config);
  const double target = std::ceil(static_cast<double>(slots_needed) / config.bounds.upper_root);
  return for_capacity(static_cast<std::size_t>(target), config);
}

Layout Layout::from_geometry(std::size_t leaf_size, std::size_t num_leaves, const LayoutConfig &config)
{
  validate_config(config);
  if (!std::has_single_bit(num_leaves) || leaf_size < config.min_leaf) {
    throw ConfigError("num_leaves must be a power of two and leaf_size at least min_leaf");
  }
  return Layout{leaf_size, num_leaves, config};
}

double Layout::upper_bound(std::uint32_t level) const
{
  if (level > height_) {
    throw ContractViolation("level out of range");
  }
  const auto &b = config_.bounds;
  if (height_ == 0) {
    return b.upper_root;
  }
  return b.upper_leaf - (b.upper_leaf - b.upper_root) * level / height_;
}

double Layout::lower_bound(std::uint32_t level) const
{
  if (level > height_) {
    throw ContractViolation("level out of range");
  }
  const auto &b = config_.bounds;
  if (height_ == 0) {
    return b.lower_root;
  }
  return b.lower_leaf + (b.lower_root - b.lower_leaf) * level / height_;
}

bool Layout::contains(NodeId node) const { return node.level <= height_ && node.index < nodes_at(node.level); }

Region Layout::region(NodeId node) const
{
  const auto [first, last] = leaves_of(node);
  return Region{first * leaf_size_, last * leaf_size_};
}

std::pair<std::size_t, std::size_t> Layout::leaves_of(NodeId node) const
{
  if (!contains(node)) {
    throw ContractViolation("node outside the tree");
  }
  const std::size_t first = node.index << node.level;
  return {first, first + (std::size_t{1} << node.level)};
}

NodeId Layout::parent(NodeId node) const
{
  if (!contains(node) || node.level == height_) {
    throw ContractViolation("parent of the root or of an invalid node");
  }
  return NodeId{node.level + 1, node.index >> 1};
}

NodeId Layout::sibling(NodeId node) const
{
  if (!contains(node) || node.level == height_) {
    throw ContractViolation("the root has no sibling");
  }
  return NodeId{node.level, node.index ^ 1};
}

std::pair<NodeId, NodeId> Layout::children(NodeId node) const
{
  if (!contains(node) || node.level == 0) {
    throw ContractViolation("leaves have no children");
  }
  return {NodeId{node.level - 1, node.index << 1}, NodeId{node.level - 1, (node.index << 1) | 1}};
}

NodeId Layout::leaf_of(std::size_t slot) const
{
  if (slot >= capacity()) {
    throw ContractViolation("slot outside the array");
  }
  return NodeId{0, slot / leaf_size_};
}

}  // namespace cpma
