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

#include "cpma/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iterator>
#include <sstream>

namespace cpma
{
bool RefSet::insert(Key x)
{
  const auto it = std::lower_bound(elements_.begin(), elements_.end(), x);
  if (it != elements_.end() && *it == x) {
    return false;
  }
  elements_.insert(it, x);
  return true;
}

bool RefSet::erase(Key x)
{
  const auto it = std::lower_bound(elements_.begin(), elements_.end(), x);
  if (it == elements_.end() || *it != x) {
    return false;
  }
  elements_.erase(it);
  return true;
}

bool RefSet::contains(Key x) const { return std::binary_search(elements_.begin(), elements_.end(), x); }

std::optional<Key> RefSet::successor(Key x) const
{
  const auto it = std::lower_bound(elements_.begin(), elements_.end(), x);
  if (it == elements_.end()) {
    return std::nullopt;
  }
  return *it;
}

std::uint64_t RefSet::range_sum(Key start, Key end) const
{
  std::uint64_t sum = 0;
  for (auto it = std::lower_bound(elements_.begin(), elements_.end(), start); it != elements_.end() && *it < end; ++it) {
    sum += *it;
  }
  return sum;
}

void RefSet::batch_insert(std::vector<Key> keys)
{
  std::sort(keys.begin(), keys.end());
  std::vector<Key> out;
  out.reserve(elements_.size() + keys.size());
  std::set_union(elements_.begin(), elements_.end(), keys.begin(), keys.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  elements_ = std::move(out);
}

void RefSet::batch_erase(std::vector<Key> keys)
{
  std::sort(keys.begin(), keys.end());
  std::vector<Key> out;
  out.reserve(elements_.size());
  std::set_difference(elements_.begin(), elements_.end(), keys.begin(), keys.end(), std::back_inserter(out));
  elements_ = std::move(out);
}

Answer ref_step(RefSet &ref, const Op &op)
{
  switch (op.kind) {
    case OpKind::insert:
      if (op.a == 0) {
        throw DomainError("key 0 is reserved as the empty sentinel");
      }
      return ref.insert(op.a) ? 1 : 0;
    case OpKind::erase:
      return ref.erase(op.a) ? 1 : 0;
    case OpKind::search:
      return ref.successor(std::max<Key>(op.a, 1)).value_or(0);
    case OpKind::range_sum:
      return ref.range_sum(op.a, op.b);
    case OpKind::batch_insert:
      ref.batch_insert(op.keys);
      return ref.size();
    case OpKind::batch_erase:
      ref.batch_erase(op.keys);
      return ref.size();
  }
  return 0;
}

RefRun ref_apply(std::span<const Op> ops)
{
  RefRun run;
  run.answers.reserve(ops.size());
  for (const Op &op : ops) {
    run.answers.push_back(ref_step(run.state, op));
  }
  return run;
}

std::string Violation::to_string() const
{
  std::ostringstream out;
  out << rule << " at node (level " << node.level << ", index " << node.index << "): expected " << expected
      << ", measured " << measured;
  if (!detail.empty()) {
    out << " [" << detail << "]";
  }
  return out.str();
}

std::string ValidationReport::to_string() const
{
  if (ok()) {
    return "clean (" + std::to_string(elements) + " elements)";
  }
  std::ostringstream out;
  out << violations.size() << " violation(s)";
  for (std::size_t i = 0; i < violations.size() && i < 16; ++i) {
    out << "\n  " << violations[i].to_string();
  }
  return out.str();
}

namespace
{
std::size_t varint_bytes(std::uint64_t v)
{
  std::size_t n = 1;
  while (v >= 0x80) {
    v >>= 7;
    ++n;
  }
  return n;
}

struct LeafScan {
  std::size_t occupancy = 0;  // cells or bytes
  std::size_t count = 0;
  Key first = 0;
  Key last = 0;
  std::string fault;
};

// Independent checked walks over one leaf; they never read outside the span.
LeafScan scan_leaf(std::span<const Key> leaf)
{
  LeafScan s;
  std::size_t i = 0;
  for (; i < leaf.size() && leaf[i] != 0; ++i) {
    if (i > 0 && leaf[i] <= leaf[i - 1]) {
      s.fault = "cells out of order at " + std::to_string(i);
      return s;
    }
  }
  s.count = i;
  s.occupancy = i;
  if (i > 0) {
    s.first = leaf[0];
    s.last = leaf[i - 1];
  }
  Key acc = 0;
  for (std::size_t j = i; j < leaf.size(); ++j) {
    acc |= leaf[j];
  }
  if (acc != 0) {
    s.fault = "nonzero cell in free space after " + std::to_string(i);
  }
  return s;
}

bool all_zero(const std::uint8_t *p, std::size_t n)
{
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    acc |= p[i];
  }
  return acc == 0;
}

LeafScan scan_leaf(std::span<const std::uint8_t> leaf)
{
  LeafScan s;
  if (leaf.size() < 8) {
    s.fault = "leaf shorter than its head";
    return s;
  }
  Key head = 0;
  for (int b = 7; b >= 0; --b) {
    head = (head << 8) | leaf[static_cast<std::size_t>(b)];
  }
  std::size_t pos = 8;
  if (head != 0) {
    s.first = head;
    s.last = head;
    s.count = 1;
    const auto *zero = static_cast<const std::uint8_t *>(std::memchr(leaf.data() + pos, 0, leaf.size() - pos));
    const std::size_t run = zero == nullptr ? leaf.size() : static_cast<std::size_t>(zero - leaf.data());
    while (pos < run) {
      std::uint64_t delta = 0;
      unsigned shift = 0;
      const std::size_t begin = pos;
      if (pos + 8 <= run) {
        // up to 8-byte varints: the terminator is the first byte with a clear high bit
        std::uint64_t word = 0;
        std::memcpy(&word, leaf.data() + pos, 8);
        const std::uint64_t stops = ~word & 0x8080808080808080ULL;
        if (stops != 0) {
          const std::size_t len = static_cast<std::size_t>(std::countr_zero(stops)) / 8 + 1;
          for (std::size_t i = 0; i < len; ++i) {
            delta |= ((word >> (8 * i)) & 0x7F) << (7 * i);
          }
          pos += len;
          shift = 64;
        }
      }
      for (; shift < 64;) {
        if (pos == run) {
          s.fault = "truncated varint at byte " + std::to_string(begin);
          return s;
        }
        const std::uint8_t byte = leaf[pos++];
        if (shift == 63 && byte > 1) {
          s.fault = "varint wider than 64 bits at byte " + std::to_string(begin);
          return s;
        }
        delta |= std::uint64_t{byte & 0x7Fu} << shift;
        if (byte < 0x80) {
          break;
        }
        shift += 7;
      }
      if (delta > ~Key{0} - s.last) {
        s.fault = "delta overflows the key range at byte " + std::to_string(begin);
        return s;
      }
      if (pos - begin != varint_bytes(delta)) {
        s.fault = "non-minimal varint at byte " + std::to_string(begin);
        return s;
      }
      s.last += delta;
      ++s.count;
    }
    s.occupancy = pos;
  }
  if (!all_zero(leaf.data() + pos, leaf.size() - pos)) {
    s.fault = "nonzero byte in free space after offset " + std::to_string(pos);
  }
  return s;
}

template <class Codec>
std::vector<std::size_t> recount_leaves(const PackedSet<Codec> &set, const MergeResult &merged)
{
  const Layout &layout = set.layout();
  std::vector<std::size_t> occ(layout.num_leaves());
  for (std::size_t l = 0; l < layout.num_leaves(); ++l) {
    occ[l] = scan_leaf(set.leaf(l)).occupancy;
  }
  for (const OverflowBuffer &b : merged.overflows) {
    std::size_t bytes = 0;
    if constexpr (std::is_same_v<Codec, CompressedLeaf>) {
      bytes = b.elements.empty() ? 0 : 8;
      for (std::size_t i = 1; i < b.elements.size(); ++i) {
        bytes += varint_bytes(b.elements[i] - b.elements[i - 1]);
      }
    } else {
      bytes = b.elements.size();
    }
    occ[b.leaf] = bytes;
  }
  return occ;
}

}  // namespace

template <class Codec>
ValidationReport validate(const PackedSet<Codec> &set)
{
  ValidationReport report;
  const Layout &layout = set.layout();
  const std::size_t L = layout.leaf_size();
  const double g = static_cast<double>(Codec::granule);
  const double upper = std::min(static_cast<double>(L), std::floor(layout.upper_bound(0) * static_cast<double>(L)) + g);
  const double lower = layout.lower_bound(0) * static_cast<double>(L) - g;
  const bool check_lower = layout.num_leaves() > 1;

  if (set.slots().size() != layout.capacity()) {
    report.violations.push_back(
        {layout.root(), "slot array size", double(layout.capacity()), double(set.slots().size()), ""});
    return report;
  }
  Key prev = 0;
  std::size_t total = 0;
  for (std::size_t l = 0; l < layout.num_leaves(); ++l) {
    const NodeId node{0, l};
    const LeafScan s = scan_leaf(set.leaf(l));
    if (!s.fault.empty()) {
      report.violations.push_back({node, "codec", 0, 0, s.fault});
      continue;
    }
    const auto occ = static_cast<double>(s.occupancy);
    if (occ > upper) {
      report.violations.push_back({node, "upper density", upper, occ, ""});
    }
    if (check_lower && occ < lower) {
      report.violations.push_back({node, "lower density", lower, occ, ""});
    }
    if (s.count > 0) {
      if (s.first <= prev) {
        report.violations.push_back({node, "head order", double(prev), double(s.first), "head not above predecessor"});
      }
      prev = s.last;
    }
    total += s.count;
  }
  report.elements = total;
  if (total != set.size()) {
    report.violations.push_back({layout.root(), "size", double(set.size()), double(total), "size() disagrees"});
  }
  return report;
}

template <class Codec>
TargetSet brute_force_targets(const PackedSet<Codec> &set, const MergeResult &merged, UpdateKind kind)
{
  TargetSet result;
  const Layout &layout = set.layout();
  const std::vector<std::size_t> occ = recount_leaves(set, merged);
  auto count = [&](NodeId node) {
    const std::size_t width = std::size_t{1} << node.level;
    std::size_t sum = 0;
    for (std::size_t l = node.index * width; l < (node.index + 1) * width; ++l) {
      sum += occ[l];
    }
    return sum;
  };
  auto violates = [&](NodeId node) {
    const auto c = static_cast<double>(count(node));
    const double cells = static_cast<double>(layout.leaf_size() << node.level);
    return kind == UpdateKind::insert ? c > layout.upper_bound(node.level) * cells
                                      : c < layout.lower_bound(node.level) * cells;
  };
  std::vector<NodeId> found;
  for (std::size_t l : merged.modified_leaves) {
    NodeId node{0, l};
    if (!violates(node)) {
      continue;
    }
    bool compliant = false;
    while (node.level < layout.height()) {
      node = NodeId{node.level + 1, node.index / 2};
      if (!violates(node)) {
        compliant = true;
        break;
      }
    }
    if (!compliant) {
      result.resize = true;
      result.targets.clear();
      return result;
    }
    found.push_back(node);
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  for (const NodeId &n : found) {
    const bool covered = std::any_of(found.begin(), found.end(), [&](const NodeId &a) {
      return a.level > n.level && (n.index >> (a.level - n.level)) == a.index;
    });
    if (!covered) {
      result.targets.push_back(n);
    }
  }
  std::sort(result.targets.begin(), result.targets.end(), [](const NodeId &a, const NodeId &b) {
    return (a.index << a.level) < (b.index << b.level);
  });
  return result;
}

template ValidationReport validate(const PackedSet<UncompressedLeaf> &);
template ValidationReport validate(const PackedSet<CompressedLeaf> &);
template TargetSet brute_force_targets(const PackedSet<UncompressedLeaf> &, const MergeResult &, UpdateKind);
template TargetSet brute_force_targets(const PackedSet<CompressedLeaf> &, const MergeResult &, UpdateKind);

}  // namespace cpma
