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

#ifndef CPMA_ORACLE_HPP
#define CPMA_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpma/batch.hpp"
#include "cpma/common.hpp"
#include "cpma/layout.hpp"
#include "cpma/packed_set.hpp"

namespace cpma
{
/// Reference ordered set: a plain sorted vector manipulated directly.
class RefSet
{
 public:
  bool insert(Key x);
  bool erase(Key x);
  [[nodiscard]] bool contains(Key x) const;
  [[nodiscard]] std::optional<Key> successor(Key x) const;
  [[nodiscard]] std::uint64_t range_sum(Key start, Key end) const;
  void batch_insert(std::vector<Key> keys);
  void batch_erase(std::vector<Key> keys);

  [[nodiscard]] const std::vector<Key> &elements() const { return elements_; }
  [[nodiscard]] std::size_t size() const { return elements_.size(); }

 private:
  std::vector<Key> elements_;
};

enum class OpKind { insert, erase, search, range_sum, batch_insert, batch_erase };

struct Op {
  OpKind kind = OpKind::search;
  Key a = 0;
  Key b = 0;
  std::vector<Key> keys;  // batch ops only, unsorted and possibly repeating
};

/// insert/erase: 1 if the set changed; search: the successor or 0; range_sum: the sum;
/// batch ops: the size afterwards.
using Answer = std::uint64_t;

Answer ref_step(RefSet &ref, const Op &op);

struct RefRun {
  RefSet state;
  std::vector<Answer> answers;
};
RefRun ref_apply(std::span<const Op> ops);

/// Applies one scripted operation to a structure under test, answering like ref_step.
template <class Set>
Answer apply_op(Set &set, const Op &op)
{
  switch (op.kind) {
    case OpKind::insert:
      return set.insert(op.a) ? 1 : 0;
    case OpKind::erase:
      return set.erase(op.a) ? 1 : 0;
    case OpKind::search:
      return set.search(op.a).value_or(0);
    case OpKind::range_sum:
      return set.range_sum(op.a, op.b);
    case OpKind::batch_insert:
      set.batch_insert(op.keys);
      return set.size();
    case OpKind::batch_erase:
      set.batch_erase(op.keys);
      return set.size();
  }
  return 0;
}

struct Violation {
  NodeId node;
  std::string rule;
  double expected = 0.0;
  double measured = 0.0;
  std::string detail;

  [[nodiscard]] std::string to_string() const;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t elements = 0;

  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] std::string to_string() const;
};

/**
 * Full structural check of a quiescent set. Every leaf is decoded with bounds checks and its
 * occupancy recounted independently; reports sorted-order, head, padding and codec faults,
 * leaf occupancy outside [rho(0) L - g, min(L, tau(0) L + g)] (g = one codec granule, lower
 * side skipped for a single leaf), and a size() mismatch.
 */
template <class Codec>
ValidationReport validate(const PackedSet<Codec> &set);

struct TargetSet {
  std::vector<NodeId> targets;  ///< ordered by region start
  bool resize = false;
};

/// Recounts every node from scratch and returns, for each modified leaf violating its bound,
/// its lowest compliant ancestor, reduced to maximal disjoint nodes.
template <class Codec>
TargetSet brute_force_targets(const PackedSet<Codec> &set, const MergeResult &merged, UpdateKind kind);

}  // namespace cpma

#endif  // CPMA_ORACLE_HPP
