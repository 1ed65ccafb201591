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

#ifndef CPMA_SNAPSHOT_HPP
#define CPMA_SNAPSHOT_HPP

#include <iosfwd>

#include "cpma/packed_set.hpp"

namespace cpma
{
/**
 * Binary snapshot: an 88-byte little-endian header (magic "CPMASNP1", codec tag, leaf_size,
 * num_leaves, growing factor, the four density bounds, min_leaf, element count) followed by the
 * raw slot array, byte-identical to the in-memory leaf layout.
 */
template <class Codec>
void save_snapshot(const PackedSet<Codec> &set, std::ostream &out);

/// Reads and fully validates a snapshot; throws CorruptionError on any mismatch.
template <class Codec>
PackedSet<Codec> load_snapshot(std::istream &in, BatchPolicy policy = {});

}  // namespace cpma

#endif  // CPMA_SNAPSHOT_HPP
