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

#include "cpma/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string_view>

namespace cpma
{
static_assert(std::endian::native == std::endian::little, "snapshots are written in host order");

namespace
{
constexpr std::string_view kMagic = "CPMASNP1";

struct Header {
  char magic[8];
  std::uint32_t codec;
  std::uint32_t reserved;
  std::uint64_t leaf_size;
  std::uint64_t num_leaves;
  double growing_factor;
  double bounds[4];
  std::uint64_t min_leaf;
  std::uint64_t size;
};
static_assert(sizeof(Header) == 88);

template <class Codec>
constexpr std::uint32_t codec_tag()
{
  return std::is_same_v<Codec, CompressedLeaf> ? 1 : 0;
}
}  // namespace

template <class Codec>
void save_snapshot(const PackedSet<Codec> &set, std::ostream &out)
{
  const Layout &layout = set.layout();
  const auto &b = layout.config().bounds;
  Header h{};
  std::memcpy(h.magic, kMagic.data(), sizeof(h.magic));
  h.codec = codec_tag<Codec>();
  h.leaf_size = layout.leaf_size();
  h.num_leaves = layout.num_leaves();
  h.growing_factor = layout.growing_factor();
  h.bounds[0] = b.upper_leaf;
  h.bounds[1] = b.upper_root;
  h.bounds[2] = b.lower_leaf;
  h.bounds[3] = b.lower_root;
  h.min_leaf = layout.config().min_leaf;
  h.size = set.size();
  out.write(reinterpret_cast<const char *>(&h), sizeof(h));
  const auto slots = set.slots();
  out.write(reinterpret_cast<const char *>(slots.data()),
            static_cast<std::streamsize>(slots.size() * sizeof(typename Codec::slot_type)));
  if (!out) {
    throw std::runtime_error("snapshot write failed");
  }
}

template <class Codec>
PackedSet<Codec> load_snapshot(std::istream &in, BatchPolicy policy)
{
  Header h{};
  if (!in.read(reinterpret_cast<char *>(&h), sizeof(h))) {
    throw CorruptionError("snapshot header truncated");
  }
  if (std::string_view(h.magic, sizeof(h.magic)) != kMagic) {
    throw CorruptionError("bad snapshot magic");
  }
  if (h.codec != codec_tag<Codec>()) {
    throw CorruptionError("snapshot holds a different leaf codec");
  }
  LayoutConfig config;
  config.bounds = DensityBounds{h.bounds[0], h.bounds[1], h.bounds[2], h.bounds[3]};
  config.growing_factor = h.growing_factor;
  config.min_leaf = h.min_leaf;
  Layout layout;
  try {
    layout = Layout::from_geometry(h.leaf_size, h.num_leaves, config);
  } catch (const ConfigError &e) {
    throw CorruptionError(std::string("snapshot header: ") + e.what());
  }
  if (h.num_leaves > (std::uint64_t{1} << 40) || h.leaf_size > (std::uint64_t{1} << 20)) {
    throw CorruptionError("snapshot geometry out of range");
  }
  std::vector<typename Codec::slot_type> slots(layout.capacity());
  if (!in.read(reinterpret_cast<char *>(slots.data()),
               static_cast<std::streamsize>(slots.size() * sizeof(typename Codec::slot_type)))) {
    throw CorruptionError("snapshot slot array truncated");
  }
  auto set = PackedSet<Codec>::restore(layout, std::move(slots), policy);
  if (set.size() != h.size) {
    throw CorruptionError("snapshot element count mismatch");
  }
  return set;
}

template void save_snapshot(const PackedSet<UncompressedLeaf> &, std::ostream &);
template void save_snapshot(const PackedSet<CompressedLeaf> &, std::ostream &);
template PackedSet<UncompressedLeaf> load_snapshot(std::istream &, BatchPolicy);
template PackedSet<CompressedLeaf> load_snapshot(std::istream &, BatchPolicy);

}  // namespace cpma
