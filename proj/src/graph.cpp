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

#include "cpma/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "cpma/random.hpp"

namespace cpma::graph
{
VertexSubset VertexSubset::all(std::size_t n)
{
  VertexSubset s;
  s.n_ = n;
  s.count_ = n;
  s.all_ = true;
  return s;
}

VertexSubset VertexSubset::from_sparse(std::size_t n, std::vector<Vertex> ids)
{
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (!ids.empty() && ids.back() >= n) {
    throw DomainError("vertex id outside the subset universe");
  }
  VertexSubset s;
  s.n_ = n;
  s.count_ = ids.size();
  s.sparse_ = std::move(ids);
  return s;
}

VertexSubset VertexSubset::from_dense(std::vector<std::uint8_t> bits)
{
  VertexSubset s;
  s.n_ = bits.size();
  s.count_ = static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
  if (s.count_ > 0) {
    s.dense_ = std::move(bits);
  }
  return s;
}

bool VertexSubset::contains(Vertex v) const
{
  if (all_) {
    return v < n_;
  }
  if (!dense_.empty()) {
    return v < n_ && dense_[v] != 0;
  }
  return std::binary_search(sparse_.begin(), sparse_.end(), v);
}

std::vector<Vertex> VertexSubset::to_sparse() const
{
  if (all_) {
    std::vector<Vertex> ids(n_);
    std::iota(ids.begin(), ids.end(), Vertex{0});
    return ids;
  }
  if (dense_.empty()) {
    return sparse_;
  }
  std::vector<Vertex> ids;
  ids.reserve(count_);
  for (std::size_t v = 0; v < n_; ++v) {
    if (dense_[v] != 0) {
      ids.push_back(static_cast<Vertex>(v));
    }
  }
  return ids;
}

FGraph::FGraph(std::size_t num_vertices) : num_vertices_{num_vertices}
{
  if (num_vertices > kVertexLimit) {
    throw DomainError("at most 2^32 vertices");
  }
}

namespace
{
std::vector<Key> edge_keys(std::span<const Edge> edges, bool symmetrize, std::size_t &num_vertices)
{
  std::vector<Key> keys(edges.size() * (symmetrize ? 2 : 1));
  std::uint64_t top = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto [u, v] = edges[i];
    if (symmetrize) {
      keys[2 * i] = encode_edge(u, v);
      keys[2 * i + 1] = encode_edge(v, u);
    } else {
      keys[i] = encode_edge(u, v);
    }
    top = std::max({top, u + 1, v + 1});
  }
  num_vertices = std::max<std::size_t>(num_vertices, top);
  return keys;
}
}  // namespace

void FGraph::insert_edges(std::span<const Edge> edges, bool symmetrize)
{
  if (edges.empty()) {
    return;
  }
  edges_.batch_insert(edge_keys(edges, symmetrize, num_vertices_));
  ++version_;
}

void FGraph::erase_edges(std::span<const Edge> edges, bool symmetrize)
{
  if (edges.empty()) {
    return;
  }
  std::size_t ignored = num_vertices_;
  edges_.batch_erase(edge_keys(edges, symmetrize, ignored));
  ++version_;
}

const VertexOffsets &FGraph::offsets() const
{
  if (!offsets_current()) {
    throw ContractViolation("vertex offsets are stale; call build_offsets() after updating");
  }
  return offsets_;
}

const VertexOffsets &FGraph::build_offsets()
{
  if (offsets_current()) {
    return offsets_;
  }
  const std::size_t leaves = edges_.layout().num_leaves();
  std::vector<std::uint64_t> start(leaves + 1, 0);
  std::vector<Key> last(leaves, 0);
  par::parallel_for(
      0, leaves,
      [&](std::size_t l) {
        const auto leaf = edges_.leaf(l);
        start[l + 1] = CompressedLeaf::count(leaf);
        last[l] = start[l + 1] == 0 ? 0 : CompressedLeaf::last(leaf);
      },
      256);
  std::partial_sum(start.begin(), start.end(), start.begin());
  // key preceding each leaf's head
  std::vector<Key> before(leaves, 0);
  for (std::size_t l = 1; l < leaves; ++l) {
    before[l] = last[l - 1] != 0 ? last[l - 1] : before[l - 1];
  }

  constexpr std::uint64_t unset = ~std::uint64_t{0};
  VertexOffsets out;
  out.num_vertices = num_vertices_;
  out.num_edges = edges_.size();
  out.offsets.assign(num_vertices_ + 1, unset);
  out.offsets[num_vertices_] = out.num_edges;
  par::parallel_for(
      0, leaves,
      [&](std::size_t l) {
        std::uint64_t pos = start[l];
        Key prev = before[l];
        CompressedLeaf::for_each(edges_.leaf(l), [&](Key k) {
          if (prev == 0 || edge_source(prev) != edge_source(k)) {
            out.offsets[edge_source(k)] = pos;
          }
          prev = k;
          ++pos;
        });
      },
      256);
  for (std::size_t v = num_vertices_; v-- > 0;) {
    if (out.offsets[v] == unset) {
      out.offsets[v] = out.offsets[v + 1];
    }
  }
  offsets_ = std::move(out);
  offsets_version_ = version_;
  return offsets_;
}

std::vector<double> pagerank(FGraph &g, int iterations, double damping)
{
  const VertexOffsets &off = g.build_offsets();
  const std::size_t n = g.num_vertices();
  if (n == 0) {
    return {};
  }
  std::vector<double> rank(n, 1.0 / static_cast<double>(n));
  std::vector<double> contrib(n);
  const double teleport = (1.0 - damping) / static_cast<double>(n);
  for (int it = 0; it < iterations; ++it) {
    par::parallel_for(
        0, n,
        [&](std::size_t v) {
          const auto deg = off.degree(static_cast<Vertex>(v));
          contrib[v] = deg == 0 ? 0.0 : rank[v] / static_cast<double>(deg);
        },
        1024);
    // neighbors are symmetric, so summing over out-neighbors gathers every in-edge
    par::parallel_for(
        0, n,
        [&](std::size_t v) {
          double sum = 0.0;
          g.map_neighbors(static_cast<Vertex>(v), [&](Vertex, Vertex u) { sum += contrib[u]; });
          rank[v] = teleport + damping * sum;
        },
        64);
  }
  return rank;
}

std::vector<Vertex> connected_components(FGraph &g)
{
  g.build_offsets();
  const std::size_t n = g.num_vertices();
  std::vector<Vertex> label(n);
  std::iota(label.begin(), label.end(), Vertex{0});
  VertexSubset frontier = VertexSubset::all(n);
  while (!frontier.is_empty()) {
    frontier = g.edge_map(
        frontier,
        [&label](Vertex src, Vertex dst) {
          const Vertex mine = std::atomic_ref<Vertex>(label[src]).load(std::memory_order_relaxed);
          std::atomic_ref<Vertex> theirs(label[dst]);
          Vertex cur = theirs.load(std::memory_order_relaxed);
          while (mine < cur) {
            if (theirs.compare_exchange_weak(cur, mine, std::memory_order_relaxed)) {
              return true;
            }
          }
          return false;
        },
        [](Vertex) { return true; });
  }
  return label;
}

std::vector<Edge> rmat_generate(std::uint64_t num_vertices, std::size_t num_edges, double a, double b, double c,
                                double d, std::uint64_t seed)
{
  if (a < 0 || b < 0 || c < 0 || d < 0 || std::abs(a + b + c + d - 1.0) > 1e-9) {
    throw DomainError("RMAT probabilities must be nonnegative and sum to 1");
  }
  if (!std::has_single_bit(num_vertices) || num_vertices > kVertexLimit) {
    throw DomainError("RMAT vertex count must be a power of two no larger than 2^32");
  }
  const unsigned levels = static_cast<unsigned>(std::countr_zero(num_vertices));
  const SplitMix64 gen(seed);
  std::vector<Edge> edges(num_edges);
  par::parallel_for(
      0, num_edges,
      [&](std::size_t i) {
        std::uint64_t u = 0;
        std::uint64_t v = 0;
        for (unsigned k = 0; k < levels; ++k) {
          const double r = static_cast<double>(gen.at(i * levels + k) >> 11) * 0x1.0p-53;
          const unsigned bit = levels - 1 - k;
          const unsigned quadrant = r < a ? 0 : r < a + b ? 1 : r < a + b + c ? 2 : 3;
          u |= std::uint64_t{quadrant >> 1} << bit;
          v |= std::uint64_t{quadrant & 1u} << bit;
        }
        edges[i] = {u, v};
      },
      4096);
  return edges;
}

}  // namespace cpma::graph
