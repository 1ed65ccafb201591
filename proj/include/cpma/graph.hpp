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

#ifndef CPMA_GRAPH_HPP
#define CPMA_GRAPH_HPP

#include <atomic>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cpma/common.hpp"
#include "cpma/packed_set.hpp"

namespace cpma::graph
{
using Vertex = std::uint32_t;
using Edge = std::pair<std::uint64_t, std::uint64_t>;

inline constexpr std::uint64_t kVertexLimit = std::uint64_t{1} << 32;

/// Packs edge (u, v) into one set key: source in the high word, destination in the low word,
/// shifted by one so that (0, 0) is not the empty sentinel.
constexpr Key encode_edge(std::uint64_t u, std::uint64_t v)
{
  if (u >= kVertexLimit || v >= kVertexLimit) {
    throw DomainError("vertex id must be below 2^32");
  }
  if (u == kVertexLimit - 1 && v == kVertexLimit - 1) {
    throw DomainError("the self loop on vertex 2^32 - 1 has no key");
  }
  return ((u << 32) | v) + 1;
}
constexpr Vertex edge_source(Key key) { return static_cast<Vertex>((key - 1) >> 32); }
constexpr Vertex edge_target(Key key) { return static_cast<Vertex>((key - 1) & 0xFFFFFFFFULL); }

/// A set of vertices: everything (flag only), a sparse id list, or a dense bitmap.
class VertexSubset
{
 public:
  static VertexSubset all(std::size_t n);
  static VertexSubset empty(std::size_t n) { return from_sparse(n, {}); }
  static VertexSubset from_sparse(std::size_t n, std::vector<Vertex> ids);
  static VertexSubset from_dense(std::vector<std::uint8_t> bits);

  [[nodiscard]] bool contains(Vertex v) const;
  [[nodiscard]] std::size_t size() const { return count_; }
  [[nodiscard]] bool is_empty() const { return count_ == 0; }
  [[nodiscard]] bool is_all() const { return all_; }
  [[nodiscard]] bool is_dense() const { return !all_ && !dense_.empty(); }
  [[nodiscard]] std::size_t num_vertices() const { return n_; }
  /// Members in ascending order.
  [[nodiscard]] std::vector<Vertex> to_sparse() const;

 private:
  std::size_t n_ = 0;
  std::size_t count_ = 0;
  bool all_ = false;
  std::vector<Vertex> sparse_;
  std::vector<std::uint8_t> dense_;
};

struct VertexOffsets {
  /// num_vertices + 1 entries; neighbors of v are edges [offsets[v], offsets[v + 1]).
  std::vector<std::uint64_t> offsets;
  std::size_t num_vertices = 0;
  std::size_t num_edges = 0;

  [[nodiscard]] std::uint64_t degree(Vertex v) const { return offsets[v + 1] - offsets[v]; }
};

/**
 * Unweighted dynamic graph stored as one compressed set of packed edge keys. Updates and
 * algorithms are phased: algorithms need offsets from build_offsets() taken after the last update.
 */
class FGraph
{
 public:
  explicit FGraph(std::size_t num_vertices = 0);

  /// Adds each (u, v), and (v, u) too when `symmetrize`. Duplicates and existing edges are no-ops.
  void insert_edges(std::span<const Edge> edges, bool symmetrize = true);
  void erase_edges(std::span<const Edge> edges, bool symmetrize = true);

  [[nodiscard]] std::size_t num_vertices() const { return num_vertices_; }
  [[nodiscard]] std::size_t num_edges() const { return edges_.size(); }
  [[nodiscard]] bool has_edge(Vertex u, Vertex v) const { return edges_.contains(encode_edge(u, v)); }
  [[nodiscard]] const Cpma &edge_set() const { return edges_; }

  /// Rebuilds (or returns the cached) per-vertex offsets with one parallel pass over the leaves.
  const VertexOffsets &build_offsets();
  [[nodiscard]] bool offsets_current() const { return offsets_version_ == version_; }
  /// Cached offsets; throws ContractViolation when stale.
  [[nodiscard]] const VertexOffsets &offsets() const;

  /// Calls f(v, w) for every out-neighbor w of v, in ascending order.
  template <class F>
  void map_neighbors(Vertex v, F &&f) const
  {
    auto emit = [&f, v](Key k) { f(v, edge_target(k)); };
    if (v != kVertexLimit - 1) {
      edges_.range_map(encode_edge(v, 0), encode_edge(v + 1, 0), emit);
      return;
    }
    const Key top = ~Key{0};
    edges_.range_map(encode_edge(v, 0), top, emit);
    if (edges_.contains(top)) {
      emit(top);
    }
  }

  /**
   * For every frontier vertex u in parallel, applies update(u, w) to each out-neighbor w with
   * cond(w); returns the vertices for which some update returned true. update may run
   * concurrently for the same w and must be thread safe.
   */
  template <class Update, class Cond>
  VertexSubset edge_map(const VertexSubset &frontier, Update &&update, Cond &&cond) const
  {
    static_cast<void>(offsets());
    std::vector<std::uint8_t> next(num_vertices_, 0);
    auto visit = [&](Vertex u) {
      map_neighbors(u, [&](Vertex src, Vertex dst) {
        if (cond(dst) && update(src, dst)) {
          std::atomic_ref<std::uint8_t>(next[dst]).store(1, std::memory_order_relaxed);
        }
      });
    };
    if (frontier.is_all()) {
      par::parallel_for(0, num_vertices_, [&](std::size_t u) { visit(static_cast<Vertex>(u)); }, 64);
    } else {
      const std::vector<Vertex> ids = frontier.to_sparse();
      par::parallel_for(0, ids.size(), [&](std::size_t i) { visit(ids[i]); }, 16);
    }
    return VertexSubset::from_dense(std::move(next));
  }

 private:
  Cpma edges_;
  std::size_t num_vertices_ = 0;
  std::uint64_t version_ = 0;
  std::uint64_t offsets_version_ = ~std::uint64_t{0};
  VertexOffsets offsets_;
};

/// Damped PageRank, rank'(v) = (1 - d)/|V| + d * sum over neighbors u of rank(u)/deg(u),
/// starting from 1/|V|. Degree-0 vertices leak their mass.
std::vector<double> pagerank(FGraph &g, int iterations = 10, double damping = 0.85);

/// Min-label propagation to a fixed point; every vertex ends labeled with the smallest id in
/// its component.
std::vector<Vertex> connected_components(FGraph &g);

/// `num_edges` RMAT edges over 2^k = `num_vertices` vertices. Deterministic per seed and
/// independent of the thread count. Throws DomainError unless a + b + c + d = 1 (within 1e-9)
/// and num_vertices is a power of two.
std::vector<Edge> rmat_generate(std::uint64_t num_vertices, std::size_t num_edges, double a, double b, double c,
                                double d, std::uint64_t seed);

}  // namespace cpma::graph

#endif  // CPMA_GRAPH_HPP
