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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <queue>
#include <set>
#include <vector>

#include "cpma/graph.hpp"

namespace cpma::graph
{
namespace
{
TEST(EdgeKey, EncodingIsOrderPreserving)
{
  EXPECT_EQ(encode_edge(0, 0), 1u);
  EXPECT_EQ(encode_edge(1, 0), (Key{1} << 32) + 1);
  EXPECT_LT(encode_edge(3, 0xFFFFFFFFULL), encode_edge(4, 0));
  EXPECT_EQ(edge_source(encode_edge(77, 5)), 77u);
  EXPECT_EQ(edge_target(encode_edge(77, 5)), 5u);
  EXPECT_THROW(encode_edge(kVertexLimit, 0), DomainError);
  EXPECT_THROW(encode_edge(kVertexLimit - 1, kVertexLimit - 1), DomainError);
  EXPECT_EQ(encode_edge(kVertexLimit - 1, kVertexLimit - 2), ~Key{0});
}

TEST(VertexSubset, SparseAndDense)
{
  const auto s = VertexSubset::from_sparse(10, {7, 2, 7});
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.contains(2));
  EXPECT_FALSE(s.contains(3));
  EXPECT_EQ(s.to_sparse(), (std::vector<Vertex>{2, 7}));
  const auto d = VertexSubset::from_dense({0, 1, 1, 0});
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.to_sparse(), (std::vector<Vertex>{1, 2}));
  EXPECT_TRUE(VertexSubset::all(5).contains(4));
  EXPECT_TRUE(VertexSubset::empty(5).is_empty());
}

TEST(FGraph, OffsetsAndNeighbors)
{
  FGraph g(6);
  const std::vector<Edge> edges{{0, 1}, {0, 2}, {3, 4}, {2, 2}};
  g.insert_edges(edges);
  EXPECT_EQ(g.num_edges(), 7u);  // symmetrized, self loop once
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_THROW(static_cast<void>(g.offsets()), ContractViolation);
  const auto &off = g.build_offsets();
  EXPECT_EQ(off.offsets, (std::vector<std::uint64_t>{0, 2, 3, 5, 6, 7, 7}));
  EXPECT_EQ(off.degree(2), 2u);
  std::vector<Vertex> nbrs;
  g.map_neighbors(0, [&](Vertex, Vertex v) { nbrs.push_back(v); });
  EXPECT_EQ(nbrs, (std::vector<Vertex>{1, 2}));
  g.erase_edges(std::vector<Edge>{{0, 1}});
  EXPECT_FALSE(g.has_edge(1, 0));
  EXPECT_FALSE(g.offsets_current());
  EXPECT_EQ(g.build_offsets().degree(0), 1u);
}

TEST(FGraph, EdgeMapBreadthFirstMatchesQueue)
{
  const std::size_t n = 1024;
  const auto edges = rmat_generate(n, 6000, 0.5, 0.1, 0.1, 0.3, 4);
  FGraph g(n);
  g.insert_edges(edges);
  g.build_offsets();

  std::vector<std::vector<Vertex>> adj(n);
  for (const auto &[u, v] : edges) {
    adj[u].push_back(static_cast<Vertex>(v));
    adj[v].push_back(static_cast<Vertex>(u));
  }
  std::vector<int> want(n, -1);
  std::queue<Vertex> q;
  want[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const Vertex u = q.front();
    q.pop();
    for (Vertex v : adj[u]) {
      if (want[v] < 0) {
        want[v] = want[u] + 1;
        q.push(v);
      }
    }
  }

  std::vector<std::atomic<int>> level(n);
  for (auto &l : level) {
    l.store(-1);
  }
  level[0] = 0;
  VertexSubset frontier = VertexSubset::from_sparse(n, {0});
  for (int round = 1; !frontier.is_empty(); ++round) {
    frontier = g.edge_map(
        frontier,
        [&](Vertex, Vertex d) {
          int expected = -1;
          return level[d].compare_exchange_strong(expected, round);
        },
        [&](Vertex d) { return level[d].load() < 0; });
  }
  for (std::size_t v = 0; v < n; ++v) {
    ASSERT_EQ(level[v].load(), want[v]) << v;
  }
}

TEST(PageRank, TwoNodesSplitEvenly)
{
  FGraph g(2);
  g.insert_edges(std::vector<Edge>{{0, 1}});
  const auto pr = pagerank(g, 10);
  ASSERT_EQ(pr.size(), 2u);
  EXPECT_NEAR(pr[0], 0.5, 1e-12);
  EXPECT_NEAR(pr[1], 0.5, 1e-12);
}

TEST(PageRank, StarCenterDominatesAndSumsToOne)
{
  FGraph g(5);
  g.insert_edges(std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto pr = pagerank(g, 20);
  double total = 0;
  for (double p : pr) {
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_GT(pr[0], pr[1]);
  EXPECT_NEAR(pr[1], pr[4], 1e-15);
}

TEST(ConnectedComponents, LabelsAreComponentMinimum)
{
  FGraph g(9);
  g.insert_edges(std::vector<Edge>{{4, 2}, {2, 7}, {5, 6}, {8, 8}});
  const auto cc = connected_components(g);
  EXPECT_EQ(cc, (std::vector<Vertex>{0, 1, 2, 3, 2, 5, 5, 2, 8}));
}

TEST(Rmat, DeterministicAndInRange)
{
  const auto a = rmat_generate(1 << 10, 5000, 0.57, 0.19, 0.19, 0.05, 9);
  const auto b = rmat_generate(1 << 10, 5000, 0.57, 0.19, 0.19, 0.05, 9);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, rmat_generate(1 << 10, 5000, 0.57, 0.19, 0.19, 0.05, 10));
  EXPECT_TRUE(std::all_of(a.begin(), a.end(), [](const Edge &e) { return e.first < 1024 && e.second < 1024; }));
  EXPECT_THROW(rmat_generate(1000, 10, 0.57, 0.19, 0.19, 0.05, 1), DomainError);
  EXPECT_THROW(rmat_generate(1024, 10, 0.5, 0.19, 0.19, 0.05, 1), DomainError);
}

}  // namespace
}  // namespace cpma::graph
