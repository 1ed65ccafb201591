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
#include <sstream>
#include <string>

#include "cpma/bench.hpp"

namespace cpma::bench
{
namespace
{
BenchConfig tiny()
{
  BenchConfig config;
  config.initial = 2000;
  config.inserts = 2000;
  config.batch_sizes = {10, 1000};
  config.num_queries = 100;
  config.range_lengths = {1, 100};
  config.sizes = {1000};
  config.factors = {1.2, 2.0};
  config.thread_counts = {1, 2};
  config.threads = 2;
  config.trials = 1;
  return config;
}

void expect_shape(const Table &t)
{
  ASSERT_FALSE(t.header.empty());
  ASSERT_FALSE(t.rows.empty());
  for (const auto &row : t.rows) {
    ASSERT_EQ(row.size(), t.header.size());
  }
  std::ostringstream out;
  t.write_tsv(out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(t.rows.size() + 1));
}

TEST(Bench, UniformKeysAreDeterministicAndBounded)
{
  const auto a = uniform_keys(1000, 10, 3);
  EXPECT_EQ(a, uniform_keys(1000, 10, 3));
  EXPECT_TRUE(std::all_of(a.begin(), a.end(), [](Key k) { return k >= 1 && k < 1024; }));
}

TEST(Bench, ConfigValidation)
{
  BenchConfig config = tiny();
  EXPECT_NO_THROW(config.validate());
  config.key_bits = 0;
  EXPECT_THROW(config.validate(), ConfigError);
  config = tiny();
  config.structure = "btree";
  EXPECT_THROW(config.validate(), ConfigError);
  config = tiny();
  config.growing_factor = 1.0;
  EXPECT_THROW(config.validate(), ConfigError);
}

TEST(Bench, CommandsProduceTables)
{
  const BenchConfig config = tiny();
  expect_shape(cmd_batch_insert(config));
  expect_shape(cmd_range_query(config));
  expect_shape(cmd_space(config));
  expect_shape(cmd_growing_factor(config));
  expect_shape(cmd_growing_factor_trace(config));
  expect_shape(cmd_scaling(config, "strong"));
  expect_shape(cmd_scaling(config, "weak"));
  EXPECT_THROW(cmd_scaling(config, "sideways"), ConfigError);
}

TEST(Bench, GraphCommands)
{
  const BenchConfig config = tiny();
  GraphSource source;
  source.rmat = "256,2000,0.5,0.1,0.1,0.3";
  for (const char *sub : {"pr", "cc", "insert"}) {
    expect_shape(cmd_graph(config, sub, source));
  }
  EXPECT_THROW(cmd_graph(config, "bfs", source), ConfigError);
  EXPECT_THROW(load_edges(GraphSource{}, 1), ConfigError);
}

}  // namespace
}  // namespace cpma::bench
