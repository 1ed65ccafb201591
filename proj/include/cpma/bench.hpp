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

#ifndef CPMA_BENCH_HPP
#define CPMA_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cpma/graph.hpp"

namespace cpma::bench
{
struct BenchConfig {
  std::string structure = "cpma";  ///< pma | cpma
  std::size_t initial = 1'000'000;
  std::size_t inserts = 1'000'000;
  std::vector<std::size_t> batch_sizes{1'000'000};
  unsigned key_bits = 40;
  std::size_t num_queries = 100'000;
  std::vector<double> range_lengths{1, 10, 100, 1000, 10000};
  std::vector<std::size_t> sizes{1'000'000};
  std::vector<double> factors{1.1, 1.2, 1.5, 2.0};
  std::vector<int> thread_counts;  ///< empty: 1, 2, 4, ... up to `threads`
  int threads = 0;                 ///< 0: all hardware threads
  double growing_factor = 1.2;
  std::uint64_t seed = 42;
  int trials = 10;  ///< measured trials; one warm-up trial always runs first
  bool values = false;

  /// Throws ConfigError on nonpositive counts, key_bits outside [1, 64] or a factor <= 1.
  void validate() const;
  [[nodiscard]] int effective_threads() const;
};

/// Header row plus data rows, written as TSV.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write_tsv(std::ostream &out) const;
};

/// `count` uniform keys in [1, 2^bits), element i fixed by (seed, i) alone.
std::vector<Key> uniform_keys(std::size_t count, unsigned bits, std::uint64_t seed);

Table cmd_batch_insert(const BenchConfig &config);
Table cmd_range_query(const BenchConfig &config);
Table cmd_space(const BenchConfig &config);
Table cmd_growing_factor(const BenchConfig &config);
/// Per-batch trace of the factor sweep: (factor, batch, elements, bytes, bytes_per_element).
Table cmd_growing_factor_trace(const BenchConfig &config);
Table cmd_scaling(const BenchConfig &config, const std::string &mode);

struct GraphSource {
  std::optional<std::string> path;  ///< ".bin" is read as binary pairs, anything else as text
  std::optional<std::string> rmat;  ///< "nv,ne,a,b,c,d"
};
std::vector<graph::Edge> load_edges(const GraphSource &source, std::uint64_t seed);
Table cmd_graph(const BenchConfig &config, const std::string &sub, const GraphSource &source);

}  // namespace cpma::bench

#endif  // CPMA_BENCH_HPP
