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

#include "cpma/bench.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "cpma/edge_io.hpp"
#include "cpma/packed_set.hpp"
#include "cpma/random.hpp"

namespace cpma::bench
{
void BenchConfig::validate() const
{
  if (structure != "pma" && structure != "cpma") {
    throw ConfigError("structure must be pma or cpma, got '" + structure + "'");
  }
  if (key_bits < 1 || key_bits > 64) {
    throw ConfigError("key_bits must be in [1, 64]");
  }
  if (!(growing_factor > 1.0)) {
    throw ConfigError("growing factor must be > 1");
  }
  for (double f : factors) {
    if (!(f > 1.0)) {
      throw ConfigError("growing factors must be > 1");
    }
  }
  if (trials < 1 || threads < 0 || num_queries == 0 || inserts == 0) {
    throw ConfigError("trials, queries and inserts must be positive");
  }
  for (std::size_t k : batch_sizes) {
    if (k == 0) {
      throw ConfigError("batch sizes must be positive");
    }
  }
  if (batch_sizes.empty()) {
    throw ConfigError("at least one batch size is required");
  }
  for (double len : range_lengths) {
    if (!(len > 0)) {
      throw ConfigError("range lengths must be positive");
    }
  }
  for (int t : thread_counts) {
    if (t < 1) {
      throw ConfigError("thread counts must be positive");
    }
  }
}

int BenchConfig::effective_threads() const { return threads > 0 ? threads : par::hardware_threads(); }

void Table::write_tsv(std::ostream &out) const
{
  auto line = [&out](const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out << (i == 0 ? "" : "\t") << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (const auto &row : rows) {
    line(row);
  }
}

std::vector<Key> uniform_keys(std::size_t count, unsigned bits, std::uint64_t seed)
{
  const SplitMix64 gen(seed);
  const Key span = (bits >= 64 ? ~Key{0} : (Key{1} << bits)) - 1;
  std::vector<Key> keys(count);
  par::parallel_for(
      0, count,
      [&](std::size_t i) { keys[i] = 1 + static_cast<Key>((static_cast<unsigned __int128>(gen.at(i)) * span) >> 64); },
      4096);
  return keys;
}

namespace
{
template <class T>
std::string str(T v)
{
  std::ostringstream out;
  if constexpr (std::is_floating_point_v<T>) {
    out << std::setprecision(6) << v;
  } else {
    out << v;
  }
  return out.str();
}

template <class F>
double seconds(F &&f)
{
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double mean(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

template <class F>
void with_structure(const std::string &name, F &&f)
{
  if (name == "pma") {
    f(Pma{});
  } else {
    f(Cpma{});
  }
}

template <class S>
S make_set(double growing_factor)
{
  LayoutConfig config = S::default_config();
  config.growing_factor = growing_factor;
  return S(config);
}

template <class S>
void insert_in_batches(S &set, const std::vector<Key> &keys, std::size_t batch)
{
  for (std::size_t off = 0; off < keys.size(); off += batch) {
    const std::size_t end = std::min(keys.size(), off + batch);
    set.batch_insert(std::vector<Key>(keys.begin() + static_cast<std::ptrdiff_t>(off),
                                      keys.begin() + static_cast<std::ptrdiff_t>(end)));
  }
}

std::vector<int> thread_ladder(const BenchConfig &config)
{
  if (!config.thread_counts.empty()) {
    return config.thread_counts;
  }
  std::vector<int> ladder;
  const int top = config.effective_threads();
  for (int t = 1; t < top; t *= 2) {
    ladder.push_back(t);
  }
  ladder.push_back(top);
  return ladder;
}

constexpr std::uint64_t kInsertStream = 0x9e3779b97f4a7c15ULL;
}  // namespace

Table cmd_batch_insert(const BenchConfig &config)
{
  config.validate();
  Table table{{"structure", "threads", "batch_size", "trial", "seconds", "inserts_per_second", "checksum"}, {}};
  const int threads = config.effective_threads();
  par::with_threads(threads, [&] {
    const auto initial = uniform_keys(config.initial, config.key_bits, config.seed);
    const auto inserts = uniform_keys(config.inserts, config.key_bits, config.seed ^ kInsertStream);
    with_structure(config.structure, [&]<class S>(S) {
      for (std::size_t k : config.batch_sizes) {
        std::vector<double> times;
        std::uint64_t checksum = 0;
        for (int trial = 0; trial <= config.trials; ++trial) {
          S set = make_set<S>(config.growing_factor);
          set.batch_insert(std::vector<Key>(initial));
          const double t = seconds([&] { insert_in_batches(set, inserts, k); });
          checksum = set.checksum();
          if (trial == 0) {
            continue;
          }
          times.push_back(t);
          table.rows.push_back({config.structure, str(threads), str(k), str(trial), str(t),
                                str(static_cast<double>(config.inserts) / t), str(checksum)});
        }
        const double m = mean(times);
        table.rows.push_back({config.structure, str(threads), str(k), "mean", str(m),
                              str(static_cast<double>(config.inserts) / m), str(checksum)});
      }
    });
  });
  return table;
}

Table cmd_range_query(const BenchConfig &config)
{
  config.validate();
  Table table{{"structure", "threads", "expected_len", "trial", "seconds", "elements", "elements_per_second", "sum"},
              {}};
  const int threads = config.effective_threads();
  par::with_threads(threads, [&] {
    const auto initial = uniform_keys(config.initial, config.key_bits, config.seed);
    with_structure(config.structure, [&]<class S>(S) {
      S set = make_set<S>(config.growing_factor);
      set.batch_insert(std::vector<Key>(initial));
      const double key_space = std::ldexp(1.0, static_cast<int>(config.key_bits));
      const auto starts = uniform_keys(config.num_queries, config.key_bits, config.seed + 7);
      for (double len : config.range_lengths) {
        const double n = std::max<double>(1.0, static_cast<double>(set.size()));
        const auto width = static_cast<Key>(std::max(1.0, std::min(len * key_space / n, key_space)));
        std::vector<double> times;
        std::uint64_t elements = 0;
        std::uint64_t sum = 0;
        for (int trial = 0; trial <= config.trials; ++trial) {
          std::vector<std::uint64_t> counts(starts.size());
          std::vector<std::uint64_t> sums(starts.size());
          const double t = seconds([&] {
            par::parallel_for(
                0, starts.size(),
                [&](std::size_t i) {
                  const Key end = starts[i] > ~Key{0} - width ? ~Key{0} : starts[i] + width;
                  std::uint64_t c = 0;
                  std::uint64_t s = 0;
                  set.range_map(starts[i], end, [&](Key k) {
                    ++c;
                    s += k;
                  });
                  counts[i] = c;
                  sums[i] = s;
                },
                64);
          });
          elements = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
          sum = std::accumulate(sums.begin(), sums.end(), std::uint64_t{0});
          if (trial == 0) {
            continue;
          }
          times.push_back(t);
          table.rows.push_back({config.structure, str(threads), str(len), str(trial), str(t), str(elements),
                                str(static_cast<double>(elements) / t), str(sum)});
        }
        const double m = mean(times);
        table.rows.push_back({config.structure, str(threads), str(len), "mean", str(m), str(elements),
                              str(static_cast<double>(elements) / m), str(sum)});
      }
    });
  });
  return table;
}

Table cmd_space(const BenchConfig &config)
{
  config.validate();
  Table table{{"structure", "n", "elements", "capacity", "bytes", "bytes_per_element"}, {}};
  par::with_threads(config.effective_threads(), [&] {
    for (std::size_t n : config.sizes) {
      const auto keys = uniform_keys(n, config.key_bits, config.seed);
      for (const std::string name : {"pma", "cpma"}) {
        with_structure(name, [&]<class S>(S) {
          S set = make_set<S>(config.growing_factor);
          insert_in_batches(set, keys, config.batch_sizes.front());
          const SizeStats s = set.size_stats();
          table.rows.push_back(
              {name, str(n), str(s.elements), str(s.capacity), str(s.bytes), str(s.bytes_per_element)});
        });
      }
    }
  });
  return table;
}

namespace
{
struct GrowthRun {
  double insert_seconds = 0;
  std::vector<std::pair<std::size_t, std::size_t>> trace;  // (elements, bytes) after each batch
  double scan_seconds = 0;
  std::size_t resizes = 0;
};

template <class S>
GrowthRun growth_run(const BenchConfig &config, double factor, const std::vector<Key> &keys)
{
  GrowthRun run;
  S set = make_set<S>(factor);
  const std::size_t k = config.batch_sizes.front();
  for (std::size_t off = 0; off < keys.size(); off += k) {
    const std::size_t end = std::min(keys.size(), off + k);
    std::vector<Key> batch(keys.begin() + static_cast<std::ptrdiff_t>(off), keys.begin() + static_cast<std::ptrdiff_t>(end));
    run.insert_seconds += seconds([&] { set.batch_insert(std::move(batch)); });
    run.trace.emplace_back(set.size(), set.size_stats().bytes);
  }
  std::vector<double> scans;
  std::uint64_t sink = 0;
  for (int trial = 0; trial <= config.trials; ++trial) {
    const double t = seconds([&] { sink += set.parallel_sum(); });
    if (trial > 0) {
      scans.push_back(t);
    }
  }
  static_cast<void>(sink);
  run.scan_seconds = mean(scans);
  run.resizes = set.resize_count();
  return run;
}
}  // namespace

Table cmd_growing_factor(const BenchConfig &config)
{
  config.validate();
  Table table{{"structure", "factor", "elements", "insert_seconds", "avg_bytes_per_element", "max_bytes_per_element",
               "avg_scan_seconds", "resizes"},
              {}};
  par::with_threads(config.effective_threads(), [&] {
    const auto keys = uniform_keys(config.inserts, config.key_bits, config.seed);
    with_structure(config.structure, [&]<class S>(S) {
      for (double f : config.factors) {
        const GrowthRun run = growth_run<S>(config, f, keys);
        double sum = 0;
        double worst = 0;
        for (const auto &[n, bytes] : run.trace) {
          const double bpe = static_cast<double>(bytes) / static_cast<double>(std::max<std::size_t>(n, 1));
          sum += bpe;
          worst = std::max(worst, bpe);
        }
        table.rows.push_back({config.structure, str(f), str(run.trace.back().first), str(run.insert_seconds),
                              str(sum / static_cast<double>(run.trace.size())), str(worst), str(run.scan_seconds),
                              str(run.resizes)});
      }
    });
  });
  return table;
}

Table cmd_growing_factor_trace(const BenchConfig &config)
{
  config.validate();
  Table table{{"structure", "factor", "batch", "elements", "bytes", "bytes_per_element"}, {}};
  BenchConfig quick = config;
  quick.trials = 1;
  par::with_threads(config.effective_threads(), [&] {
    const auto keys = uniform_keys(config.inserts, config.key_bits, config.seed);
    with_structure(config.structure, [&]<class S>(S) {
      for (double f : config.factors) {
        const GrowthRun run = growth_run<S>(quick, f, keys);
        for (std::size_t b = 0; b < run.trace.size(); ++b) {
          const auto [n, bytes] = run.trace[b];
          table.rows.push_back({config.structure, str(f), str(b), str(n), str(bytes),
                                str(static_cast<double>(bytes) / static_cast<double>(std::max<std::size_t>(n, 1)))});
        }
      }
    });
  });
  return table;
}

Table cmd_scaling(const BenchConfig &config, const std::string &mode)
{
  config.validate();
  if (mode != "strong" && mode != "weak") {
    throw ConfigError("scaling mode must be strong or weak");
  }
  const bool strong = mode == "strong";
  Table table{{"structure", "mode", strong ? "threads" : "processes", "seconds", strong ? "speedup" : "slowdown",
               "checksum"},
              {}};
  const auto initial = uniform_keys(config.initial, config.key_bits, config.seed);
  const auto inserts = uniform_keys(config.inserts, config.key_bits, config.seed ^ kInsertStream);
  const std::size_t k = config.batch_sizes.front();
  with_structure(config.structure, [&]<class S>(S) {
    // one timed unit of work: build, then batch-insert; returns (seconds, checksum)
    auto work = [&](const std::vector<Key> &base, const std::vector<Key> &extra) {
      S set = make_set<S>(config.growing_factor);
      set.batch_insert(std::vector<Key>(base));
      const double t = seconds([&] { insert_in_batches(set, extra, k); });
      return std::pair{t, set.checksum()};
    };
    double baseline = 0;
    for (int t : thread_ladder(config)) {
      std::vector<double> times;
      std::uint64_t checksum = 0;
      for (int trial = 0; trial <= config.trials; ++trial) {
        double elapsed = 0;
        if (strong) {
          std::tie(elapsed, checksum) = par::with_threads(t, [&] { return work(initial, inserts); });
        } else {
          // t independent single-threaded structures; the slowest one counts
          std::vector<double> each(static_cast<std::size_t>(t));
          std::vector<std::thread> pool;
          for (int p = 0; p < t; ++p) {
            pool.emplace_back([&, p] {
              const auto mine = uniform_keys(config.inserts, config.key_bits, config.seed + 1000 + static_cast<std::uint64_t>(p));
              each[static_cast<std::size_t>(p)] = par::with_threads(1, [&] { return work(initial, mine).first; });
            });
          }
          for (auto &th : pool) {
            th.join();
          }
          elapsed = *std::max_element(each.begin(), each.end());
        }
        if (trial > 0) {
          times.push_back(elapsed);
        }
      }
      const double m = mean(times);
      if (baseline == 0) {
        baseline = m;
      }
      table.rows.push_back({config.structure, mode, str(t), str(m), str(strong ? baseline / m : m / baseline),
                            strong ? str(checksum) : "-"});
    }
  });
  return table;
}

std::vector<graph::Edge> load_edges(const GraphSource &source, std::uint64_t seed)
{
  if (source.path) {
    const std::string &p = *source.path;
    if (p.size() >= 4 && p.compare(p.size() - 4, 4, ".bin") == 0) {
      return graph::read_edge_pairs(p);
    }
    return graph::read_edge_list(p);
  }
  if (!source.rmat) {
    throw ConfigError("graph commands need --graph FILE or --rmat nv,ne,a,b,c,d");
  }
  std::vector<double> f;
  std::stringstream in(*source.rmat);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      f.push_back(std::stod(part));
    } catch (const std::exception &) {
      throw ConfigError("bad --rmat field '" + part + "'");
    }
  }
  if (f.size() != 6 || f[0] < 1 || f[1] < 0) {
    throw ConfigError("--rmat expects nv,ne,a,b,c,d");
  }
  return graph::rmat_generate(static_cast<std::uint64_t>(f[0]), static_cast<std::size_t>(f[1]), f[2], f[3], f[4], f[5],
                              seed);
}

Table cmd_graph(const BenchConfig &config, const std::string &sub, const GraphSource &source)
{
  config.validate();
  if (sub != "pr" && sub != "cc" && sub != "insert") {
    throw ConfigError("graph subcommand must be pr, cc or insert");
  }
  Table table;
  par::with_threads(config.effective_threads(), [&] {
    const auto edges = load_edges(source, config.seed);
    if (sub == "insert") {
      table.header = {"batch_size", "trial", "seconds", "edges", "edges_per_second"};
      for (std::size_t k : config.batch_sizes) {
        std::vector<double> times;
        std::size_t stored = 0;
        for (int trial = 0; trial <= config.trials; ++trial) {
          graph::FGraph g;
          const double t = seconds([&] {
            for (std::size_t off = 0; off < edges.size(); off += k) {
              const std::size_t len = std::min(k, edges.size() - off);
              g.insert_edges(std::span<const graph::Edge>(edges).subspan(off, len), true);
            }
          });
          stored = g.num_edges();
          if (trial == 0) {
            continue;
          }
          times.push_back(t);
          table.rows.push_back({str(k), str(trial), str(t), str(edges.size()),
                                str(static_cast<double>(edges.size()) / t)});
        }
        const double m = mean(times);
        table.rows.push_back({str(k), "mean", str(m), str(stored), str(static_cast<double>(edges.size()) / m)});
      }
      return;
    }

    graph::FGraph g;
    g.insert_edges(edges, true);
    g.build_offsets();
    std::vector<double> ranks;
    std::vector<graph::Vertex> labels;
    std::vector<double> times;
    for (int trial = 0; trial <= config.trials; ++trial) {
      const double t = seconds([&] {
        if (sub == "pr") {
          ranks = graph::pagerank(g);
        } else {
          labels = graph::connected_components(g);
        }
      });
      if (trial > 0) {
        times.push_back(t);
      }
    }
    if (config.values) {
      table.header = {"vertex", sub == "pr" ? "rank" : "label"};
      for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        std::ostringstream val;
        if (sub == "pr") {
          val << std::setprecision(12) << ranks[v];
        } else {
          val << labels[v];
        }
        table.rows.push_back({str(v), val.str()});
      }
      return;
    }
    std::string summary;
    if (sub == "pr") {
      summary = str(std::accumulate(ranks.begin(), ranks.end(), 0.0));
    } else {
      std::size_t components = 0;
      for (std::size_t v = 0; v < labels.size(); ++v) {
        components += labels[v] == v ? 1 : 0;
      }
      summary = str(components);
    }
    table.header = {"algorithm", "vertices", "edges", "seconds", sub == "pr" ? "rank_sum" : "components"};
    table.rows.push_back({sub, str(g.num_vertices()), str(g.num_edges()), str(mean(times)), summary});
  });
  return table;
}

}  // namespace cpma::bench
