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

// bench: microbenchmark and graph-benchmark harness; emits TSV.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cpma/bench.hpp"

namespace
{
using cpma::bench::BenchConfig;

void add_common(CLI::App *cmd, BenchConfig &c, std::string &output)
{
  cmd->add_option("--structure", c.structure, "pma or cpma")->check(CLI::IsMember({"pma", "cpma"}));
  cmd->add_option("--initial", c.initial, "elements loaded before timing");
  cmd->add_option("--inserts", c.inserts, "elements inserted while timing");
  cmd->add_option("--batch-size", c.batch_sizes, "batch size(s)")->delimiter(',');
  cmd->add_option("--key-bits", c.key_bits, "keys are uniform in [1, 2^bits)");
  cmd->add_option("--threads", c.threads, "worker threads (0 = all)");
  cmd->add_option("--growing-factor", c.growing_factor, "capacity growth on resize");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--trials", c.trials, "measured trials after one warm-up");
  cmd->add_option("--output", output, "write TSV here instead of stdout");
}
}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Benchmarks for the PMA / CPMA ordered sets and the packed-edge graph store"};
  app.require_subcommand(1);
  BenchConfig c;
  std::string output;
  std::string scaling_mode = "strong";
  std::string graph_sub;
  cpma::bench::GraphSource source;
  bool trace = false;

  auto *bi = app.add_subcommand("batch-insert", "insert throughput vs batch size");
  add_common(bi, c, output);

  auto *rq = app.add_subcommand("range-query", "parallel range-map throughput vs expected range length");
  add_common(rq, c, output);
  rq->add_option("--queries", c.num_queries, "number of range queries");
  rq->add_option("--range-len", c.range_lengths, "expected elements per query")->delimiter(',');

  auto *sp = app.add_subcommand("space", "bytes per element of PMA and CPMA");
  add_common(sp, c, output);
  sp->add_option("--sizes", c.sizes, "element counts")->delimiter(',');

  auto *gf = app.add_subcommand("growing-factor", "insert time, size and scan time per growing factor");
  add_common(gf, c, output);
  gf->add_option("--factors", c.factors, "growing factors")->delimiter(',');
  gf->add_flag("--trace", trace, "emit the per-batch size trace instead of the summary");

  auto *sc = app.add_subcommand("scaling", "strong (threads on one set) or weak (one set per worker) scaling");
  add_common(sc, c, output);
  sc->add_option("--mode", scaling_mode, "strong or weak")->check(CLI::IsMember({"strong", "weak"}));
  sc->add_option("--thread-counts", c.thread_counts, "worker counts to sweep")->delimiter(',');

  auto *gr = app.add_subcommand("graph", "graph benchmarks: pr, cc or insert");
  add_common(gr, c, output);
  gr->add_option("algorithm", graph_sub, "pr | cc | insert")->required()->check(CLI::IsMember({"pr", "cc", "insert"}));
  gr->add_option("--graph", source.path,
                 "edge file: text with one 'u v' pair per line ('#' or '%' comments), or *.bin with "
                 "little-endian uint32 (u, v) records");
  gr->add_option("--rmat", source.rmat, "generate an RMAT graph: nv,ne,a,b,c,d (nv a power of two)");
  gr->add_flag("--values", c.values, "print per-vertex ranks or labels");

  CLI11_PARSE(app, argc, argv);

  try {
    cpma::bench::Table table;
    if (bi->parsed()) {
      table = cpma::bench::cmd_batch_insert(c);
    } else if (rq->parsed()) {
      table = cpma::bench::cmd_range_query(c);
    } else if (sp->parsed()) {
      table = cpma::bench::cmd_space(c);
    } else if (gf->parsed()) {
      table = trace ? cpma::bench::cmd_growing_factor_trace(c) : cpma::bench::cmd_growing_factor(c);
    } else if (sc->parsed()) {
      table = cpma::bench::cmd_scaling(c, scaling_mode);
    } else {
      table = cpma::bench::cmd_graph(c, graph_sub, source);
    }
    if (output.empty()) {
      table.write_tsv(std::cout);
    } else {
      std::ofstream out(output);
      if (!out) {
        std::cerr << "cannot write " << output << '\n';
        return 1;
      }
      table.write_tsv(out);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
