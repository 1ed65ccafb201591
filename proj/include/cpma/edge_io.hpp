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

#ifndef CPMA_EDGE_IO_HPP
#define CPMA_EDGE_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "cpma/graph.hpp"

namespace cpma::graph
{
/// Whitespace-separated "u v" pairs, one per line; blank lines and lines starting with '#' or
/// '%' are skipped. Throws DomainError on malformed lines or ids >= 2^32.
std::vector<Edge> read_edge_list(std::istream &in);
std::vector<Edge> read_edge_list(const std::string &path);

/// Binary edge pairs: consecutive little-endian uint32 (u, v) records.
std::vector<Edge> read_edge_pairs(std::istream &in);
std::vector<Edge> read_edge_pairs(const std::string &path);

void write_edge_list(std::ostream &out, const std::vector<Edge> &edges);
void write_edge_pairs(std::ostream &out, const std::vector<Edge> &edges);

}  // namespace cpma::graph

#endif  // CPMA_EDGE_IO_HPP
