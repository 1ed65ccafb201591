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

#include "cpma/edge_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace cpma::graph
{
namespace
{
std::ifstream open(const std::string &path, std::ios::openmode mode)
{
  std::ifstream in(path, mode);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  return in;
}

const char *skip_space(const char *p, const char *end)
{
  while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) {
    ++p;
  }
  return p;
}
}  // namespace

std::vector<Edge> read_edge_list(std::istream &in)
{
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const char *p = skip_space(line.data(), line.data() + line.size());
    const char *end = line.data() + line.size();
    if (p == end || *p == '#' || *p == '%') {
      continue;
    }
    std::array<std::uint64_t, 2> ids{};
    for (auto &id : ids) {
      p = skip_space(p, end);
      const auto [next, ec] = std::from_chars(p, end, id);
      if (ec != std::errc{} || id >= kVertexLimit) {
        throw DomainError("bad edge on line " + std::to_string(lineno));
      }
      p = next;
    }
    if (skip_space(p, end) != end) {
      throw DomainError("trailing data on line " + std::to_string(lineno));
    }
    edges.emplace_back(ids[0], ids[1]);
  }
  return edges;
}

std::vector<Edge> read_edge_list(const std::string &path)
{
  auto in = open(path, std::ios::in);
  return read_edge_list(in);
}

std::vector<Edge> read_edge_pairs(std::istream &in)
{
  std::vector<Edge> edges;
  std::array<unsigned char, 8> rec{};
  while (in.read(reinterpret_cast<char *>(rec.data()), rec.size())) {
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    for (int i = 3; i >= 0; --i) {
      u = (u << 8) | rec[static_cast<std::size_t>(i)];
      v = (v << 8) | rec[static_cast<std::size_t>(i) + 4];
    }
    edges.emplace_back(u, v);
  }
  if (in.gcount() != 0) {
    throw DomainError("binary edge file length is not a multiple of 8 bytes");
  }
  return edges;
}

std::vector<Edge> read_edge_pairs(const std::string &path)
{
  auto in = open(path, std::ios::in | std::ios::binary);
  return read_edge_pairs(in);
}

void write_edge_list(std::ostream &out, const std::vector<Edge> &edges)
{
  for (const auto &[u, v] : edges) {
    out << u << ' ' << v << '\n';
  }
}

void write_edge_pairs(std::ostream &out, const std::vector<Edge> &edges)
{
  for (const auto &[u, v] : edges) {
    if (u >= kVertexLimit || v >= kVertexLimit) {
      throw DomainError("vertex id must be below 2^32");
    }
    std::array<unsigned char, 8> rec{};
    for (std::size_t i = 0; i < 4; ++i) {
      rec[i] = static_cast<unsigned char>(u >> (8 * i));
      rec[i + 4] = static_cast<unsigned char>(v >> (8 * i));
    }
    out.write(reinterpret_cast<const char *>(rec.data()), rec.size());
  }
}

}  // namespace cpma::graph
