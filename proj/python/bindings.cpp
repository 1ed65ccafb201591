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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "cpma/graph.hpp"
#include "cpma/oracle.hpp"
#include "cpma/packed_set.hpp"
#include "cpma/snapshot.hpp"

namespace py = pybind11;

namespace
{
using cpma::Key;

std::vector<Key> to_keys(const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast> &arr)
{
  const auto *p = arr.data();
  return std::vector<Key>(p, p + arr.size());
}

py::array_t<std::uint64_t> to_array(std::vector<Key> keys)
{
  auto *heap = new std::vector<Key>(std::move(keys));
  py::capsule owner(heap, [](void *v) { delete static_cast<std::vector<Key> *>(v); });
  return py::array_t<std::uint64_t>(static_cast<py::ssize_t>(heap->size()), heap->data(), owner);
}

template <class Codec>
void bind_set(py::module_ &m, const char *name)
{
  using Set = cpma::PackedSet<Codec>;
  py::class_<Set>(m, name)
      .def(py::init<>())
      .def("insert", &Set::insert, py::arg("key"))
      .def("erase", &Set::erase, py::arg("key"))
      .def("contains", &Set::contains, py::arg("key"))
      .def("__contains__", &Set::contains)
      .def("search", &Set::search, py::arg("key"), "Smallest element >= key, or None.")
      .def("range_sum", &Set::range_sum, py::arg("start"), py::arg("end"))
      .def(
          "batch_insert",
          [](Set &s, const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast> &keys) {
            auto raw = to_keys(keys);
            py::gil_scoped_release release;
            s.batch_insert(std::move(raw));
          },
          py::arg("keys"))
      .def(
          "batch_erase",
          [](Set &s, const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast> &keys) {
            auto raw = to_keys(keys);
            py::gil_scoped_release release;
            s.batch_erase(std::move(raw));
          },
          py::arg("keys"))
      .def("to_numpy", [](const Set &s) { return to_array(s.to_vector()); })
      .def("sum", &Set::parallel_sum)
      .def("__len__", &Set::size)
      .def_property_readonly("capacity", &Set::capacity)
      .def_property_readonly("num_leaves", [](const Set &s) { return s.layout().num_leaves(); })
      .def_property_readonly("leaf_size", [](const Set &s) { return s.layout().leaf_size(); })
      .def_property_readonly("bytes_per_element", [](const Set &s) { return s.size_stats().bytes_per_element; })
      .def_property_readonly("resize_count", &Set::resize_count)
      .def("checksum", &Set::checksum)
      .def("validate",
           [](const Set &s) {
             std::vector<std::string> out;
             for (const auto &v : cpma::validate(s).violations) {
               out.push_back(v.to_string());
             }
             return out;
           })
      .def("dumps",
           [](const Set &s) {
             std::ostringstream out;
             cpma::save_snapshot(s, out);
             return py::bytes(out.str());
           })
      .def_static(
          "loads",
          [](const py::bytes &data) {
            std::istringstream in{std::string(data)};
            return cpma::load_snapshot<Codec>(in);
          },
          py::arg("data"));
}

std::vector<cpma::graph::Edge> to_edges(const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast> &arr)
{
  if (arr.ndim() != 2 || arr.shape(1) != 2) {
    throw py::value_error("edges must have shape (m, 2)");
  }
  std::vector<cpma::graph::Edge> edges(static_cast<std::size_t>(arr.shape(0)));
  auto r = arr.unchecked<2>();
  for (py::ssize_t i = 0; i < arr.shape(0); ++i) {
    edges[static_cast<std::size_t>(i)] = {r(i, 0), r(i, 1)};
  }
  return edges;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Packed memory arrays (plain and compressed) and a graph store built on them.";

  py::register_exception<cpma::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<cpma::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<cpma::CorruptionError>(m, "CorruptionError", PyExc_ValueError);
  py::register_exception<cpma::ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

  bind_set<cpma::UncompressedLeaf>(m, "Pma");
  bind_set<cpma::CompressedLeaf>(m, "Cpma");

  using cpma::graph::FGraph;
  py::class_<FGraph>(m, "Graph")
      .def(py::init<std::size_t>(), py::arg("num_vertices"))
      .def(
          "insert_edges",
          [](FGraph &g, const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast> &edges,
             bool symmetrize) {
            const auto e = to_edges(edges);
            py::gil_scoped_release release;
            g.insert_edges(e, symmetrize);
          },
          py::arg("edges"), py::arg("symmetrize") = true)
      .def(
          "erase_edges",
          [](FGraph &g, const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast> &edges,
             bool symmetrize) {
            const auto e = to_edges(edges);
            py::gil_scoped_release release;
            g.erase_edges(e, symmetrize);
          },
          py::arg("edges"), py::arg("symmetrize") = true)
      .def("has_edge", &FGraph::has_edge, py::arg("u"), py::arg("v"))
      .def_property_readonly("num_vertices", &FGraph::num_vertices)
      .def_property_readonly("num_edges", &FGraph::num_edges)
      .def("degrees",
           [](FGraph &g) {
             const auto &off = g.build_offsets();
             std::vector<Key> deg(off.num_vertices);
             for (std::size_t v = 0; v < deg.size(); ++v) {
               deg[v] = off.degree(static_cast<cpma::graph::Vertex>(v));
             }
             return to_array(std::move(deg));
           })
      .def("neighbors", [](const FGraph &g, cpma::graph::Vertex v) {
        std::vector<cpma::graph::Vertex> out;
        g.map_neighbors(v, [&out](cpma::graph::Vertex, cpma::graph::Vertex d) { out.push_back(d); });
        return out;
      });

  m.def(
      "pagerank",
      [](FGraph &g, int iterations, double damping) {
        py::gil_scoped_release release;
        return cpma::graph::pagerank(g, iterations, damping);
      },
      py::arg("graph"), py::arg("iterations") = 10, py::arg("damping") = 0.85);
  m.def(
      "connected_components",
      [](FGraph &g) {
        py::gil_scoped_release release;
        return cpma::graph::connected_components(g);
      },
      py::arg("graph"));
  m.def(
      "rmat",
      [](std::uint64_t nv, std::size_t ne, double a, double b, double c, double d, std::uint64_t seed) {
        const auto edges = cpma::graph::rmat_generate(nv, ne, a, b, c, d, seed);
        py::array_t<std::uint64_t> out({static_cast<py::ssize_t>(edges.size()), py::ssize_t{2}});
        auto w = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < edges.size(); ++i) {
          w(static_cast<py::ssize_t>(i), 0) = edges[i].first;
          w(static_cast<py::ssize_t>(i), 1) = edges[i].second;
        }
        return out;
      },
      py::arg("num_vertices"), py::arg("num_edges"), py::arg("a") = 0.5, py::arg("b") = 0.1, py::arg("c") = 0.1,
      py::arg("d") = 0.3, py::arg("seed") = 0);
}
