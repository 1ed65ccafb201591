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

#ifndef CPMA_PARALLEL_HPP
#define CPMA_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <oneapi/tbb/blocked_range.h>
#include <oneapi/tbb/info.h>
#include <oneapi/tbb/global_control.h>
#include <oneapi/tbb/parallel_for.h>
#include <oneapi/tbb/parallel_invoke.h>
#include <oneapi/tbb/parallel_sort.h>
#include <oneapi/tbb/task_arena.h>

// Thin fork-join layer over oneTBB. Every primitive here is deterministic in its result; only
// the schedule depends on the worker count.
namespace cpma::par
{
template <class F>
void parallel_for(std::size_t begin, std::size_t end, F &&f, std::size_t grain = 1)
{
  if (end <= begin) {
    return;
  }
  if (end - begin <= grain) {
    for (std::size_t i = begin; i < end; ++i) {
      f(i);
    }
    return;
  }
  tbb::parallel_for(tbb::blocked_range<std::size_t>(begin, end, grain), [&f](const tbb::blocked_range<std::size_t> &r) {
    for (std::size_t i = r.begin(); i != r.end(); ++i) {
      f(i);
    }
  });
}

template <class... Fs>
void par_do(Fs &&...fs)
{
  tbb::parallel_invoke(std::forward<Fs>(fs)...);
}

template <class It, class Cmp = std::less<>>
void sort(It first, It last, Cmp cmp = {})
{
  tbb::parallel_sort(first, last, cmp);
}

inline int hardware_threads() { return tbb::info::default_concurrency(); }

/// Runs `f` inside an arena of exactly `threads` workers (oversubscription allowed).
template <class F>
decltype(auto) with_threads(int threads, F &&f)
{
  threads = std::max(1, threads);
  // lift the process-wide worker cap so arenas wider than the machine really get their workers
  tbb::global_control cap(tbb::global_control::max_allowed_parallelism,
                          static_cast<std::size_t>(std::max(threads, tbb::info::default_concurrency())));
  tbb::task_arena arena(threads);
  return arena.execute(std::forward<F>(f));
}

namespace detail
{
template <class T>
void merge_into(std::span<const T> a, std::span<const T> b, T *out, std::size_t grain)
{
  if (a.size() < b.size()) {
    std::swap(a, b);
  }
  if (a.size() + b.size() <= grain || b.empty()) {
    std::merge(a.begin(), a.end(), b.begin(), b.end(), out);
    return;
  }
  const std::size_t ma = a.size() / 2;
  const std::size_t mb = static_cast<std::size_t>(std::lower_bound(b.begin(), b.end(), a[ma]) - b.begin());
  par_do([&] { merge_into(a.first(ma), b.first(mb), out, grain); },
         [&] { merge_into(a.subspan(ma), b.subspan(mb), out + ma + mb, grain); });
}
}  // namespace detail

/// Sorted union of two strictly increasing sequences, computed by a divide-and-conquer merge.
template <class T>
void merge_union(std::span<const T> a, std::span<const T> b, std::vector<T> &out, std::size_t grain = 4096)
{
  out.resize(a.size() + b.size());
  detail::merge_into(a, b, out.data(), grain);
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

/// Elements of `a` absent from `b`; both strictly increasing.
template <class T>
void set_difference(std::span<const T> a, std::span<const T> b, std::vector<T> &out, std::size_t grain = 4096)
{
  out.clear();
  if (a.size() <= grain) {
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return;
  }
  std::vector<unsigned char> keep(a.size());
  parallel_for(
      0, a.size(), [&](std::size_t i) { keep[i] = !std::binary_search(b.begin(), b.end(), a[i]); }, grain);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (keep[i]) {
      out.push_back(a[i]);
    }
  }
}

}  // namespace cpma::par

#endif  // CPMA_PARALLEL_HPP
