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

#ifndef CPMA_RANDOM_HPP
#define CPMA_RANDOM_HPP

#include <cstdint>

#include "cpma/common.hpp"

namespace cpma
{
/// The splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based splitmix64 stream. `at(i)` is the i-th output, so parallel generators can
/// jump straight to their slice and stay reproducible for any thread count.
class SplitMix64
{
 public:
  explicit constexpr SplitMix64(std::uint64_t seed = 0) : seed_{seed} {}

  [[nodiscard]] constexpr std::uint64_t at(std::uint64_t i) const
  {
    return mix64(seed_ + (i + 1) * 0x9e3779b97f4a7c15ULL);
  }
  constexpr std::uint64_t next() { return at(counter_++); }

  /// Uniform in [0, bound) by 128-bit multiply-shift.
  constexpr std::uint64_t below(std::uint64_t bound)
  {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }
  /// Uniform double in [0, 1).
  constexpr double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform key in [1, 2^bits).
  constexpr Key key(unsigned bits) { return 1 + below((bits >= 64 ? ~Key{0} : (Key{1} << bits)) - 1); }

  // UniformRandomBitGenerator, for <algorithm> and <random>
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  constexpr result_type operator()() { return next(); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace cpma

#endif  // CPMA_RANDOM_HPP
