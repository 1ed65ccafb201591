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

#ifndef CPMA_COMMON_HPP
#define CPMA_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cpma
{
/// Element type of every set in this library. Zero is reserved as the empty-cell sentinel.
using Key = std::uint64_t;

/// Invalid structure configuration (density bounds, growing factor, leaf size).
class ConfigError : public std::invalid_argument
{
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument outside the accepted domain, e.g. key zero or a vertex id >= 2^32.
class DomainError : public std::domain_error
{
 public:
  using std::domain_error::domain_error;
};

/// Malformed encoded data (truncated varint, bad snapshot).
class CorruptionError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (e.g. parent of the root).
class ContractViolation : public std::logic_error
{
 public:
  using std::logic_error::logic_error;
};

}  // namespace cpma

#endif  // CPMA_COMMON_HPP
