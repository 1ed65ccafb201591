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

#include "cpma/batch.hpp"

#include <algorithm>

#include "cpma/parallel.hpp"

namespace cpma
{
Batch Batch::sort_dedupe(std::vector<Key> raw)
{
  if (std::find(raw.begin(), raw.end(), Key{0}) != raw.end()) {
    throw DomainError("key 0 is reserved as the empty sentinel");
  }
  par::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  return Batch{std::move(raw)};
}

Batch Batch::from_sorted(std::vector<Key> sorted)
{
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] == 0 || (i > 0 && sorted[i] <= sorted[i - 1])) {
      throw DomainError("batch keys must be strictly increasing and nonzero");
    }
  }
  return Batch{std::move(sorted)};
}

}  // namespace cpma
