/*
 * Copyright 2026 The LISTEN Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LISTEN_PARALLEL_HPP_
#define LISTEN_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace listen {

/// Maps a requested worker count to an effective one: 0 selects the
/// hardware concurrency, anything else is used as given (minimum 1).
std::size_t resolve_workers(std::size_t requested);

// Runs body(i) exactly once for every i in [0, count). Tasks must write
// only to their own output slot; reductions over the slots then happen
// in index order, so results are identical for every worker count.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace listen

#endif  // LISTEN_PARALLEL_HPP_
