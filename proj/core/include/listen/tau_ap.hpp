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

#ifndef LISTEN_TAU_AP_HPP_
#define LISTEN_TAU_AP_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "listen/ranking.hpp"

namespace listen {

/// AP rank correlation value, always in [-1, 1].
struct TauAp {
  double value = 1.0;
};

// The AP ranking correlation coefficient between an evaluated ranking
// and a reference ranking over the same N items:
//
//   tau_AP = 2/(N-1) * sum_{i=2..N} C(i)/(i-1) - 1
//
// where C(i) counts the items placed above position i of the evaluated
// ranking that are also above the item at position i in the reference.
// Top positions carry more weight than bottom ones. N <= 1 yields 1.0:
// a singleton or empty list cannot be disrupted.
TauAp tau_ap(const Ranking& evaluated, const Ranking& reference);

/// Reusable workspace for tau_ap_ordered; avoids per-call allocation in
/// perturbation sweeps.
struct TauApScratch {
  std::vector<std::uint32_t> tree;
};

/// Low-level entry point: evaluated order plus the position of each item
/// in the reference ranking. Produces exactly the same value as tau_ap.
double tau_ap_ordered(std::span<const std::size_t> evaluated_order,
                      std::span<const std::size_t> position_in_reference,
                      TauApScratch& scratch);

}  // namespace listen

#endif  // LISTEN_TAU_AP_HPP_
