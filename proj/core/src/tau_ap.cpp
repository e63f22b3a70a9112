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

#include "listen/tau_ap.hpp"

#include <sstream>

#include "listen/errors.hpp"

namespace listen {

namespace {

// Fenwick tree over 1-based reference positions. Counting the already
// placed items with a smaller reference position gives C(i) in
// O(log N) instead of a quadratic pair scan; the counts are integers,
// so the summation below is bit-identical to the direct evaluation.
inline void fenwick_add(std::vector<std::uint32_t>& tree, std::size_t pos) {
  for (; pos < tree.size(); pos += pos & (~pos + 1)) {
    ++tree[pos];
  }
}

inline std::uint32_t fenwick_prefix(const std::vector<std::uint32_t>& tree,
                                    std::size_t pos) {
  std::uint32_t total = 0;
  for (; pos > 0; pos -= pos & (~pos + 1)) {
    total += tree[pos];
  }
  return total;
}

}  // namespace

double tau_ap_ordered(std::span<const std::size_t> evaluated_order,
                      std::span<const std::size_t> position_in_reference,
                      TauApScratch& scratch) {
  const std::size_t n = evaluated_order.size();
  if (n <= 1) {
    return 1.0;
  }
  scratch.tree.assign(n + 1, 0);

  fenwick_add(scratch.tree, position_in_reference[evaluated_order[0]] + 1);
  double weighted_sum = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t ref_pos = position_in_reference[evaluated_order[i]] + 1;
    const std::uint32_t above_in_both = fenwick_prefix(scratch.tree, ref_pos - 1);
    weighted_sum +=
        static_cast<double>(above_in_both) / static_cast<double>(i);
    fenwick_add(scratch.tree, ref_pos);
  }
  return 2.0 / static_cast<double>(n - 1) * weighted_sum - 1.0;
}

TauAp tau_ap(const Ranking& evaluated, const Ranking& reference) {
  if (evaluated.size() != reference.size()) {
    std::ostringstream message;
    message << "tau_ap: rankings cover different item sets (" << evaluated.size()
            << " vs " << reference.size() << " items)";
    throw DimensionError(message.str());
  }
  const std::size_t n = reference.size();
  if (n <= 1) {
    return TauAp{1.0};
  }
  std::vector<std::size_t> position_in_reference(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    position_in_reference[reference.order[pos]] = pos;
  }
  TauApScratch scratch;
  return TauAp{
      tau_ap_ordered(evaluated.order, position_in_reference, scratch)};
}

}  // namespace listen
