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

#ifndef LISTEN_EXPLAIN_HPP_
#define LISTEN_EXPLAIN_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "listen/ranking.hpp"
#include "listen/train.hpp"

namespace listen {

struct ExplainConfig {
  /// Number of features reported per item.
  int k = 3;

  void validate() const;
};

struct WeightedFeature {
  std::size_t feature = 0;
  double weight = 0.0;
};

// Per-item explanation. Perturbations that lower the item's score feed
// the upward label (the current value pushes the item up); ones that
// raise it feed the downward label. Importance per direction is
// 1 - mean(tau_AP), floored at zero, so an undisruptable feature scores
// exactly 0. The user-facing top_k is drawn from the upward label and
// normalized over the selected features.
struct ExplanationLabel {
  std::string item_id;
  std::vector<double> upward;
  std::vector<double> downward;
  std::vector<WeightedFeature> top_k;
};

/// Proportional normalization; an all-zero input stays all zero.
/// Negative entries are rejected.
std::vector<double> normalize_label(std::span<const double> importances);

/// Ranks features by descending importance (ties: ascending index),
/// keeps at most k and normalizes the kept weights.
std::vector<WeightedFeature> select_top_k(std::span<const double> importances,
                                          int k);

/// Explains every item of one instance using the trained points of
/// interest. The POI list must cover every feature of the instance.
std::vector<ExplanationLabel> explain_instance(const RankingInstance& instance,
                                               const ScoringModel& model,
                                               const PointsOfInterest& pois,
                                               const ExplainConfig& config);

// Brute-force ground truth: identical to explain_instance but sweeping
// exhaustive uniform grids over analytic feature domains instead of
// points of interest.
std::vector<ExplanationLabel> oracle_explain(const RankingInstance& instance,
                                             const ScoringModel& model,
                                             std::span<const Bounds> domains,
                                             double grid_step,
                                             const ExplainConfig& config);

/// Diagnostic companion of oracle_explain: mean tau_AP per (item,
/// feature) pooled over every grid trial regardless of direction.
std::vector<std::vector<double>> oracle_tau_matrix(
    const RankingInstance& instance, const ScoringModel& model,
    std::span<const Bounds> domains, double grid_step);

/// Feature with the largest importance in either direction; ties go to
/// the lowest index. Empty when the label is all zero.
std::optional<std::size_t> most_influential_feature(
    const ExplanationLabel& label);

}  // namespace listen

#endif  // LISTEN_EXPLAIN_HPP_
