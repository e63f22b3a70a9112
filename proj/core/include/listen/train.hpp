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

#ifndef LISTEN_TRAIN_HPP_
#define LISTEN_TRAIN_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "listen/ranking.hpp"

namespace listen {

/// Hyper parameters of the training phase sweep.
struct SamplingConfig {
  /// Discretization of a continuous feature range.
  int continuous_samples = 20;
  /// Upper bound on the values kept for a predefined feature.
  int predefined_cap = 20;
  /// Number of bins used when selecting points of interest.
  int tau_bins = 20;
  /// When set, replaces per-kind sampling with a uniform grid of this
  /// step over the observed range (full-grid mode).
  std::optional<double> grid_step;

  void validate() const;
};

struct Bounds {
  double min = 0.0;
  double max = 0.0;
};

/// Observed per-feature extrema over a training corpus.
using FeatureBounds = std::vector<Bounds>;

struct DisruptivenessEntry {
  double sample_value = 0.0;
  /// Mean tau_AP over all trials; absent when no trial ran.
  std::optional<double> disruptive_score;
  std::size_t trial_count = 0;
};

/// Per (feature, sample value) average disruption. Lower scores mean
/// more disruptive values.
struct DisruptivenessTable {
  std::vector<std::vector<DisruptivenessEntry>> per_feature;
};

struct PoiEntry {
  double value = 0.0;
  double disruptive_score = 0.0;
};

/// The sample values kept per feature for the explaining phase.
struct PointsOfInterest {
  std::vector<std::vector<PoiEntry>> per_feature;
};

/// Column-wise extrema over every item of every instance.
FeatureBounds find_min_max(std::span<const RankingInstance> corpus);

/// Inclusive uniform grid {min, min+step, ...}. The last point never
/// exceeds max by more than rounding noise.
std::vector<double> uniform_grid(double min, double max, double step);

// The values swept for one feature:
//   predefined -> declared values inside the observed bounds, capped;
//   discrete   -> every integer in range, or interval midpoints once the
//                 count exceeds the feature's discrete_bound;
//   continuous -> continuous_samples evenly spaced values including both
//                 endpoints.
std::vector<double> sample_range(const FeatureSpec& spec, Bounds bounds,
                                 const SamplingConfig& config);

// For every feature and sample value, perturbs that one cell of every
// item whose current value differs, re-scores, re-ranks and averages the
// tau_AP against the original ranking. The reduction order is fixed
// (feature, sample, instance, item), so results do not depend on the
// worker count.
DisruptivenessTable find_disruptiveness(std::span<const RankingInstance> corpus,
                                        const ScoringModel& model,
                                        const FeatureCatalog& catalog,
                                        const SamplingConfig& config,
                                        std::size_t workers = 1);

// Splits the disruptive-score range of each feature into tau_bins equal
// bins and keeps the most disruptive (lowest-score) value per occupied
// bin; predefined features keep all their values. Ties keep the value
// seen first in ascending sample order.
PointsOfInterest select_points_of_interest(const DisruptivenessTable& table,
                                           const FeatureCatalog& catalog,
                                           const SamplingConfig& config);

}  // namespace listen

#endif  // LISTEN_TRAIN_HPP_
