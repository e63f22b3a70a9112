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

#ifndef LISTEN_SYNTHETIC_HPP_
#define LISTEN_SYNTHETIC_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "listen/explain.hpp"
#include "listen/ranking.hpp"
#include "listen/train.hpp"

namespace listen {

/// Synthetic corpus generation: feature values drawn uniformly from the
/// grid {min, min+step, ..., max} of each feature domain.
struct SyntheticConfig {
  int n_users = 0;
  int items_per_user = 0;
  double grid_step = 0.01;
  std::vector<Bounds> domains;
  std::vector<double> scorer_weights;
  std::uint64_t seed = 0;
  int repetitions = 20;

  void validate() const;
};

/// Mean accuracy per (users, items-per-user) cell plus the individual
/// repetition values.
struct AccuracyGrid {
  std::vector<int> users_axis;
  std::vector<int> items_axis;
  /// mean[u][i] for users_axis[u] x items_axis[i].
  std::vector<std::vector<double>> mean;
  /// per_repetition[u][i][r].
  std::vector<std::vector<std::vector<double>>> per_repetition;

  double surface_mean() const;
};

std::vector<RankingInstance> generate_corpus(const SyntheticConfig& config);

// The three-item, three-feature worked example: a linear scorer
// 0.2*x0 + 0.3*x1 + 0.5*x2 over items (1,1,1), (0.5,0.5,1), (1,0,0.7)
// with domains x0,x1 in [0,1] and x2 in [0.6,1]. Used as the fixed
// evaluation ranking of the faithfulness experiments.
RankingInstance worked_example_instance();
LinearScoringModel worked_example_model();
std::vector<Bounds> worked_example_domains();
FeatureCatalog worked_example_catalog();

/// Full-grid (step 0.01) mean tau_AP per (item, feature) of the worked
/// example.
std::vector<std::vector<double>> run_matrix_check();

// For every grid cell and repetition: generates a fresh corpus, runs the
// full training phase on it, explains the fixed worked-example ranking
// with the selected points of interest and scores how often the most
// influential feature per item matches the full-grid oracle. Items whose
// oracle label is all zero are excluded.
AccuracyGrid run_accuracy_grid(std::span<const int> users_axis,
                               std::span<const int> items_axis,
                               int repetitions, std::uint64_t seed,
                               std::size_t workers = 1);

}  // namespace listen

#endif  // LISTEN_SYNTHETIC_HPP_
