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

#include "listen/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "listen/errors.hpp"
#include "listen/tau_ap.hpp"

namespace listen {

void ExplainConfig::validate() const {
  if (k < 1) {
    throw ConfigError("explain config: k must be positive");
  }
}

std::vector<double> normalize_label(std::span<const double> importances) {
  double sum = 0.0;
  for (double value : importances) {
    if (value < 0.0 || !std::isfinite(value)) {
      throw ValidationError("importances must be finite and non-negative");
    }
    sum += value;
  }
  std::vector<double> normalized(importances.begin(), importances.end());
  if (sum > 0.0) {
    for (double& value : normalized) {
      value /= sum;
    }
  }
  return normalized;
}

std::vector<WeightedFeature> select_top_k(std::span<const double> importances,
                                          int k) {
  if (k < 1) {
    throw ConfigError("top-k selection: k must be positive");
  }
  std::vector<std::size_t> indices(importances.size());
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  std::sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
    if (importances[a] != importances[b]) {
      return importances[a] > importances[b];
    }
    return a < b;
  });
  const std::size_t kept =
      std::min(indices.size(), static_cast<std::size_t>(k));

  std::vector<double> selected(kept);
  for (std::size_t i = 0; i < kept; ++i) {
    selected[i] = importances[indices[i]];
  }
  const std::vector<double> weights = normalize_label(selected);

  std::vector<WeightedFeature> result(kept);
  for (std::size_t i = 0; i < kept; ++i) {
    result[i] = WeightedFeature{indices[i], weights[i]};
  }
  return result;
}

namespace {

struct SweepResult {
  std::vector<ExplanationLabel> labels;
  std::vector<std::vector<double>> tau_matrix;
};

// The explaining sweep: for every item, feature and candidate value that
// differs from the current cell, perturb that single cell, re-score the
// whole instance, re-rank and compare against the original ranking.
// Trials that lower the item's own score accumulate into the upward
// label, ones that raise it into the downward label; equal scores count
// in neither direction. The tau matrix pools every trial.
SweepResult run_sweep(const RankingInstance& instance,
                      const ScoringModel& model,
                      const std::vector<std::vector<double>>& values_per_feature,
                      const ExplainConfig& config) {
  config.validate();
  const std::size_t d = instance.item_count();
  const std::size_t n = instance.feature_count();
  if (values_per_feature.size() != n) {
    std::ostringstream message;
    message << "points of interest cover " << values_per_feature.size()
            << " features, instance '" << instance.user_id << "' has " << n;
    throw ConfigError(message.str());
  }

  const std::vector<double> base_scores = score_all(model, instance);
  const Ranking base = rank(base_scores);

  SweepResult result;
  result.labels.reserve(d);
  result.tau_matrix.assign(d, std::vector<double>(n, 1.0));

  for (std::size_t item = 0; item < d; ++item) {
    ExplanationLabel label;
    label.item_id = instance.item_ids[item];
    label.upward.assign(n, 0.0);
    label.downward.assign(n, 0.0);

    for (std::size_t f = 0; f < n; ++f) {
      double upward_sum = 0.0;
      double downward_sum = 0.0;
      double pooled_sum = 0.0;
      std::size_t upward_count = 0;
      std::size_t downward_count = 0;
      std::size_t pooled_count = 0;

      const double current = instance.features[item][f];
      for (double value : values_per_feature[f]) {
        if (value == current) {
          continue;
        }
        const RankingInstance perturbed = perturb(instance, item, f, value);
        const std::vector<double> scores = score_all(model, perturbed);
        const Ranking perturbed_ranking = rank(scores);
        const double tau = tau_ap(perturbed_ranking, base).value;

        pooled_sum += tau;
        ++pooled_count;
        if (scores[item] < base_scores[item]) {
          upward_sum += tau;
          ++upward_count;
        } else if (scores[item] > base_scores[item]) {
          downward_sum += tau;
          ++downward_count;
        }
      }

      if (upward_count > 0) {
        label.upward[f] = std::max(
            0.0, 1.0 - upward_sum / static_cast<double>(upward_count));
      }
      if (downward_count > 0) {
        label.downward[f] = std::max(
            0.0, 1.0 - downward_sum / static_cast<double>(downward_count));
      }
      if (pooled_count > 0) {
        result.tau_matrix[item][f] =
            pooled_sum / static_cast<double>(pooled_count);
      }
    }

    label.top_k = select_top_k(label.upward, config.k);
    result.labels.push_back(std::move(label));
  }
  return result;
}

std::vector<std::vector<double>> domain_grids(std::span<const Bounds> domains,
                                              double grid_step) {
  std::vector<std::vector<double>> grids;
  grids.reserve(domains.size());
  for (const Bounds& domain : domains) {
    grids.push_back(uniform_grid(domain.min, domain.max, grid_step));
  }
  return grids;
}

}  // namespace

std::vector<ExplanationLabel> explain_instance(const RankingInstance& instance,
                                               const ScoringModel& model,
                                               const PointsOfInterest& pois,
                                               const ExplainConfig& config) {
  std::vector<std::vector<double>> values(pois.per_feature.size());
  for (std::size_t f = 0; f < pois.per_feature.size(); ++f) {
    values[f].reserve(pois.per_feature[f].size());
    for (const PoiEntry& entry : pois.per_feature[f]) {
      values[f].push_back(entry.value);
    }
  }
  return run_sweep(instance, model, values, config).labels;
}

std::vector<ExplanationLabel> oracle_explain(const RankingInstance& instance,
                                             const ScoringModel& model,
                                             std::span<const Bounds> domains,
                                             double grid_step,
                                             const ExplainConfig& config) {
  return run_sweep(instance, model, domain_grids(domains, grid_step), config)
      .labels;
}

std::vector<std::vector<double>> oracle_tau_matrix(
    const RankingInstance& instance, const ScoringModel& model,
    std::span<const Bounds> domains, double grid_step) {
  return run_sweep(instance, model, domain_grids(domains, grid_step),
                   ExplainConfig{})
      .tau_matrix;
}

std::optional<std::size_t> most_influential_feature(
    const ExplanationLabel& label) {
  std::optional<std::size_t> best;
  double best_importance = 0.0;
  for (std::size_t f = 0; f < label.upward.size(); ++f) {
    const double importance = std::max(label.upward[f], label.downward[f]);
    if (importance > best_importance) {
      best_importance = importance;
      best = f;
    }
  }
  return best;
}

}  // namespace listen
