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

#include "listen/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "listen/errors.hpp"

namespace listen {

void FeatureSpec::validate() const {
  if (name.empty()) {
    throw ValidationError("feature spec has an empty name");
  }
  if (discrete_bound < 1) {
    throw ValidationError("feature '" + name + "': discrete_bound must be >= 1");
  }
  if (kind == FeatureKind::kPredefined) {
    if (predefined_values.empty()) {
      throw ValidationError("feature '" + name +
                            "': predefined features need at least one value");
    }
    for (std::size_t i = 0; i < predefined_values.size(); ++i) {
      if (!std::isfinite(predefined_values[i])) {
        throw ValidationError("feature '" + name +
                              "': predefined values must be finite");
      }
      if (i > 0 && predefined_values[i - 1] >= predefined_values[i]) {
        throw ValidationError("feature '" + name +
                              "': predefined values must be strictly increasing");
      }
    }
  } else if (!predefined_values.empty()) {
    throw ValidationError("feature '" + name +
                          "': predefined values given for a non-predefined kind");
  }
}

FeatureCatalog::FeatureCatalog(std::vector<FeatureSpec> specs)
    : specs_(std::move(specs)) {
  if (specs_.empty()) {
    throw ValidationError("feature catalog must not be empty");
  }
  std::unordered_set<std::string> names;
  for (const auto& spec : specs_) {
    spec.validate();
    if (!names.insert(spec.name).second) {
      throw ValidationError("duplicate feature name '" + spec.name + "'");
    }
  }
}

void RankingInstance::validate() const {
  if (features.size() != item_ids.size()) {
    std::ostringstream message;
    message << "instance '" << user_id << "': " << item_ids.size()
            << " item ids but " << features.size() << " feature rows";
    throw ValidationError(message.str());
  }
  const std::size_t n = feature_count();
  for (std::size_t row = 0; row < features.size(); ++row) {
    if (features[row].size() != n) {
      std::ostringstream message;
      message << "instance '" << user_id << "': row " << row << " has "
              << features[row].size() << " values, expected " << n;
      throw ValidationError(message.str());
    }
    for (double value : features[row]) {
      if (!std::isfinite(value)) {
        throw ValidationError("instance '" + user_id +
                              "': feature values must be finite");
      }
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : item_ids) {
    if (!seen.insert(id).second) {
      throw ValidationError("instance '" + user_id + "': duplicate item id '" +
                            id + "'");
    }
  }
}

LinearScoringModel::LinearScoringModel(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw ValidationError("linear scorer needs at least one weight");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) {
      throw ValidationError("linear scorer weights must be finite");
    }
  }
}

double LinearScoringModel::score(std::span<const double> features) const {
  if (features.size() != weights_.size()) {
    std::ostringstream message;
    message << "scorer expects " << weights_.size() << " features, got "
            << features.size();
    throw DimensionError(message.str());
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    total += weights_[i] * features[i];
  }
  return total;
}

std::vector<double> score_all(const ScoringModel& model,
                              const RankingInstance& instance) {
  std::vector<double> scores;
  scores.reserve(instance.item_count());
  if (instance.item_count() == 0) {
    return scores;
  }
  if (instance.feature_count() != model.arity()) {
    std::ostringstream message;
    message << "instance '" << instance.user_id << "' has "
            << instance.feature_count() << " features, scorer expects "
            << model.arity();
    throw DimensionError(message.str());
  }
  for (const auto& row : instance.features) {
    scores.push_back(model.score(row));
  }
  return scores;
}

Ranking rank(const std::vector<double>& scores) {
  for (double score : scores) {
    if (!std::isfinite(score)) {
      throw ValidationError("cannot rank non-finite scores");
    }
  }
  Ranking ranking;
  ranking.scores = scores;
  ranking.order.resize(scores.size());
  std::iota(ranking.order.begin(), ranking.order.end(), std::size_t{0});
  std::sort(ranking.order.begin(), ranking.order.end(),
            [&scores](std::size_t a, std::size_t b) {
              if (scores[a] != scores[b]) {
                return scores[a] > scores[b];
              }
              return a < b;
            });
  return ranking;
}

RankingInstance perturb(const RankingInstance& instance, std::size_t item,
                        std::size_t feature, double value) {
  if (item >= instance.item_count()) {
    throw std::out_of_range("perturb: item index " + std::to_string(item) +
                            " out of range");
  }
  if (feature >= instance.feature_count()) {
    throw std::out_of_range("perturb: feature index " +
                            std::to_string(feature) + " out of range");
  }
  if (!std::isfinite(value)) {
    throw ValidationError("perturb: replacement value must be finite");
  }
  RankingInstance copy = instance;
  copy.features[item][feature] = value;
  return copy;
}

}  // namespace listen
