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

#ifndef LISTEN_RANKING_HPP_
#define LISTEN_RANKING_HPP_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace listen {

enum class FeatureKind {
  kContinuous,
  kDiscrete,
  kPredefined,
};

/// Static description of one ranking feature: how its value domain is
/// sampled when the feature is perturbed.
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  /// Required iff kind == kPredefined; strictly increasing, non-empty.
  std::vector<double> predefined_values;
  /// Maximum number of distinct integers swept exhaustively for a
  /// discrete feature; larger ranges fall back to interval midpoints.
  int discrete_bound = 100;

  void validate() const;
};

/// Ordered feature set; the position in the list is the feature index.
class FeatureCatalog {
 public:
  explicit FeatureCatalog(std::vector<FeatureSpec> specs);

  std::size_t size() const { return specs_.size(); }
  const FeatureSpec& spec(std::size_t feature) const { return specs_.at(feature); }
  const std::vector<FeatureSpec>& specs() const { return specs_; }

 private:
  std::vector<FeatureSpec> specs_;
};

/// One user's candidate set: a dense d x n feature value matrix, one row
/// per item. Immutable by convention; operations return copies.
struct RankingInstance {
  std::string user_id;
  std::vector<std::string> item_ids;
  std::vector<std::vector<double>> features;

  std::size_t item_count() const { return item_ids.size(); }
  std::size_t feature_count() const {
    return features.empty() ? 0 : features.front().size();
  }

  /// Checks the structural invariants: row count equals item count, rows
  /// are rectangular, entries finite, item ids unique.
  void validate() const;
};

/// Pure scoring capability. Implementations must be deterministic and
/// safe to invoke from multiple threads.
class ScoringModel {
 public:
  virtual ~ScoringModel() = default;
  virtual std::size_t arity() const = 0;
  virtual double score(std::span<const double> features) const = 0;
};

class LinearScoringModel final : public ScoringModel {
 public:
  explicit LinearScoringModel(std::vector<double> weights);

  std::size_t arity() const override { return weights_.size(); }
  double score(std::span<const double> features) const override;
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

/// A materialized ranking: order[pos] is the item index at position pos
/// (position 0 is the top), scores are indexed by item.
struct Ranking {
  std::vector<std::size_t> order;
  std::vector<double> scores;

  std::size_t size() const { return order.size(); }
};

/// Applies the model to every row. Zero-row instances yield an empty
/// list; otherwise the instance arity must match the model's.
std::vector<double> score_all(const ScoringModel& model,
                              const RankingInstance& instance);

/// Sorts item indices by descending score; equal scores keep ascending
/// item index order, so the result is deterministic.
Ranking rank(const std::vector<double>& scores);

/// Returns a copy of the instance with exactly one cell replaced.
RankingInstance perturb(const RankingInstance& instance, std::size_t item,
                        std::size_t feature, double value);

}  // namespace listen

#endif  // LISTEN_RANKING_HPP_
