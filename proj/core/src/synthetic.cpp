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

#include "listen/synthetic.hpp"

#include <sstream>

#include "listen/errors.hpp"
#include "listen/parallel.hpp"
#include "listen/random.hpp"

namespace listen {

void SyntheticConfig::validate() const {
  if (n_users < 1 || items_per_user < 1) {
    throw ConfigError("n_users and items_per_user must be positive");
  }
  if (!(grid_step > 0.0)) {
    throw ConfigError("grid_step must be positive");
  }
  if (domains.empty()) {
    throw ConfigError("at least one feature domain is required");
  }
  for (const Bounds& domain : domains) {
    if (domain.max < domain.min) {
      throw ConfigError("feature domain is inverted");
    }
  }
  if (scorer_weights.size() != domains.size()) {
    throw ConfigError("scorer arity does not match the number of domains");
  }
  if (repetitions < 1) {
    throw ConfigError("repetitions must be positive");
  }
}

std::vector<RankingInstance> generate_corpus(const SyntheticConfig& config) {
  config.validate();
  const std::size_t n = config.domains.size();

  std::vector<std::vector<double>> grids(n);
  for (std::size_t f = 0; f < n; ++f) {
    grids[f] = uniform_grid(config.domains[f].min, config.domains[f].max,
                            config.grid_step);
  }

  Rng rng(config.seed);
  std::vector<RankingInstance> corpus;
  corpus.reserve(static_cast<std::size_t>(config.n_users));
  for (int u = 0; u < config.n_users; ++u) {
    RankingInstance instance;
    {
      std::ostringstream id;
      id << "user_" << u;
      instance.user_id = id.str();
    }
    instance.item_ids.reserve(static_cast<std::size_t>(config.items_per_user));
    instance.features.reserve(static_cast<std::size_t>(config.items_per_user));
    for (int i = 0; i < config.items_per_user; ++i) {
      std::ostringstream id;
      id << "u" << u << "_item_" << i;
      instance.item_ids.push_back(id.str());
      std::vector<double> row(n);
      for (std::size_t f = 0; f < n; ++f) {
        row[f] = grids[f][rng.uniform_index(grids[f].size())];
      }
      instance.features.push_back(std::move(row));
    }
    corpus.push_back(std::move(instance));
  }
  return corpus;
}

RankingInstance worked_example_instance() {
  RankingInstance instance;
  instance.user_id = "example";
  instance.item_ids = {"d0", "d1", "d2"};
  instance.features = {{1.0, 1.0, 1.0}, {0.5, 0.5, 1.0}, {1.0, 0.0, 0.7}};
  return instance;
}

LinearScoringModel worked_example_model() {
  return LinearScoringModel({0.2, 0.3, 0.5});
}

std::vector<Bounds> worked_example_domains() {
  return {Bounds{0.0, 1.0}, Bounds{0.0, 1.0}, Bounds{0.6, 1.0}};
}

FeatureCatalog worked_example_catalog() {
  std::vector<FeatureSpec> specs(3);
  specs[0].name = "x0";
  specs[1].name = "x1";
  specs[2].name = "x2";
  return FeatureCatalog(std::move(specs));
}

std::vector<std::vector<double>> run_matrix_check() {
  const RankingInstance instance = worked_example_instance();
  const LinearScoringModel model = worked_example_model();
  const std::vector<Bounds> domains = worked_example_domains();
  return oracle_tau_matrix(instance, model, domains, 0.01);
}

double AccuracyGrid::surface_mean() const {
  double sum = 0.0;
  std::size_t cells = 0;
  for (const auto& row : mean) {
    for (double value : row) {
      sum += value;
      ++cells;
    }
  }
  return cells == 0 ? 0.0 : sum / static_cast<double>(cells);
}

AccuracyGrid run_accuracy_grid(std::span<const int> users_axis,
                               std::span<const int> items_axis,
                               int repetitions, std::uint64_t seed,
                               std::size_t workers) {
  if (users_axis.empty() || items_axis.empty()) {
    throw ConfigError("accuracy grid axes must be non-empty");
  }
  if (repetitions < 1) {
    throw ConfigError("repetitions must be positive");
  }

  const RankingInstance instance = worked_example_instance();
  const LinearScoringModel model = worked_example_model();
  const std::vector<Bounds> domains = worked_example_domains();
  const FeatureCatalog catalog = worked_example_catalog();
  const ExplainConfig explain_config{};

  // Ground truth: the most influential feature per item according to the
  // exhaustive full-grid sweep. Items that no perturbation can move are
  // left out of the denominator.
  const std::vector<ExplanationLabel> reference =
      oracle_explain(instance, model, domains, 0.01, explain_config);
  std::vector<std::pair<std::size_t, std::size_t>> expected;  // item, feature
  for (std::size_t item = 0; item < reference.size(); ++item) {
    if (const auto feature = most_influential_feature(reference[item])) {
      expected.emplace_back(item, *feature);
    }
  }
  if (expected.empty()) {
    throw ValidationError("accuracy grid: the oracle labels are all zero");
  }

  const std::size_t cells = users_axis.size() * items_axis.size();
  const auto reps = static_cast<std::size_t>(repetitions);
  std::vector<double> slots(cells * reps, 0.0);

  parallel_for(cells * reps, workers, [&](std::size_t task) {
    const std::size_t cell = task / reps;
    const std::size_t rep = task % reps;
    const int n_users = users_axis[cell / items_axis.size()];
    const int items_per_user = items_axis[cell % items_axis.size()];

    SyntheticConfig corpus_config;
    corpus_config.n_users = n_users;
    corpus_config.items_per_user = items_per_user;
    corpus_config.grid_step = 0.01;
    corpus_config.domains = domains;
    corpus_config.scorer_weights = model.weights();
    corpus_config.seed = derive_seed(seed, cell, rep);
    const std::vector<RankingInstance> corpus = generate_corpus(corpus_config);

    SamplingConfig sampling;
    const DisruptivenessTable table =
        find_disruptiveness(corpus, model, catalog, sampling, 1);
    const PointsOfInterest pois =
        select_points_of_interest(table, catalog, sampling);
    const std::vector<ExplanationLabel> labels =
        explain_instance(instance, model, pois, explain_config);

    std::size_t matches = 0;
    for (const auto& [item, feature] : expected) {
      const auto got = most_influential_feature(labels[item]);
      if (got.has_value() && *got == feature) {
        ++matches;
      }
    }
    slots[task] = static_cast<double>(matches) /
                  static_cast<double>(expected.size());
  });

  AccuracyGrid grid;
  grid.users_axis.assign(users_axis.begin(), users_axis.end());
  grid.items_axis.assign(items_axis.begin(), items_axis.end());
  grid.mean.assign(users_axis.size(),
                   std::vector<double>(items_axis.size(), 0.0));
  grid.per_repetition.assign(
      users_axis.size(),
      std::vector<std::vector<double>>(items_axis.size(),
                                       std::vector<double>(reps, 0.0)));
  for (std::size_t u = 0; u < users_axis.size(); ++u) {
    for (std::size_t i = 0; i < items_axis.size(); ++i) {
      const std::size_t cell = u * items_axis.size() + i;
      double sum = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double value = slots[cell * reps + r];
        grid.per_repetition[u][i][r] = value;
        sum += value;
      }
      grid.mean[u][i] = sum / static_cast<double>(reps);
    }
  }
  return grid;
}

}  // namespace listen
