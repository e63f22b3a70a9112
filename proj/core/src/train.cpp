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

#include "listen/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "listen/errors.hpp"
#include "listen/parallel.hpp"
#include "listen/tau_ap.hpp"

namespace listen {

void SamplingConfig::validate() const {
  if (continuous_samples < 1) {
    throw ConfigError("continuous_samples must be positive");
  }
  if (predefined_cap < 1) {
    throw ConfigError("predefined_cap must be positive");
  }
  if (tau_bins < 1) {
    throw ConfigError("tau_bins must be positive");
  }
  if (grid_step.has_value() && !(*grid_step > 0.0)) {
    throw ConfigError("grid_step must be positive");
  }
}

namespace {

void check_corpus(std::span<const RankingInstance> corpus,
                  std::size_t expected_features) {
  if (corpus.empty()) {
    throw ValidationError("corpus is empty");
  }
  for (const auto& instance : corpus) {
    if (instance.item_count() > 0 &&
        instance.feature_count() != expected_features) {
      std::ostringstream message;
      message << "instance '" << instance.user_id << "' has "
              << instance.feature_count() << " features, expected "
              << expected_features;
      throw DimensionError(message.str());
    }
  }
}

}  // namespace

FeatureBounds find_min_max(std::span<const RankingInstance> corpus) {
  if (corpus.empty()) {
    throw ValidationError("corpus is empty");
  }
  std::size_t n = 0;
  for (const auto& instance : corpus) {
    if (instance.item_count() > 0) {
      n = instance.feature_count();
      break;
    }
  }
  check_corpus(corpus, n);

  FeatureBounds bounds(n);
  bool first = true;
  for (const auto& instance : corpus) {
    for (const auto& row : instance.features) {
      for (std::size_t f = 0; f < n; ++f) {
        if (first) {
          bounds[f] = Bounds{row[f], row[f]};
        } else {
          bounds[f].min = std::min(bounds[f].min, row[f]);
          bounds[f].max = std::max(bounds[f].max, row[f]);
        }
      }
      first = false;
    }
  }
  if (first) {
    throw ValidationError("corpus contains no items");
  }
  return bounds;
}

std::vector<double> uniform_grid(double min, double max, double step) {
  if (!(step > 0.0)) {
    throw ConfigError("grid step must be positive");
  }
  if (max < min) {
    throw ValidationError("grid bounds are inverted");
  }
  // The small slack keeps K stable when (max-min)/step is an integer up
  // to rounding, e.g. (1.0-0.6)/0.01.
  const auto count = static_cast<std::size_t>((max - min) / step + 1e-9);
  std::vector<double> values;
  values.reserve(count + 1);
  for (std::size_t k = 0; k <= count; ++k) {
    values.push_back(min + static_cast<double>(k) * step);
  }
  return values;
}

std::vector<double> sample_range(const FeatureSpec& spec, Bounds bounds,
                                 const SamplingConfig& config) {
  config.validate();
  if (bounds.max < bounds.min) {
    throw ValidationError("feature '" + spec.name + "': inverted bounds");
  }

  switch (spec.kind) {
    case FeatureKind::kPredefined: {
      std::vector<double> values;
      for (double v : spec.predefined_values) {
        if (v >= bounds.min && v <= bounds.max) {
          values.push_back(v);
        }
      }
      if (values.size() > static_cast<std::size_t>(config.predefined_cap)) {
        values.resize(static_cast<std::size_t>(config.predefined_cap));
      }
      return values;
    }
    case FeatureKind::kDiscrete: {
      const double lo = std::ceil(bounds.min);
      const double hi = std::floor(bounds.max);
      if (hi < lo) {
        return {};
      }
      const auto count = static_cast<long long>(hi - lo) + 1;
      if (count <= spec.discrete_bound) {
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(count));
        for (long long k = 0; k < count; ++k) {
          values.push_back(lo + static_cast<double>(k));
        }
        return values;
      }
      // Range too large: one integer per interval, taken at the midpoint.
      const double width =
          (bounds.max - bounds.min) / static_cast<double>(spec.discrete_bound);
      std::vector<double> values;
      values.reserve(static_cast<std::size_t>(spec.discrete_bound));
      for (int i = 0; i < spec.discrete_bound; ++i) {
        const double midpoint =
            bounds.min + (static_cast<double>(i) + 0.5) * width;
        const double value = std::round(midpoint);
        if (values.empty() || values.back() != value) {
          values.push_back(value);
        }
      }
      return values;
    }
    case FeatureKind::kContinuous: {
      const int samples = config.continuous_samples;
      if (samples == 1 || bounds.min == bounds.max) {
        return {bounds.min};
      }
      std::vector<double> values;
      values.reserve(static_cast<std::size_t>(samples));
      values.push_back(bounds.min);
      const double span = bounds.max - bounds.min;
      for (int j = 1; j + 1 < samples; ++j) {
        values.push_back(bounds.min + span * static_cast<double>(j) /
                                          static_cast<double>(samples - 1));
      }
      values.push_back(bounds.max);
      return values;
    }
  }
  throw ConfigError("feature '" + spec.name + "': unknown feature kind");
}

namespace {

struct InstanceContext {
  const RankingInstance* instance = nullptr;
  std::vector<double> base_scores;
  std::vector<std::size_t> position_in_reference;
};

std::vector<InstanceContext> build_contexts(
    std::span<const RankingInstance> corpus, const ScoringModel& model) {
  std::vector<InstanceContext> contexts;
  contexts.reserve(corpus.size());
  for (const auto& instance : corpus) {
    InstanceContext context;
    context.instance = &instance;
    context.base_scores = score_all(model, instance);
    const Ranking base = rank(context.base_scores);
    context.position_in_reference.resize(base.size());
    for (std::size_t pos = 0; pos < base.size(); ++pos) {
      context.position_in_reference[base.order[pos]] = pos;
    }
    contexts.push_back(std::move(context));
  }
  return contexts;
}

// One (feature, sample value) trial sweep over the whole corpus. The
// accumulation order is instance, then item, so the mean is independent
// of how tasks are scheduled.
DisruptivenessEntry sweep_sample_value(
    const std::vector<InstanceContext>& contexts, const ScoringModel& model,
    std::size_t feature, double value, std::vector<double>& row_scratch,
    std::vector<double>& score_scratch, std::vector<std::size_t>& order_scratch,
    TauApScratch& tau_scratch) {
  DisruptivenessEntry entry;
  entry.sample_value = value;
  double sum = 0.0;
  std::size_t trials = 0;

  for (const auto& context : contexts) {
    const RankingInstance& instance = *context.instance;
    const std::size_t d = instance.item_count();
    for (std::size_t item = 0; item < d; ++item) {
      if (instance.features[item][feature] == value) {
        continue;
      }
      row_scratch = instance.features[item];
      row_scratch[feature] = value;

      score_scratch = context.base_scores;
      score_scratch[item] = model.score(row_scratch);

      order_scratch.resize(d);
      std::iota(order_scratch.begin(), order_scratch.end(), std::size_t{0});
      std::sort(order_scratch.begin(), order_scratch.end(),
                [&](std::size_t a, std::size_t b) {
                  if (score_scratch[a] != score_scratch[b]) {
                    return score_scratch[a] > score_scratch[b];
                  }
                  return a < b;
                });

      sum += tau_ap_ordered(order_scratch, context.position_in_reference,
                            tau_scratch);
      ++trials;
    }
  }

  entry.trial_count = trials;
  if (trials > 0) {
    entry.disruptive_score = sum / static_cast<double>(trials);
  }
  return entry;
}

}  // namespace

DisruptivenessTable find_disruptiveness(std::span<const RankingInstance> corpus,
                                        const ScoringModel& model,
                                        const FeatureCatalog& catalog,
                                        const SamplingConfig& config,
                                        std::size_t workers) {
  config.validate();
  const std::size_t n = catalog.size();
  check_corpus(corpus, n);
  if (model.arity() != n) {
    std::ostringstream message;
    message << "scorer expects " << model.arity() << " features, catalog has "
            << n;
    throw DimensionError(message.str());
  }

  const FeatureBounds bounds = find_min_max(corpus);
  std::vector<std::vector<double>> ranges(n);
  for (std::size_t f = 0; f < n; ++f) {
    ranges[f] = config.grid_step.has_value()
                    ? uniform_grid(bounds[f].min, bounds[f].max,
                                   *config.grid_step)
                    : sample_range(catalog.spec(f), bounds[f], config);
  }

  const std::vector<InstanceContext> contexts = build_contexts(corpus, model);

  struct Task {
    std::size_t feature;
    std::size_t value_index;
  };
  std::vector<Task> tasks;
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t v = 0; v < ranges[f].size(); ++v) {
      tasks.push_back(Task{f, v});
    }
  }

  std::vector<DisruptivenessEntry> slots(tasks.size());
  parallel_for(tasks.size(), workers, [&](std::size_t task_index) {
    const Task& task = tasks[task_index];
    std::vector<double> row_scratch;
    std::vector<double> score_scratch;
    std::vector<std::size_t> order_scratch;
    TauApScratch tau_scratch;
    slots[task_index] = sweep_sample_value(
        contexts, model, task.feature, ranges[task.feature][task.value_index],
        row_scratch, score_scratch, order_scratch, tau_scratch);
  });

  DisruptivenessTable table;
  table.per_feature.resize(n);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    table.per_feature[tasks[t].feature].push_back(slots[t]);
  }
  return table;
}

PointsOfInterest select_points_of_interest(const DisruptivenessTable& table,
                                           const FeatureCatalog& catalog,
                                           const SamplingConfig& config) {
  config.validate();
  if (table.per_feature.size() != catalog.size()) {
    std::ostringstream message;
    message << "table covers " << table.per_feature.size()
            << " features, catalog has " << catalog.size();
    throw DimensionError(message.str());
  }

  PointsOfInterest pois;
  pois.per_feature.resize(catalog.size());

  for (std::size_t f = 0; f < catalog.size(); ++f) {
    std::vector<PoiEntry> scored;
    for (const auto& entry : table.per_feature[f]) {
      if (entry.disruptive_score.has_value()) {
        scored.push_back(PoiEntry{entry.sample_value, *entry.disruptive_score});
      }
    }
    if (scored.empty()) {
      throw ConfigError("feature '" + catalog.spec(f).name +
                        "' has no sampled values with trials");
    }

    if (catalog.spec(f).kind == FeatureKind::kPredefined) {
      if (scored.size() > static_cast<std::size_t>(config.predefined_cap)) {
        scored.resize(static_cast<std::size_t>(config.predefined_cap));
      }
      pois.per_feature[f] = std::move(scored);
      continue;
    }

    double lo = scored.front().disruptive_score;
    double hi = lo;
    for (const auto& entry : scored) {
      lo = std::min(lo, entry.disruptive_score);
      hi = std::max(hi, entry.disruptive_score);
    }

    if (lo == hi) {
      // Zero-width score range: a single bin, keep the first value.
      pois.per_feature[f].push_back(scored.front());
      continue;
    }

    const std::size_t bins = static_cast<std::size_t>(config.tau_bins);
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::optional<PoiEntry>> best(bins);
    for (const auto& entry : scored) {
      auto bin = static_cast<std::size_t>((entry.disruptive_score - lo) / width);
      bin = std::min(bin, bins - 1);  // the last bin is upper-inclusive
      if (!best[bin].has_value() ||
          entry.disruptive_score < best[bin]->disruptive_score) {
        best[bin] = entry;
      }
    }
    for (const auto& kept : best) {
      if (kept.has_value()) {
        pois.per_feature[f].push_back(*kept);
      }
    }
  }
  return pois;
}

}  // namespace listen
