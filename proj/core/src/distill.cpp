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

#include "listen/distill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "listen/errors.hpp"

namespace listen {

void DistillConfig::validate() const {
  if (hidden_layers < 1 || layer_width < 1) {
    throw ConfigError("network needs at least one hidden layer of width >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout_rate must lie in [0, 1)");
  }
  if (!(l2_coefficient >= 0.0) || !(learning_rate > 0.0)) {
    throw ConfigError("l2_coefficient must be >= 0 and learning_rate > 0");
  }
  if (batch_size < 1 || iterations < 0) {
    throw ConfigError("batch_size must be positive and iterations >= 0");
  }
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 > 0.0 && adam_beta2 < 1.0) || !(adam_epsilon > 0.0)) {
    throw ConfigError("invalid Adam parameters");
  }
  if (ranking_length < 1 || feature_count < 1) {
    throw ConfigError("ranking_length and feature_count must be positive");
  }
}

DistillDataset build_dataset(std::span<const RankingInstance> corpus,
                             std::span<const std::vector<ExplanationLabel>> labels,
                             int ranking_length) {
  if (corpus.size() != labels.size()) {
    std::ostringstream message;
    message << "corpus has " << corpus.size() << " instances but " << labels.size()
            << " label sets";
    throw ValidationError(message.str());
  }
  if (corpus.empty()) {
    throw ValidationError("corpus is empty");
  }
  if (ranking_length < 1) {
    throw ConfigError("ranking_length must be positive");
  }

  const std::size_t n = corpus.front().feature_count();
  const std::size_t dim = static_cast<std::size_t>(ranking_length) * n;

  DistillDataset dataset;
  dataset.inputs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                         static_cast<Eigen::Index>(corpus.size()));
  dataset.targets = dataset.inputs;
  dataset.masks = dataset.inputs;
  dataset.user_ids.reserve(corpus.size());

  for (std::size_t c = 0; c < corpus.size(); ++c) {
    const RankingInstance& instance = corpus[c];
    if (instance.feature_count() != n && instance.item_count() > 0) {
      throw DimensionError("instance '" + instance.user_id +
                           "' does not match the corpus feature arity");
    }
    if (labels[c].size() != instance.item_count()) {
      throw ValidationError("instance '" + instance.user_id +
                            "': label count does not match item count");
    }
    const std::size_t rows =
        std::min<std::size_t>(instance.item_count(),
                              static_cast<std::size_t>(ranking_length));
    for (std::size_t r = 0; r < rows; ++r) {
      if (labels[c][r].upward.size() != n) {
        throw ValidationError("instance '" + instance.user_id +
                              "': label arity does not match feature arity");
      }
      for (std::size_t f = 0; f < n; ++f) {
        const auto cell = static_cast<Eigen::Index>(r * n + f);
        dataset.inputs(cell, static_cast<Eigen::Index>(c)) =
            instance.features[r][f];
        dataset.targets(cell, static_cast<Eigen::Index>(c)) =
            labels[c][r].upward[f];
        dataset.masks(cell, static_cast<Eigen::Index>(c)) = 1.0;
      }
    }
    dataset.user_ids.push_back(instance.user_id);
  }
  return dataset;
}

DistilledModel init_model(const DistillConfig& config) {
  config.validate();
  DistilledModel model;
  model.config = config;

  std::vector<int> dims;
  dims.push_back(config.io_dim());
  for (int l = 0; l < config.hidden_layers; ++l) {
    dims.push_back(config.layer_width);
  }
  dims.push_back(config.io_dim());

  Rng rng(config.seed);
  model.layers.reserve(dims.size() - 1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    DistilledModel::Layer layer;
    layer.weights = Eigen::MatrixXd(fan_out, fan_in);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    // Row-major fill order so the draw sequence is well defined.
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        layer.weights(r, c) = rng.uniform(-bound, bound);
      }
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    layer.m_weights = Eigen::MatrixXd::Zero(fan_out, fan_in);
    layer.v_weights = Eigen::MatrixXd::Zero(fan_out, fan_in);
    layer.m_bias = Eigen::VectorXd::Zero(fan_out);
    layer.v_bias = Eigen::VectorXd::Zero(fan_out);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

namespace {

void check_input_dim(const DistilledModel& model, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != model.input_dim()) {
    std::ostringstream message;
    message << "network expects input dimension " << model.input_dim()
            << ", got " << inputs.rows();
    throw DimensionError(message.str());
  }
}

struct ForwardCache {
  // One entry per hidden layer.
  std::vector<Eigen::MatrixXd> pre_activation;
  std::vector<Eigen::MatrixXd> activation;
  std::vector<Eigen::MatrixXd> dropout_mask;
  Eigen::MatrixXd output;
};

// Inverted dropout: kept units are scaled by 1/(1-rate) at train time so
// inference needs no rescaling. Mask entries are drawn in column-major
// order to pin the random stream.
Eigen::MatrixXd draw_dropout_mask(Eigen::Index rows, Eigen::Index cols,
                                  double rate, Rng& rng) {
  Eigen::MatrixXd mask(rows, cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      mask(r, c) = rng.uniform01() < rate ? 0.0 : keep_scale;
    }
  }
  return mask;
}

ForwardCache forward_cached(const DistilledModel& model,
                            const Eigen::MatrixXd& inputs, Rng* dropout_rng) {
  check_input_dim(model, inputs);
  ForwardCache cache;
  const std::size_t hidden = model.layers.size() - 1;
  cache.pre_activation.reserve(hidden);
  cache.activation.reserve(hidden);
  cache.dropout_mask.reserve(hidden);

  const Eigen::MatrixXd* current = &inputs;
  for (std::size_t l = 0; l < hidden; ++l) {
    const auto& layer = model.layers[l];
    Eigen::MatrixXd pre = layer.weights * (*current);
    pre.colwise() += layer.bias;
    Eigen::MatrixXd act = pre.cwiseMax(0.0);
    if (dropout_rng != nullptr && model.config.dropout_rate > 0.0) {
      cache.dropout_mask.push_back(draw_dropout_mask(
          act.rows(), act.cols(), model.config.dropout_rate, *dropout_rng));
      act = act.cwiseProduct(cache.dropout_mask.back());
    } else {
      cache.dropout_mask.emplace_back();
    }
    cache.pre_activation.push_back(std::move(pre));
    cache.activation.push_back(std::move(act));
    current = &cache.activation.back();
  }

  const auto& output_layer = model.layers.back();
  cache.output = output_layer.weights * (*current);
  cache.output.colwise() += output_layer.bias;
  return cache;
}

double weight_penalty(const DistilledModel& model) {
  double sum = 0.0;
  for (const auto& layer : model.layers) {
    sum += layer.weights.squaredNorm();
  }
  return model.config.l2_coefficient * sum;
}

}  // namespace

Eigen::MatrixXd forward_infer(const DistilledModel& model,
                              const Eigen::MatrixXd& inputs) {
  check_input_dim(model, inputs);
  Eigen::MatrixXd current = inputs;
  const std::size_t hidden = model.layers.size() - 1;
  for (std::size_t l = 0; l < hidden; ++l) {
    const auto& layer = model.layers[l];
    Eigen::MatrixXd pre = layer.weights * current;
    pre.colwise() += layer.bias;
    current = pre.cwiseMax(0.0);
  }
  Eigen::MatrixXd out = model.layers.back().weights * current;
  out.colwise() += model.layers.back().bias;
  return out;
}

double compute_loss(const DistilledModel& model, const Eigen::MatrixXd& inputs,
                    const Eigen::MatrixXd& targets,
                    const Eigen::MatrixXd& masks) {
  const Eigen::MatrixXd output = forward_infer(model, inputs);
  const double denom = masks.sum();
  double data_loss = 0.0;
  if (denom > 0.0) {
    data_loss = ((output - targets).cwiseProduct(masks)).squaredNorm() / denom;
  }
  return data_loss + weight_penalty(model);
}

GradientResult compute_gradients(const DistilledModel& model,
                                 const Eigen::MatrixXd& inputs,
                                 const Eigen::MatrixXd& targets,
                                 const Eigen::MatrixXd& masks,
                                 Rng* dropout_rng) {
  if (inputs.cols() == 0) {
    throw ValidationError("gradient computation needs a non-empty batch");
  }
  const ForwardCache cache = forward_cached(model, inputs, dropout_rng);

  const double denom = masks.sum();
  const Eigen::MatrixXd masked_diff = (cache.output - targets).cwiseProduct(masks);

  GradientResult result;
  result.data_loss = denom > 0.0 ? masked_diff.squaredNorm() / denom : 0.0;
  result.loss = result.data_loss + weight_penalty(model);
  result.layers.resize(model.layers.size());

  // d(loss)/d(output) of the masked mean squared error.
  Eigen::MatrixXd delta =
      denom > 0.0 ? Eigen::MatrixXd(2.0 / denom * masked_diff)
                  : Eigen::MatrixXd::Zero(cache.output.rows(), cache.output.cols());

  const double l2 = model.config.l2_coefficient;
  const std::size_t hidden = model.layers.size() - 1;
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const auto& layer = model.layers[l];
    const Eigen::MatrixXd& layer_input =
        l == 0 ? inputs : cache.activation[l - 1];

    result.layers[l].weights =
        delta * layer_input.transpose() + 2.0 * l2 * layer.weights;
    result.layers[l].bias = delta.rowwise().sum();

    if (l == 0) {
      break;
    }
    Eigen::MatrixXd upstream = layer.weights.transpose() * delta;
    const std::size_t h = l - 1;  // hidden layer feeding this one
    if (h < hidden && cache.dropout_mask[h].size() != 0) {
      upstream = upstream.cwiseProduct(cache.dropout_mask[h]);
    }
    delta = upstream.cwiseProduct(
        (cache.pre_activation[h].array() > 0.0).cast<double>().matrix());
  }
  return result;
}

double train_step(DistilledModel& model, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, const Eigen::MatrixXd& masks,
                  Rng& dropout_rng) {
  const GradientResult gradients =
      compute_gradients(model, inputs, targets, masks, &dropout_rng);
  if (!std::isfinite(gradients.loss)) {
    std::ostringstream message;
    message << "training diverged at step " << model.step + 1
            << ": loss=" << gradients.loss;
    throw DivergenceError(message.str());
  }

  ++model.step;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& layer = model.layers[l];
    adam_update(layer.weights, gradients.layers[l].weights, layer.m_weights,
                layer.v_weights, model.step, model.config);
    adam_update(layer.bias, gradients.layers[l].bias, layer.m_bias,
                layer.v_bias, model.step, model.config);
  }
  return gradients.loss;
}

DatasetSplit split_dataset(std::size_t count, double train_fraction,
                           double validation_fraction, Rng& rng) {
  if (train_fraction < 0.0 || validation_fraction < 0.0 ||
      train_fraction + validation_fraction > 1.0) {
    throw ConfigError("invalid split fractions");
  }
  std::vector<std::size_t> indices(count);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  rng.shuffle(indices);

  const auto train_count =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(count)));
  const auto validation_count = static_cast<std::size_t>(
      std::llround(validation_fraction * static_cast<double>(count)));

  DatasetSplit split;
  std::size_t i = 0;
  for (; i < train_count && i < count; ++i) {
    split.train.push_back(indices[i]);
  }
  for (; i < train_count + validation_count && i < count; ++i) {
    split.validation.push_back(indices[i]);
  }
  for (; i < count; ++i) {
    split.test.push_back(indices[i]);
  }
  return split;
}

namespace {

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& source,
                               std::span<const std::size_t> indices) {
  Eigen::MatrixXd out(source.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) =
        source.col(static_cast<Eigen::Index>(indices[i]));
  }
  return out;
}

/// argmax with ties resolved to the lowest index; empty when every entry
/// is zero or below.
std::optional<std::size_t> top_feature(std::span<const double> values) {
  std::optional<std::size_t> best;
  double best_value = 0.0;
  for (std::size_t f = 0; f < values.size(); ++f) {
    if (values[f] > best_value) {
      best_value = values[f];
      best = f;
    }
  }
  return best;
}

}  // namespace

TrainResult train(DistilledModel& model, const DistillDataset& dataset,
                  const DatasetSplit& split) {
  const DistillConfig& config = model.config;
  config.validate();
  if (split.train.empty() && config.iterations > 0) {
    throw ValidationError("training partition is empty");
  }
  if (dataset.inputs.rows() != model.input_dim()) {
    throw DimensionError("dataset dimension does not match the network");
  }

  TrainResult result;
  result.loss_curve.reserve(static_cast<std::size_t>(config.iterations));

  Rng shuffle_rng(derive_seed(config.seed, 1, 0));
  Rng dropout_rng(derive_seed(config.seed, 2, 0));

  std::vector<std::size_t> order = split.train;
  std::size_t cursor = order.size();  // forces the initial shuffle

  const std::size_t batch =
      std::min<std::size_t>(static_cast<std::size_t>(config.batch_size),
                            order.size());
  std::vector<std::size_t> batch_indices(batch);

  for (int it = 0; it < config.iterations; ++it) {
    if (cursor + batch > order.size()) {
      shuffle_rng.shuffle(order);
      cursor = 0;
    }
    for (std::size_t b = 0; b < batch; ++b) {
      batch_indices[b] = order[cursor + b];
    }
    cursor += batch;

    const Eigen::MatrixXd inputs = gather_columns(dataset.inputs, batch_indices);
    const Eigen::MatrixXd targets = gather_columns(dataset.targets, batch_indices);
    const Eigen::MatrixXd masks = gather_columns(dataset.masks, batch_indices);
    result.loss_curve.push_back(
        train_step(model, inputs, targets, masks, dropout_rng));
  }

  if (!split.validation.empty()) {
    result.validation_accuracy = dataset_accuracy(model, dataset, split.validation);
  }
  if (!split.test.empty()) {
    result.test_accuracy = dataset_accuracy(model, dataset, split.test);
  }
  return result;
}

std::vector<ExplanationLabel> predict(const DistilledModel& model,
                                      const RankingInstance& instance,
                                      const ExplainConfig& config) {
  config.validate();
  const std::size_t n = static_cast<std::size_t>(model.config.feature_count);
  if (instance.item_count() > 0 && instance.feature_count() != n) {
    std::ostringstream message;
    message << "instance '" << instance.user_id << "' has "
            << instance.feature_count() << " features, model expects " << n;
    throw DimensionError(message.str());
  }
  const auto d_fixed = static_cast<std::size_t>(model.config.ranking_length);
  const std::size_t rows = std::min(instance.item_count(), d_fixed);

  Eigen::MatrixXd input = Eigen::MatrixXd::Zero(model.input_dim(), 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t f = 0; f < n; ++f) {
      input(static_cast<Eigen::Index>(r * n + f), 0) = instance.features[r][f];
    }
  }

  const Eigen::MatrixXd output = forward_infer(model, input);

  std::vector<ExplanationLabel> labels;
  labels.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    ExplanationLabel label;
    label.item_id = instance.item_ids[r];
    label.upward.resize(n);
    label.downward.assign(n, 0.0);
    for (std::size_t f = 0; f < n; ++f) {
      label.upward[f] =
          std::max(0.0, output(static_cast<Eigen::Index>(r * n + f), 0));
    }
    label.top_k = select_top_k(label.upward, config.k);
    labels.push_back(std::move(label));
  }
  return labels;
}

double accuracy(std::span<const ExplanationLabel> predicted,
                std::span<const ExplanationLabel> reference) {
  if (predicted.size() != reference.size()) {
    throw DimensionError("accuracy: label lists have different lengths");
  }
  std::size_t denominator = 0;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const auto expected = top_feature(reference[i].upward);
    if (!expected.has_value()) {
      continue;
    }
    ++denominator;
    const auto got = top_feature(predicted[i].upward);
    if (got.has_value() && *got == *expected) {
      ++matches;
    }
  }
  if (denominator == 0) {
    throw ValidationError("accuracy is undefined: every reference label is zero");
  }
  return static_cast<double>(matches) / static_cast<double>(denominator);
}

double dataset_accuracy(const DistilledModel& model,
                        const DistillDataset& dataset,
                        std::span<const std::size_t> indices) {
  if (indices.empty()) {
    throw ValidationError("accuracy is undefined on an empty partition");
  }
  const Eigen::MatrixXd inputs = gather_columns(dataset.inputs, indices);
  const Eigen::MatrixXd targets = gather_columns(dataset.targets, indices);
  const Eigen::MatrixXd masks = gather_columns(dataset.masks, indices);
  const Eigen::MatrixXd outputs = forward_infer(model, inputs);

  const auto n = static_cast<std::size_t>(model.config.feature_count);
  const auto d_fixed = static_cast<std::size_t>(model.config.ranking_length);

  std::size_t denominator = 0;
  std::size_t matches = 0;
  std::vector<double> expected_row(n);
  std::vector<double> got_row(n);
  for (Eigen::Index col = 0; col < outputs.cols(); ++col) {
    for (std::size_t r = 0; r < d_fixed; ++r) {
      const auto base = static_cast<Eigen::Index>(r * n);
      if (masks(base, col) == 0.0) {
        continue;  // padded item
      }
      for (std::size_t f = 0; f < n; ++f) {
        expected_row[f] = targets(base + static_cast<Eigen::Index>(f), col);
        got_row[f] =
            std::max(0.0, outputs(base + static_cast<Eigen::Index>(f), col));
      }
      const auto expected = top_feature(expected_row);
      if (!expected.has_value()) {
        continue;
      }
      ++denominator;
      const auto got = top_feature(got_row);
      if (got.has_value() && *got == *expected) {
        ++matches;
      }
    }
  }
  if (denominator == 0) {
    throw ValidationError("accuracy is undefined: every reference label is zero");
  }
  return static_cast<double>(matches) / static_cast<double>(denominator);
}

}  // namespace listen
