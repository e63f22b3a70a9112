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

#ifndef LISTEN_DISTILL_HPP_
#define LISTEN_DISTILL_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "listen/explain.hpp"
#include "listen/random.hpp"
#include "listen/ranking.hpp"

namespace listen {

// Training regime of the distilled explainer: a feedforward perceptron
// with four hidden ReLU layers of width 100, Xavier-uniform init,
// inverted dropout 0.1, l2 weight regularization, masked mean squared
// error, Adam at learning rate 2e-4, 6000 iterations of batch 50.
struct DistillConfig {
  int hidden_layers = 4;
  int layer_width = 100;
  double dropout_rate = 0.1;
  double l2_coefficient = 1e-4;
  double learning_rate = 2e-4;
  int batch_size = 50;
  int iterations = 6000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  /// Fixed ranking length the network is shaped for (d_fixed).
  int ranking_length = 0;
  /// Features per item (n). Input and output width is
  /// ranking_length * feature_count.
  int feature_count = 0;

  void validate() const;
  int io_dim() const { return ranking_length * feature_count; }
};

/// Network parameters plus Adam moment estimates. layers.back() is the
/// linear output layer; all earlier layers are ReLU hidden layers.
struct DistilledModel {
  struct Layer {
    Eigen::MatrixXd weights;  // fan_out x fan_in
    Eigen::VectorXd bias;
    Eigen::MatrixXd m_weights;
    Eigen::MatrixXd v_weights;
    Eigen::VectorXd m_bias;
    Eigen::VectorXd v_bias;
  };

  DistillConfig config;
  std::vector<Layer> layers;
  long step = 0;

  int input_dim() const { return config.io_dim(); }
  int output_dim() const { return config.io_dim(); }
};

/// Flattened training examples, one column per instance. Targets are the
/// raw upward importances; masks are zero exactly on padded cells.
struct DistillDataset {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
  Eigen::MatrixXd masks;
  std::vector<std::string> user_ids;

  std::size_t size() const { return user_ids.size(); }
};

/// Instance-level partition indices; kept disjoint so no ranking leaks
/// between training, validation and test.
struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

struct TrainResult {
  std::vector<double> loss_curve;
  std::optional<double> validation_accuracy;
  std::optional<double> test_accuracy;
};

struct LayerGradients {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

struct GradientResult {
  double loss = 0.0;
  double data_loss = 0.0;
  std::vector<LayerGradients> layers;
};

// Flattens instances row-major into inputs and their explanations into
// targets. Rows past ranking_length are dropped; shorter instances are
// zero padded with mask 0. Rows are taken in stored order, which the
// pipeline keeps in ranking order (top item first).
DistillDataset build_dataset(std::span<const RankingInstance> corpus,
                             std::span<const std::vector<ExplanationLabel>> labels,
                             int ranking_length);

/// Xavier-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases,
/// zero moments. Bit-reproducible under config.seed.
DistilledModel init_model(const DistillConfig& config);

/// Inference pass, one sample per column. No dropout, no rescaling.
Eigen::MatrixXd forward_infer(const DistilledModel& model,
                              const Eigen::MatrixXd& inputs);

/// Loss without dropout: masked mean squared error over unmasked cells
/// plus l2_coefficient * sum of squared weights (biases excluded).
double compute_loss(const DistilledModel& model, const Eigen::MatrixXd& inputs,
                    const Eigen::MatrixXd& targets,
                    const Eigen::MatrixXd& masks);

/// Backpropagation for one batch. dropout_rng == nullptr disables
/// dropout (used by the finite-difference gradient check).
GradientResult compute_gradients(const DistilledModel& model,
                                 const Eigen::MatrixXd& inputs,
                                 const Eigen::MatrixXd& targets,
                                 const Eigen::MatrixXd& masks,
                                 Rng* dropout_rng);

/// One Adam update with bias-corrected moments. step is the 1-based
/// update count.
template <typename Mat>
void adam_update(Mat& param, const Mat& grad, Mat& first_moment,
                 Mat& second_moment, long step, const DistillConfig& config) {
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  first_moment = b1 * first_moment + (1.0 - b1) * grad;
  second_moment = b2 * second_moment + (1.0 - b2) * grad.cwiseProduct(grad);
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step));
  param -= config.learning_rate *
           (first_moment / correction1)
               .cwiseQuotient(((second_moment / correction2).cwiseSqrt().array() +
                               config.adam_epsilon)
                                  .matrix());
}

/// One optimization step over a batch; returns the batch loss. Throws
/// DivergenceError on a non-finite loss.
double train_step(DistilledModel& model, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, const Eigen::MatrixXd& masks,
                  Rng& dropout_rng);

/// Seeded 3-way split by instance.
DatasetSplit split_dataset(std::size_t count, double train_fraction,
                           double validation_fraction, Rng& rng);

/// Runs config.iterations train steps over seeded, reshuffled
/// minibatches and evaluates the held-out partitions.
TrainResult train(DistilledModel& model, const DistillDataset& dataset,
                  const DatasetSplit& split);

/// Inference on one instance: clamps negative outputs to zero and builds
/// labels with the same top-k selection and normalization as the
/// explaining phase. Labels are emitted for real items only.
std::vector<ExplanationLabel> predict(const DistilledModel& model,
                                      const RankingInstance& instance,
                                      const ExplainConfig& config);

/// Fraction of items whose predicted top-1 upward feature matches the
/// reference. Items with an all-zero reference label are excluded; an
/// empty denominator is an error.
double accuracy(std::span<const ExplanationLabel> predicted,
                std::span<const ExplanationLabel> reference);

/// accuracy() evaluated directly on dataset columns.
double dataset_accuracy(const DistilledModel& model,
                        const DistillDataset& dataset,
                        std::span<const std::size_t> indices);

}  // namespace listen

#endif  // LISTEN_DISTILL_HPP_
