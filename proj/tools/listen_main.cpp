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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "listen/distill.hpp"
#include "listen/errors.hpp"
#include "listen/explain.hpp"
#include "listen/io.hpp"
#include "listen/parallel.hpp"
#include "listen/random.hpp"
#include "listen/synthetic.hpp"
#include "listen/tau_ap.hpp"
#include "listen/train.hpp"
#include "listen/version.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

std::string to_text(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

/// Ensures the output directory exists and returns it.
fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

void check_catalog_arity(const listen::FeatureCatalog& catalog,
                         std::span<const listen::RankingInstance> corpus) {
  for (const auto& instance : corpus) {
    if (instance.item_count() == 0) {
      continue;
    }
    if (instance.feature_count() != catalog.size()) {
      std::ostringstream message;
      const std::size_t have = instance.feature_count();
      message << "instance '" << instance.user_id << "' carries " << have
              << " features but the specs define " << catalog.size();
      if (have < catalog.size()) {
        message << " (missing values for feature '" << catalog.spec(have).name
                << "')";
      }
      throw listen::DimensionError(message.str());
    }
  }
}

double percentile(std::vector<double> samples, double fraction) {
  std::sort(samples.begin(), samples.end());
  if (samples.empty()) {
    return 0.0;
  }
  const auto index = static_cast<std::size_t>(
      fraction * static_cast<double>(samples.size() - 1) + 0.5);
  return samples[std::min(index, samples.size() - 1)];
}

struct TrainPoisOptions {
  std::string data;
  std::string specs;
  std::string scorer;
  std::string out;
  int samples = 20;
  int bins = 20;
  int predefined_cap = 20;
  double step = 0.0;  // > 0 switches to full-grid mode
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

int run_train_pois(const TrainPoisOptions& options) {
  const auto started = Clock::now();
  const fs::path out_dir = prepare_out_dir(options.out);

  const listen::FeatureCatalog catalog = listen::load_catalog(options.specs);
  const std::vector<listen::RankingInstance> corpus =
      listen::load_corpus(options.data);
  const listen::LinearScoringModel scorer = listen::load_scorer(options.scorer);
  check_catalog_arity(catalog, corpus);
  const double load_ms = elapsed_ms(started);

  listen::SamplingConfig config;
  config.continuous_samples = options.samples;
  config.tau_bins = options.bins;
  config.predefined_cap = options.predefined_cap;
  if (options.step > 0.0) {
    config.grid_step = options.step;
  }

  const auto sweep_started = Clock::now();
  const listen::FeatureBounds bounds = listen::find_min_max(corpus);
  const listen::DisruptivenessTable table = listen::find_disruptiveness(
      corpus, scorer, catalog, config, options.workers);
  const listen::PointsOfInterest pois =
      listen::select_points_of_interest(table, catalog, config);
  const double sweep_ms = elapsed_ms(sweep_started);

  listen::save_bounds(bounds, out_dir / "bounds.json");
  listen::save_disruptiveness(table, out_dir / "disruptiveness.json");
  listen::save_pois(pois, out_dir / "pois.json");

  listen::RunManifest manifest;
  manifest.command = "train-pois";
  manifest.tool_version = listen::kVersion;
  manifest.seed = options.seed;
  manifest.workers = listen::resolve_workers(options.workers);
  manifest.config = {
      {"samples", std::to_string(options.samples)},
      {"bins", std::to_string(options.bins)},
      {"predefined_cap", std::to_string(options.predefined_cap)},
      {"step", options.step > 0.0 ? to_text(options.step) : "per-kind"},
  };
  manifest.inputs = {{"data", options.data},
                     {"specs", options.specs},
                     {"scorer", options.scorer}};
  manifest.outputs = {{"bounds", (out_dir / "bounds.json").string()},
                      {"disruptiveness", (out_dir / "disruptiveness.json").string()},
                      {"pois", (out_dir / "pois.json").string()}};
  manifest.timings_ms = {{"load", load_ms},
                         {"sweep", sweep_ms},
                         {"total", elapsed_ms(started)}};
  listen::save_manifest(manifest, out_dir / "manifest.json");

  std::cout << "train-pois: " << corpus.size() << " instances, "
            << catalog.size() << " features -> " << (out_dir / "pois.json")
            << "\n";
  return 0;
}

struct ExplainOptions {
  std::string data;
  std::string scorer;
  std::string pois;
  std::string out;
  int k = 3;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

int run_explain(const ExplainOptions& options) {
  const auto started = Clock::now();
  const fs::path out_dir = prepare_out_dir(options.out);

  const std::vector<listen::RankingInstance> corpus =
      listen::load_corpus(options.data);
  const listen::LinearScoringModel scorer = listen::load_scorer(options.scorer);
  const listen::PointsOfInterest pois = listen::load_pois(options.pois);
  if (corpus.empty()) {
    throw listen::ValidationError("corpus is empty");
  }

  listen::ExplainConfig config;
  config.k = options.k;

  const auto explain_started = Clock::now();
  std::vector<listen::InstanceExplanations> explanations(corpus.size());
  listen::parallel_for(corpus.size(), options.workers, [&](std::size_t i) {
    explanations[i].user_id = corpus[i].user_id;
    explanations[i].labels =
        listen::explain_instance(corpus[i], scorer, pois, config);
  });
  const double explain_ms = elapsed_ms(explain_started);

  listen::save_explanations(explanations, out_dir / "explanations.jsonl");

  listen::RunManifest manifest;
  manifest.command = "explain";
  manifest.tool_version = listen::kVersion;
  manifest.seed = options.seed;
  manifest.workers = listen::resolve_workers(options.workers);
  manifest.config = {{"k", std::to_string(options.k)}};
  manifest.inputs = {{"data", options.data},
                     {"scorer", options.scorer},
                     {"pois", options.pois}};
  manifest.outputs = {
      {"explanations", (out_dir / "explanations.jsonl").string()}};
  manifest.timings_ms = {{"explain", explain_ms},
                         {"total", elapsed_ms(started)}};
  listen::save_manifest(manifest, out_dir / "manifest.json");

  std::cout << "explain: " << corpus.size() << " instances -> "
            << (out_dir / "explanations.jsonl") << "\n";
  return 0;
}

struct DistillOptions {
  std::string data;
  std::string explanations;
  std::string out;
  int iterations = 6000;
  int batch_size = 50;
  int d_fixed = 0;  // 0 = longest instance in the corpus
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

int run_distill(const DistillOptions& options) {
  const auto started = Clock::now();
  const fs::path out_dir = prepare_out_dir(options.out);

  const std::vector<listen::RankingInstance> corpus =
      listen::load_corpus(options.data);
  const std::vector<listen::InstanceExplanations> explanations =
      listen::load_explanations(options.explanations);
  if (corpus.empty()) {
    throw listen::ValidationError("corpus is empty");
  }
  if (corpus.size() != explanations.size()) {
    std::ostringstream message;
    message << "corpus has " << corpus.size() << " instances but "
            << explanations.size() << " explanation groups";
    throw listen::ValidationError(message.str());
  }
  std::vector<std::vector<listen::ExplanationLabel>> labels;
  labels.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (explanations[i].user_id != corpus[i].user_id) {
      throw listen::ValidationError(
          "explanations are not aligned with the corpus: instance '" +
          corpus[i].user_id + "' vs '" + explanations[i].user_id + "'");
    }
    labels.push_back(explanations[i].labels);
  }

  int d_fixed = options.d_fixed;
  if (d_fixed == 0) {
    for (const auto& instance : corpus) {
      d_fixed = std::max(d_fixed, static_cast<int>(instance.item_count()));
    }
  }

  listen::DistillConfig config;
  config.iterations = options.iterations;
  config.batch_size = options.batch_size;
  config.l2_coefficient = options.l2;
  config.seed = options.seed;
  config.ranking_length = d_fixed;
  config.feature_count = static_cast<int>(corpus.front().feature_count());

  const listen::DistillDataset dataset =
      listen::build_dataset(corpus, labels, d_fixed);
  listen::Rng split_rng(listen::derive_seed(options.seed, 3, 0));
  const listen::DatasetSplit split =
      listen::split_dataset(dataset.size(), 0.8, 0.1, split_rng);

  const auto train_started = Clock::now();
  listen::DistilledModel model = listen::init_model(config);
  const listen::TrainResult result = listen::train(model, dataset, split);
  const double train_ms = elapsed_ms(train_started);

  listen::save_model(model, out_dir / "model.json");

  // Metrics: loss curve plus held-out accuracies, all deterministic.
  {
    std::ostringstream metrics;
    metrics << "{\"final_loss\":"
            << (result.loss_curve.empty()
                    ? "null"
                    : to_text(result.loss_curve.back()))
            << ",\"iterations\":" << result.loss_curve.size()
            << ",\"split\":{\"train\":" << split.train.size()
            << ",\"validation\":" << split.validation.size()
            << ",\"test\":" << split.test.size() << "}"
            << ",\"validation_accuracy\":"
            << (result.validation_accuracy ? to_text(*result.validation_accuracy)
                                           : "null")
            << ",\"test_accuracy\":"
            << (result.test_accuracy ? to_text(*result.test_accuracy) : "null")
            << ",\"loss_curve\":[";
    for (std::size_t i = 0; i < result.loss_curve.size(); ++i) {
      if (i > 0) {
        metrics << ",";
      }
      metrics << to_text(result.loss_curve[i]);
    }
    metrics << "]}\n";
    listen::write_text_file(out_dir / "metrics.json", metrics.str());
  }

  listen::RunManifest manifest;
  manifest.command = "distill";
  manifest.tool_version = listen::kVersion;
  manifest.seed = options.seed;
  manifest.workers = listen::resolve_workers(options.workers);
  manifest.config = {
      {"iterations", std::to_string(options.iterations)},
      {"batch_size", std::to_string(options.batch_size)},
      {"d_fixed", std::to_string(d_fixed)},
      {"l2", to_text(options.l2)},
  };
  manifest.inputs = {{"data", options.data},
                     {"explanations", options.explanations}};
  manifest.outputs = {{"model", (out_dir / "model.json").string()},
                      {"metrics", (out_dir / "metrics.json").string()}};
  manifest.timings_ms = {{"train", train_ms}, {"total", elapsed_ms(started)}};
  listen::save_manifest(manifest, out_dir / "manifest.json");

  std::cout << "distill: trained " << result.loss_curve.size()
            << " iterations";
  if (result.test_accuracy) {
    std::cout << ", test accuracy " << *result.test_accuracy;
  }
  std::cout << " -> " << (out_dir / "model.json") << "\n";
  return 0;
}

struct PredictOptions {
  std::string model;
  std::string data;
  std::string out;
  int k = 3;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

int run_predict(const PredictOptions& options) {
  const auto started = Clock::now();
  const fs::path out_dir = prepare_out_dir(options.out);

  const listen::DistilledModel model = listen::load_model(options.model);
  const std::vector<listen::RankingInstance> corpus =
      listen::load_corpus(options.data);
  if (corpus.empty()) {
    throw listen::ValidationError("corpus is empty");
  }

  listen::ExplainConfig config;
  config.k = options.k;

  const auto predict_started = Clock::now();
  std::vector<listen::InstanceExplanations> explanations(corpus.size());
  listen::parallel_for(corpus.size(), options.workers, [&](std::size_t i) {
    explanations[i].user_id = corpus[i].user_id;
    explanations[i].labels = listen::predict(model, corpus[i], config);
  });
  const double predict_ms = elapsed_ms(predict_started);

  listen::save_explanations(explanations, out_dir / "explanations.jsonl");

  listen::RunManifest manifest;
  manifest.command = "predict";
  manifest.tool_version = listen::kVersion;
  manifest.seed = options.seed;
  manifest.workers = listen::resolve_workers(options.workers);
  manifest.config = {{"k", std::to_string(options.k)}};
  manifest.inputs = {{"model", options.model}, {"data", options.data}};
  manifest.outputs = {
      {"explanations", (out_dir / "explanations.jsonl").string()}};
  manifest.timings_ms = {{"predict", predict_ms},
                         {"total", elapsed_ms(started)}};
  listen::save_manifest(manifest, out_dir / "manifest.json");

  std::cout << "predict: " << corpus.size() << " instances -> "
            << (out_dir / "explanations.jsonl") << "\n";
  return 0;
}

struct EvalOptions {
  std::string out;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  int repetitions = 20;
  std::vector<int> users_axis = {5, 10, 20, 100};
  std::vector<int> items_axis = {5, 10, 20, 40, 60, 80, 100, 120, 150};
};

int run_eval_matrix(const EvalOptions& options) {
  const auto started = Clock::now();
  const fs::path out_dir = prepare_out_dir(options.out);

  const std::vector<std::vector<double>> matrix = listen::run_matrix_check();
  listen::write_text_file(out_dir / "matrix.json",
                          listen::serialize_matrix(matrix));

  std::cout << "mean tau_AP per (item, feature):\n";
  for (const auto& row : matrix) {
    for (double value : row) {
      std::cout << "  " << value;
    }
    std::cout << "\n";
  }

  listen::RunManifest manifest;
  manifest.command = "eval matrix";
  manifest.tool_version = listen::kVersion;
  manifest.seed = options.seed;
  manifest.workers = 1;
  manifest.outputs = {{"matrix", (out_dir / "matrix.json").string()}};
  manifest.timings_ms = {{"total", elapsed_ms(started)}};
  listen::save_manifest(manifest, out_dir / "manifest.json");
  return 0;
}

int run_eval_grid(const EvalOptions& options) {
  const auto started = Clock::now();
  const fs::path out_dir = prepare_out_dir(options.out);

  const listen::AccuracyGrid grid =
      listen::run_accuracy_grid(options.users_axis, options.items_axis,
                                options.repetitions, options.seed,
                                options.workers);
  listen::write_text_file(out_dir / "grid.csv",
                          listen::serialize_accuracy_grid_csv(grid));
  listen::write_text_file(out_dir / "grid.json",
                          listen::serialize_accuracy_grid_json(grid));

  listen::RunManifest manifest;
  manifest.command = "eval grid";
  manifest.tool_version = listen::kVersion;
  manifest.seed = options.seed;
  manifest.workers = listen::resolve_workers(options.workers);
  manifest.config = {{"repetitions", std::to_string(options.repetitions)}};
  manifest.outputs = {{"grid_csv", (out_dir / "grid.csv").string()},
                      {"grid_json", (out_dir / "grid.json").string()}};
  manifest.timings_ms = {{"total", elapsed_ms(started)}};
  listen::save_manifest(manifest, out_dir / "manifest.json");

  std::cout << "eval grid: surface mean accuracy " << grid.surface_mean()
            << " -> " << (out_dir / "grid.csv") << "\n";
  return 0;
}

struct BenchOptions {
  std::string data;
  std::string scorer;
  std::string pois;
  std::string model;
  std::string out;
  int repeats = 100;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

int run_bench(const BenchOptions& options) {
  const auto started = Clock::now();
  const fs::path out_dir = prepare_out_dir(options.out);

  const std::vector<listen::RankingInstance> corpus =
      listen::load_corpus(options.data);
  const listen::LinearScoringModel scorer = listen::load_scorer(options.scorer);
  const listen::PointsOfInterest pois = listen::load_pois(options.pois);
  const listen::DistilledModel model = listen::load_model(options.model);
  if (corpus.empty()) {
    throw listen::ValidationError("corpus is empty");
  }
  if (options.repeats < 1) {
    throw listen::ConfigError("repeats must be positive");
  }

  const listen::ExplainConfig config{};

  // Warm-up pass for both paths.
  for (const auto& instance : corpus) {
    (void)listen::explain_instance(instance, scorer, pois, config);
    (void)listen::predict(model, instance, config);
  }

  std::vector<double> explain_ms;
  std::vector<double> predict_ms;
  explain_ms.reserve(corpus.size() * static_cast<std::size_t>(options.repeats));
  predict_ms.reserve(explain_ms.capacity());
  for (int r = 0; r < options.repeats; ++r) {
    for (const auto& instance : corpus) {
      auto t0 = Clock::now();
      (void)listen::explain_instance(instance, scorer, pois, config);
      explain_ms.push_back(elapsed_ms(t0));

      t0 = Clock::now();
      (void)listen::predict(model, instance, config);
      predict_ms.push_back(elapsed_ms(t0));
    }
  }

  const double explain_median = percentile(explain_ms, 0.5);
  const double explain_p95 = percentile(explain_ms, 0.95);
  const double predict_median = percentile(predict_ms, 0.5);
  const double predict_p95 = percentile(predict_ms, 0.95);
  const double ratio =
      predict_median > 0.0 ? explain_median / predict_median : 0.0;

  {
    std::ostringstream report;
    report << "{\"explain_ms\":{\"median\":" << to_text(explain_median)
           << ",\"p95\":" << to_text(explain_p95) << "}"
           << ",\"predict_ms\":{\"median\":" << to_text(predict_median)
           << ",\"p95\":" << to_text(predict_p95) << "}"
           << ",\"speedup\":" << to_text(ratio)
           << ",\"repeats\":" << options.repeats
           << ",\"instances\":" << corpus.size() << "}\n";
    listen::write_text_file(out_dir / "bench.json", report.str());
  }

  listen::RunManifest manifest;
  manifest.command = "bench";
  manifest.tool_version = listen::kVersion;
  manifest.seed = options.seed;
  manifest.workers = 1;
  manifest.config = {{"repeats", std::to_string(options.repeats)}};
  manifest.inputs = {{"data", options.data},
                     {"scorer", options.scorer},
                     {"pois", options.pois},
                     {"model", options.model}};
  manifest.outputs = {{"report", (out_dir / "bench.json").string()}};
  manifest.timings_ms = {{"total", elapsed_ms(started)}};
  listen::save_manifest(manifest, out_dir / "manifest.json");

  std::cout << "bench: explain median " << explain_median << " ms (p95 "
            << explain_p95 << "), predict median " << predict_median
            << " ms (p95 " << predict_p95 << "), speedup " << ratio << "x\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Listwise explanations for ranking models"};
  app.set_version_flag("--version", listen::kVersion);
  app.require_subcommand(1);

  std::function<int()> action;

  TrainPoisOptions train_options;
  auto* train_cmd = app.add_subcommand(
      "train-pois", "Sweep perturbations and select points of interest");
  train_cmd->add_option("--data", train_options.data, "Ranking corpus (JSONL)")
      ->required();
  train_cmd->add_option("--specs", train_options.specs, "Feature specs (JSON)")
      ->required();
  train_cmd
      ->add_option("--scorer", train_options.scorer, "Linear scorer (JSON)")
      ->required();
  train_cmd->add_option("--out", train_options.out, "Output directory")
      ->required();
  train_cmd->add_option("--samples", train_options.samples,
                        "Samples per continuous feature");
  train_cmd->add_option("--bins", train_options.bins,
                        "Bins for point-of-interest selection");
  train_cmd->add_option("--predefined-cap", train_options.predefined_cap,
                        "Cap on predefined values");
  train_cmd->add_option("--step", train_options.step,
                        "Full-grid mode with this step");
  train_cmd->add_option("--seed", train_options.seed, "Random seed");
  train_cmd->add_option("--workers", train_options.workers,
                        "Worker threads (0 = all cores)");
  train_cmd->callback(
      [&]() { action = [&]() { return run_train_pois(train_options); }; });

  ExplainOptions explain_options;
  auto* explain_cmd =
      app.add_subcommand("explain", "Explain rankings using points of interest");
  explain_cmd->add_option("--data", explain_options.data, "Ranking corpus")
      ->required();
  explain_cmd->add_option("--scorer", explain_options.scorer, "Linear scorer")
      ->required();
  explain_cmd->add_option("--pois", explain_options.pois, "Points of interest")
      ->required();
  explain_cmd->add_option("--out", explain_options.out, "Output directory")
      ->required();
  explain_cmd->add_option("--k", explain_options.k, "Features per item");
  explain_cmd->add_option("--seed", explain_options.seed, "Random seed");
  explain_cmd->add_option("--workers", explain_options.workers,
                          "Worker threads (0 = all cores)");
  explain_cmd->callback(
      [&]() { action = [&]() { return run_explain(explain_options); }; });

  DistillOptions distill_options;
  auto* distill_cmd = app.add_subcommand(
      "distill", "Train the feedforward surrogate on explanations");
  distill_cmd->add_option("--data", distill_options.data, "Ranking corpus")
      ->required();
  distill_cmd
      ->add_option("--explanations", distill_options.explanations,
                   "Explanations (JSONL)")
      ->required();
  distill_cmd->add_option("--out", distill_options.out, "Output directory")
      ->required();
  distill_cmd->add_option("--iterations", distill_options.iterations,
                          "Training iterations");
  distill_cmd->add_option("--batch-size", distill_options.batch_size,
                          "Minibatch size");
  distill_cmd->add_option("--d-fixed", distill_options.d_fixed,
                          "Fixed ranking length (0 = longest instance)");
  distill_cmd->add_option("--l2", distill_options.l2, "L2 coefficient");
  distill_cmd->add_option("--seed", distill_options.seed, "Random seed");
  distill_cmd->add_option("--workers", distill_options.workers,
                          "Worker threads (0 = all cores)");
  distill_cmd->callback(
      [&]() { action = [&]() { return run_distill(distill_options); }; });

  PredictOptions predict_options;
  auto* predict_cmd =
      app.add_subcommand("predict", "Produce explanations with a trained model");
  predict_cmd->add_option("--model", predict_options.model, "Model file")
      ->required();
  predict_cmd->add_option("--data", predict_options.data, "Ranking corpus")
      ->required();
  predict_cmd->add_option("--out", predict_options.out, "Output directory")
      ->required();
  predict_cmd->add_option("--k", predict_options.k, "Features per item");
  predict_cmd->add_option("--seed", predict_options.seed, "Random seed");
  predict_cmd->add_option("--workers", predict_options.workers,
                          "Worker threads (0 = all cores)");
  predict_cmd->callback(
      [&]() { action = [&]() { return run_predict(predict_options); }; });

  EvalOptions eval_options;
  auto* eval_cmd =
      app.add_subcommand("eval", "Faithfulness evaluations on synthetic data");
  eval_cmd->require_subcommand(1);
  auto* matrix_cmd = eval_cmd->add_subcommand(
      "matrix", "Full-grid tau_AP matrix of the worked example");
  matrix_cmd->add_option("--out", eval_options.out, "Output directory")
      ->required();
  matrix_cmd->callback(
      [&]() { action = [&]() { return run_eval_matrix(eval_options); }; });
  auto* grid_cmd = eval_cmd->add_subcommand(
      "grid", "Point-of-interest accuracy over users x items");
  grid_cmd->add_option("--out", eval_options.out, "Output directory")
      ->required();
  grid_cmd->add_option("--seed", eval_options.seed, "Random seed");
  grid_cmd->add_option("--reps", eval_options.repetitions,
                       "Repetitions per cell");
  grid_cmd->add_option("--users", eval_options.users_axis, "Users axis");
  grid_cmd->add_option("--items", eval_options.items_axis, "Items axis");
  grid_cmd->add_option("--workers", eval_options.workers,
                       "Worker threads (0 = all cores)");
  grid_cmd->callback(
      [&]() { action = [&]() { return run_eval_grid(eval_options); }; });

  BenchOptions bench_options;
  auto* bench_cmd = app.add_subcommand(
      "bench", "Latency comparison: explaining phase vs distilled model");
  bench_cmd->add_option("--data", bench_options.data, "Ranking corpus")
      ->required();
  bench_cmd->add_option("--scorer", bench_options.scorer, "Linear scorer")
      ->required();
  bench_cmd->add_option("--pois", bench_options.pois, "Points of interest")
      ->required();
  bench_cmd->add_option("--model", bench_options.model, "Model file")
      ->required();
  bench_cmd->add_option("--out", bench_options.out, "Output directory")
      ->required();
  bench_cmd->add_option("--repeats", bench_options.repeats, "Timed repeats");
  bench_cmd->add_option("--seed", bench_options.seed, "Random seed");
  bench_cmd->callback(
      [&]() { action = [&]() { return run_bench(bench_options); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForVersion& version) {
    return app.exit(version);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return 1;  // usage error
  }

  try {
    return action ? action() : 1;
  } catch (const listen::DivergenceError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  } catch (const listen::IoError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const listen::ConfigError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const listen::ValidationError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const std::out_of_range& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  }
}
