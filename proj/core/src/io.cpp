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

#include "listen/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "listen/errors.hpp"

namespace listen {

namespace {

using nlohmann::json;

std::string format_double(double value) {
  // Shortest representation that parses back to the same double.
  return json(value).dump();
}

json parse_document(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& error) {
    throw IoError(what + ": " + error.what());
  }
}

double finite_number(const json& value, const std::string& context) {
  if (!value.is_number()) {
    throw IoError(context + ": expected a number");
  }
  const double result = value.get<double>();
  if (!std::isfinite(result)) {
    throw IoError(context + ": value must be finite");
  }
  return result;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) {
    throw IoError("cannot open file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream stream(path, std::ios::binary | std::ios::trunc);
  if (!stream) {
    throw IoError("cannot write file: " + path.string());
  }
  stream << content;
  if (!stream) {
    throw IoError("write failed: " + path.string());
  }
}

// --- feature catalog -------------------------------------------------------

FeatureCatalog parse_catalog(const std::string& json_text) {
  const json doc = parse_document(json_text, "feature specs");
  if (!doc.is_object() || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw IoError("feature specs: expected an object with a 'features' array");
  }
  std::vector<FeatureSpec> specs;
  for (const auto& entry : doc["features"]) {
    FeatureSpec spec;
    spec.name = entry.at("name").get<std::string>();
    const std::string kind = entry.value("kind", "continuous");
    if (kind == "continuous") {
      spec.kind = FeatureKind::kContinuous;
    } else if (kind == "discrete") {
      spec.kind = FeatureKind::kDiscrete;
    } else if (kind == "predefined") {
      spec.kind = FeatureKind::kPredefined;
    } else {
      throw IoError("feature '" + spec.name + "': unknown kind '" + kind + "'");
    }
    if (entry.contains("predefined_values")) {
      for (const auto& value : entry["predefined_values"]) {
        spec.predefined_values.push_back(
            finite_number(value, "feature '" + spec.name + "'"));
      }
    }
    if (entry.contains("discrete_bound")) {
      spec.discrete_bound = entry["discrete_bound"].get<int>();
    }
    specs.push_back(std::move(spec));
  }
  return FeatureCatalog(std::move(specs));
}

std::string serialize_catalog(const FeatureCatalog& catalog) {
  json features = json::array();
  for (const auto& spec : catalog.specs()) {
    json entry;
    entry["name"] = spec.name;
    switch (spec.kind) {
      case FeatureKind::kContinuous:
        entry["kind"] = "continuous";
        break;
      case FeatureKind::kDiscrete:
        entry["kind"] = "discrete";
        entry["discrete_bound"] = spec.discrete_bound;
        break;
      case FeatureKind::kPredefined:
        entry["kind"] = "predefined";
        entry["predefined_values"] = spec.predefined_values;
        break;
    }
    features.push_back(std::move(entry));
  }
  json doc;
  doc["features"] = std::move(features);
  return doc.dump() + "\n";
}

FeatureCatalog load_catalog(const std::filesystem::path& path) {
  return parse_catalog(read_text_file(path));
}

void save_catalog(const FeatureCatalog& catalog,
                  const std::filesystem::path& path) {
  write_text_file(path, serialize_catalog(catalog));
}

// --- ranking corpus (JSON Lines) -------------------------------------------

std::vector<RankingInstance> parse_corpus(const std::string& jsonl_text) {
  std::vector<RankingInstance> corpus;
  const std::vector<std::string> lines = split_lines(jsonl_text);
  std::size_t expected_arity = 0;
  bool have_arity = false;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      continue;
    }
    std::ostringstream where;
    where << "corpus line " << i + 1;
    json doc;
    try {
      doc = json::parse(lines[i]);
    } catch (const json::exception& error) {
      throw IoError(where.str() + ": " + error.what());
    }

    RankingInstance instance;
    try {
      instance.user_id = doc.at("user_id").get<std::string>();
      for (const auto& id : doc.at("item_ids")) {
        instance.item_ids.push_back(id.get<std::string>());
      }
      for (const auto& row : doc.at("features")) {
        std::vector<double> values;
        for (const auto& value : row) {
          values.push_back(finite_number(value, where.str()));
        }
        instance.features.push_back(std::move(values));
      }
    } catch (const json::exception& error) {
      throw IoError(where.str() + ": " + error.what());
    }

    try {
      instance.validate();
    } catch (const ValidationError& error) {
      throw IoError(where.str() + ": " + error.what());
    }
    if (instance.item_count() > 0) {
      if (have_arity && instance.feature_count() != expected_arity) {
        std::ostringstream message;
        message << where.str() << ": instance has " << instance.feature_count()
                << " features, previous lines have " << expected_arity;
        throw IoError(message.str());
      }
      expected_arity = instance.feature_count();
      have_arity = true;
    }
    corpus.push_back(std::move(instance));
  }
  return corpus;
}

std::string serialize_corpus(std::span<const RankingInstance> corpus) {
  std::ostringstream out;
  for (const auto& instance : corpus) {
    json doc;
    doc["user_id"] = instance.user_id;
    doc["item_ids"] = instance.item_ids;
    doc["features"] = instance.features;
    out << doc.dump() << "\n";
  }
  return out.str();
}

std::vector<RankingInstance> load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_text_file(path));
}

void save_corpus(std::span<const RankingInstance> corpus,
                 const std::filesystem::path& path) {
  write_text_file(path, serialize_corpus(corpus));
}

// --- linear scorer ----------------------------------------------------------

LinearScoringModel parse_scorer(const std::string& json_text) {
  const json doc = parse_document(json_text, "scorer");
  const std::string type = doc.value("type", "linear");
  if (type != "linear") {
    throw IoError("scorer: unsupported type '" + type + "'");
  }
  if (!doc.contains("weights") || !doc["weights"].is_array()) {
    throw IoError("scorer: expected a 'weights' array");
  }
  std::vector<double> weights;
  for (const auto& value : doc["weights"]) {
    weights.push_back(finite_number(value, "scorer weights"));
  }
  return LinearScoringModel(std::move(weights));
}

std::string serialize_scorer(const LinearScoringModel& model) {
  json doc;
  doc["type"] = "linear";
  doc["weights"] = model.weights();
  return doc.dump() + "\n";
}

LinearScoringModel load_scorer(const std::filesystem::path& path) {
  return parse_scorer(read_text_file(path));
}

void save_scorer(const LinearScoringModel& model,
                 const std::filesystem::path& path) {
  write_text_file(path, serialize_scorer(model));
}

// --- bounds ------------------------------------------------------------------

FeatureBounds parse_bounds(const std::string& json_text) {
  const json doc = parse_document(json_text, "bounds");
  if (!doc.contains("bounds") || !doc["bounds"].is_array()) {
    throw IoError("bounds: expected a 'bounds' array");
  }
  FeatureBounds bounds;
  for (const auto& entry : doc["bounds"]) {
    Bounds b;
    b.min = finite_number(entry.at("min"), "bounds");
    b.max = finite_number(entry.at("max"), "bounds");
    if (b.max < b.min) {
      throw IoError("bounds: min exceeds max");
    }
    bounds.push_back(b);
  }
  return bounds;
}

std::string serialize_bounds(const FeatureBounds& bounds) {
  json array = json::array();
  for (const Bounds& b : bounds) {
    json entry;
    entry["min"] = b.min;
    entry["max"] = b.max;
    array.push_back(std::move(entry));
  }
  json doc;
  doc["bounds"] = std::move(array);
  return doc.dump() + "\n";
}

void save_bounds(const FeatureBounds& bounds,
                 const std::filesystem::path& path) {
  write_text_file(path, serialize_bounds(bounds));
}

// --- disruptiveness table ----------------------------------------------------

DisruptivenessTable parse_disruptiveness(const std::string& json_text) {
  const json doc = parse_document(json_text, "disruptiveness table");
  if (!doc.contains("features") || !doc["features"].is_array()) {
    throw IoError("disruptiveness table: expected a 'features' array");
  }
  DisruptivenessTable table;
  for (const auto& feature : doc["features"]) {
    std::vector<DisruptivenessEntry> entries;
    for (const auto& raw : feature.at("entries")) {
      DisruptivenessEntry entry;
      entry.sample_value = finite_number(raw.at("value"), "disruptiveness table");
      entry.trial_count = raw.at("trials").get<std::size_t>();
      if (raw.contains("score")) {
        entry.disruptive_score =
            finite_number(raw.at("score"), "disruptiveness table");
      }
      if (entry.disruptive_score.has_value() != (entry.trial_count > 0)) {
        throw IoError(
            "disruptiveness table: score must be present exactly when trials > 0");
      }
      entries.push_back(entry);
    }
    table.per_feature.push_back(std::move(entries));
  }
  return table;
}

std::string serialize_disruptiveness(const DisruptivenessTable& table) {
  json features = json::array();
  for (std::size_t f = 0; f < table.per_feature.size(); ++f) {
    json entries = json::array();
    for (const auto& entry : table.per_feature[f]) {
      json raw;
      raw["value"] = entry.sample_value;
      raw["trials"] = entry.trial_count;
      if (entry.disruptive_score.has_value()) {
        raw["score"] = *entry.disruptive_score;
      }
      entries.push_back(std::move(raw));
    }
    json feature;
    feature["feature"] = f;
    feature["entries"] = std::move(entries);
    features.push_back(std::move(feature));
  }
  json doc;
  doc["features"] = std::move(features);
  return doc.dump() + "\n";
}

void save_disruptiveness(const DisruptivenessTable& table,
                         const std::filesystem::path& path) {
  write_text_file(path, serialize_disruptiveness(table));
}

// --- points of interest -------------------------------------------------------

PointsOfInterest parse_pois(const std::string& json_text) {
  const json doc = parse_document(json_text, "points of interest");
  if (!doc.contains("features") || !doc["features"].is_array()) {
    throw IoError("points of interest: expected a 'features' array");
  }
  PointsOfInterest pois;
  for (const auto& feature : doc["features"]) {
    std::vector<PoiEntry> entries;
    for (const auto& raw : feature.at("pois")) {
      PoiEntry entry;
      entry.value = finite_number(raw.at("value"), "points of interest");
      entry.disruptive_score =
          finite_number(raw.at("score"), "points of interest");
      entries.push_back(entry);
    }
    pois.per_feature.push_back(std::move(entries));
  }
  return pois;
}

std::string serialize_pois(const PointsOfInterest& pois) {
  json features = json::array();
  for (std::size_t f = 0; f < pois.per_feature.size(); ++f) {
    json entries = json::array();
    for (const auto& entry : pois.per_feature[f]) {
      json raw;
      raw["value"] = entry.value;
      raw["score"] = entry.disruptive_score;
      entries.push_back(std::move(raw));
    }
    json feature;
    feature["feature"] = f;
    feature["pois"] = std::move(entries);
    features.push_back(std::move(feature));
  }
  json doc;
  doc["features"] = std::move(features);
  return doc.dump() + "\n";
}

PointsOfInterest load_pois(const std::filesystem::path& path) {
  return parse_pois(read_text_file(path));
}

void save_pois(const PointsOfInterest& pois,
               const std::filesystem::path& path) {
  write_text_file(path, serialize_pois(pois));
}

// --- explanations (JSON Lines) -------------------------------------------------

std::vector<InstanceExplanations> parse_explanations(
    const std::string& jsonl_text) {
  std::vector<InstanceExplanations> result;
  const std::vector<std::string> lines = split_lines(jsonl_text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      continue;
    }
    std::ostringstream where;
    where << "explanations line " << i + 1;
    json doc;
    try {
      doc = json::parse(lines[i]);
    } catch (const json::exception& error) {
      throw IoError(where.str() + ": " + error.what());
    }
    try {
      const auto user_id = doc.at("user_id").get<std::string>();
      ExplanationLabel label;
      label.item_id = doc.at("item_id").get<std::string>();
      for (const auto& value : doc.at("upward")) {
        label.upward.push_back(finite_number(value, where.str()));
      }
      for (const auto& value : doc.at("downward")) {
        label.downward.push_back(finite_number(value, where.str()));
      }
      for (const auto& entry : doc.at("top_k")) {
        WeightedFeature feature;
        feature.feature = entry.at("feature").get<std::size_t>();
        feature.weight = finite_number(entry.at("weight"), where.str());
        label.top_k.push_back(feature);
      }
      if (result.empty() || result.back().user_id != user_id) {
        result.push_back(InstanceExplanations{user_id, {}});
      }
      result.back().labels.push_back(std::move(label));
    } catch (const json::exception& error) {
      throw IoError(where.str() + ": " + error.what());
    }
  }
  return result;
}

std::string serialize_explanations(
    std::span<const InstanceExplanations> explanations) {
  std::ostringstream out;
  for (const auto& instance : explanations) {
    for (const auto& label : instance.labels) {
      json doc;
      doc["user_id"] = instance.user_id;
      doc["item_id"] = label.item_id;
      doc["upward"] = label.upward;
      doc["downward"] = label.downward;
      json top_k = json::array();
      for (const auto& entry : label.top_k) {
        json raw;
        raw["feature"] = entry.feature;
        raw["weight"] = entry.weight;
        top_k.push_back(std::move(raw));
      }
      doc["top_k"] = std::move(top_k);
      out << doc.dump() << "\n";
    }
  }
  return out.str();
}

std::vector<InstanceExplanations> load_explanations(
    const std::filesystem::path& path) {
  return parse_explanations(read_text_file(path));
}

void save_explanations(std::span<const InstanceExplanations> explanations,
                       const std::filesystem::path& path) {
  write_text_file(path, serialize_explanations(explanations));
}

// --- distilled model ------------------------------------------------------------

namespace {

json matrix_to_json(const Eigen::MatrixXd& matrix) {
  json values = json::array();
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      values.push_back(matrix(r, c));
    }
  }
  return values;
}

Eigen::MatrixXd matrix_from_json(const json& values, Eigen::Index rows,
                                 Eigen::Index cols, const std::string& what) {
  if (!values.is_array() ||
      values.size() != static_cast<std::size_t>(rows * cols)) {
    throw IoError("model: " + what + " has the wrong number of entries");
  }
  Eigen::MatrixXd matrix(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      matrix(r, c) = finite_number(values[i++], "model " + what);
    }
  }
  return matrix;
}

constexpr int kModelFormatVersion = 1;

}  // namespace

std::string serialize_model(const DistilledModel& model) {
  json doc;
  doc["format"] = "listen-distilled-model";
  doc["format_version"] = kModelFormatVersion;
  json config;
  config["hidden_layers"] = model.config.hidden_layers;
  config["layer_width"] = model.config.layer_width;
  config["dropout_rate"] = model.config.dropout_rate;
  config["l2_coefficient"] = model.config.l2_coefficient;
  config["learning_rate"] = model.config.learning_rate;
  config["batch_size"] = model.config.batch_size;
  config["iterations"] = model.config.iterations;
  config["adam_beta1"] = model.config.adam_beta1;
  config["adam_beta2"] = model.config.adam_beta2;
  config["adam_epsilon"] = model.config.adam_epsilon;
  config["seed"] = model.config.seed;
  config["ranking_length"] = model.config.ranking_length;
  config["feature_count"] = model.config.feature_count;
  doc["config"] = std::move(config);
  doc["step"] = model.step;

  json layers = json::array();
  for (const auto& layer : model.layers) {
    json entry;
    entry["rows"] = layer.weights.rows();
    entry["cols"] = layer.weights.cols();
    entry["weights"] = matrix_to_json(layer.weights);
    entry["bias"] = matrix_to_json(layer.bias);
    entry["m_weights"] = matrix_to_json(layer.m_weights);
    entry["v_weights"] = matrix_to_json(layer.v_weights);
    entry["m_bias"] = matrix_to_json(layer.m_bias);
    entry["v_bias"] = matrix_to_json(layer.v_bias);
    layers.push_back(std::move(entry));
  }
  doc["layers"] = std::move(layers);
  return doc.dump() + "\n";
}

DistilledModel parse_model(const std::string& json_text) {
  const json doc = parse_document(json_text, "model");
  if (doc.value("format", "") != "listen-distilled-model") {
    throw IoError("model: unrecognized format marker");
  }
  if (doc.value("format_version", 0) != kModelFormatVersion) {
    throw IoError("model: unsupported format version");
  }

  DistilledModel model;
  const json& config = doc.at("config");
  model.config.hidden_layers = config.at("hidden_layers").get<int>();
  model.config.layer_width = config.at("layer_width").get<int>();
  model.config.dropout_rate = config.at("dropout_rate").get<double>();
  model.config.l2_coefficient = config.at("l2_coefficient").get<double>();
  model.config.learning_rate = config.at("learning_rate").get<double>();
  model.config.batch_size = config.at("batch_size").get<int>();
  model.config.iterations = config.at("iterations").get<int>();
  model.config.adam_beta1 = config.at("adam_beta1").get<double>();
  model.config.adam_beta2 = config.at("adam_beta2").get<double>();
  model.config.adam_epsilon = config.at("adam_epsilon").get<double>();
  model.config.seed = config.at("seed").get<std::uint64_t>();
  model.config.ranking_length = config.at("ranking_length").get<int>();
  model.config.feature_count = config.at("feature_count").get<int>();
  model.config.validate();
  model.step = doc.at("step").get<long>();

  std::vector<int> dims;
  dims.push_back(model.config.io_dim());
  for (int l = 0; l < model.config.hidden_layers; ++l) {
    dims.push_back(model.config.layer_width);
  }
  dims.push_back(model.config.io_dim());

  const json& layers = doc.at("layers");
  if (!layers.is_array() || layers.size() != dims.size() - 1) {
    throw IoError("model: layer count does not match the configuration");
  }
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const json& entry = layers[l];
    const auto rows = entry.at("rows").get<Eigen::Index>();
    const auto cols = entry.at("cols").get<Eigen::Index>();
    if (rows != dims[l + 1] || cols != dims[l]) {
      throw IoError("model: layer shape does not match the configuration");
    }
    DistilledModel::Layer layer;
    layer.weights = matrix_from_json(entry.at("weights"), rows, cols, "weights");
    layer.bias = matrix_from_json(entry.at("bias"), rows, 1, "bias");
    layer.m_weights =
        matrix_from_json(entry.at("m_weights"), rows, cols, "m_weights");
    layer.v_weights =
        matrix_from_json(entry.at("v_weights"), rows, cols, "v_weights");
    layer.m_bias = matrix_from_json(entry.at("m_bias"), rows, 1, "m_bias");
    layer.v_bias = matrix_from_json(entry.at("v_bias"), rows, 1, "v_bias");
    model.layers.push_back(std::move(layer));
  }
  return model;
}

DistilledModel load_model(const std::filesystem::path& path) {
  return parse_model(read_text_file(path));
}

void save_model(const DistilledModel& model,
                const std::filesystem::path& path) {
  write_text_file(path, serialize_model(model));
}

// --- evaluation reports -----------------------------------------------------------

std::string serialize_matrix(const std::vector<std::vector<double>>& matrix) {
  json doc;
  doc["matrix"] = matrix;
  return doc.dump() + "\n";
}

std::string serialize_accuracy_grid_csv(const AccuracyGrid& grid) {
  std::ostringstream out;
  out << "users/items";
  for (int items : grid.items_axis) {
    out << "," << items;
  }
  out << "\n";
  for (std::size_t u = 0; u < grid.users_axis.size(); ++u) {
    out << grid.users_axis[u];
    for (std::size_t i = 0; i < grid.items_axis.size(); ++i) {
      out << "," << format_double(grid.mean[u][i]);
    }
    out << "\n";
  }
  return out.str();
}

std::string serialize_accuracy_grid_json(const AccuracyGrid& grid) {
  json doc;
  doc["users_axis"] = grid.users_axis;
  doc["items_axis"] = grid.items_axis;
  doc["mean"] = grid.mean;
  doc["per_repetition"] = grid.per_repetition;
  return doc.dump() + "\n";
}

// --- run manifest -------------------------------------------------------------------

std::string serialize_manifest(const RunManifest& manifest) {
  json doc;
  doc["command"] = manifest.command;
  doc["tool_version"] = manifest.tool_version;
  doc["seed"] = manifest.seed;
  doc["workers"] = manifest.workers;
  json config = json::object();
  for (const auto& [key, value] : manifest.config) {
    config[key] = value;
  }
  doc["config"] = std::move(config);
  json inputs = json::object();
  for (const auto& [key, value] : manifest.inputs) {
    inputs[key] = value;
  }
  doc["inputs"] = std::move(inputs);
  json outputs = json::object();
  for (const auto& [key, value] : manifest.outputs) {
    outputs[key] = value;
  }
  doc["outputs"] = std::move(outputs);
  json timings = json::object();
  for (const auto& [key, value] : manifest.timings_ms) {
    timings[key] = value;
  }
  doc["timings_ms"] = std::move(timings);
  return doc.dump(2) + "\n";
}

void save_manifest(const RunManifest& manifest,
                   const std::filesystem::path& path) {
  write_text_file(path, serialize_manifest(manifest));
}

}  // namespace listen
