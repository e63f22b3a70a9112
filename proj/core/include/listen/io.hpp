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

#ifndef LISTEN_IO_HPP_
#define LISTEN_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "listen/distill.hpp"
#include "listen/explain.hpp"
#include "listen/ranking.hpp"
#include "listen/synthetic.hpp"
#include "listen/train.hpp"

// File formats:
//   ranking corpora        JSON Lines, one instance per line
//   feature specs, scorer,
//   bounds, tables, POIs,
//   models, matrices       JSON documents
//   explanations           JSON Lines, one record per (user, item)
//   accuracy grids         CSV with both axes as header row/column
//
// Serialization is deterministic: object keys are emitted sorted and
// doubles use the shortest representation that parses back bit-exact.

namespace listen {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

// Feature catalog ("specs" file).
FeatureCatalog parse_catalog(const std::string& json_text);
std::string serialize_catalog(const FeatureCatalog& catalog);
FeatureCatalog load_catalog(const std::filesystem::path& path);
void save_catalog(const FeatureCatalog& catalog,
                  const std::filesystem::path& path);

// Ranking corpus (JSON Lines). Parse errors name the line number.
std::vector<RankingInstance> parse_corpus(const std::string& jsonl_text);
std::string serialize_corpus(std::span<const RankingInstance> corpus);
std::vector<RankingInstance> load_corpus(const std::filesystem::path& path);
void save_corpus(std::span<const RankingInstance> corpus,
                 const std::filesystem::path& path);

// Linear scorer weights.
LinearScoringModel parse_scorer(const std::string& json_text);
std::string serialize_scorer(const LinearScoringModel& model);
LinearScoringModel load_scorer(const std::filesystem::path& path);
void save_scorer(const LinearScoringModel& model,
                 const std::filesystem::path& path);

// Observed feature bounds.
FeatureBounds parse_bounds(const std::string& json_text);
std::string serialize_bounds(const FeatureBounds& bounds);
void save_bounds(const FeatureBounds& bounds,
                 const std::filesystem::path& path);

// Disruptiveness table.
DisruptivenessTable parse_disruptiveness(const std::string& json_text);
std::string serialize_disruptiveness(const DisruptivenessTable& table);
void save_disruptiveness(const DisruptivenessTable& table,
                         const std::filesystem::path& path);

// Points of interest.
PointsOfInterest parse_pois(const std::string& json_text);
std::string serialize_pois(const PointsOfInterest& pois);
PointsOfInterest load_pois(const std::filesystem::path& path);
void save_pois(const PointsOfInterest& pois,
               const std::filesystem::path& path);

/// Explanations of one instance, keyed by its user id.
struct InstanceExplanations {
  std::string user_id;
  std::vector<ExplanationLabel> labels;
};

// Explanations (JSON Lines). Records of one instance are contiguous.
std::vector<InstanceExplanations> parse_explanations(
    const std::string& jsonl_text);
std::string serialize_explanations(
    std::span<const InstanceExplanations> explanations);
std::vector<InstanceExplanations> load_explanations(
    const std::filesystem::path& path);
void save_explanations(std::span<const InstanceExplanations> explanations,
                       const std::filesystem::path& path);

// Distilled model. A load/save round trip preserves every parameter
// bit-exact, so reloaded models produce identical inference output.
DistilledModel parse_model(const std::string& json_text);
std::string serialize_model(const DistilledModel& model);
DistilledModel load_model(const std::filesystem::path& path);
void save_model(const DistilledModel& model,
                const std::filesystem::path& path);

// Evaluation reports.
std::string serialize_matrix(const std::vector<std::vector<double>>& matrix);
std::string serialize_accuracy_grid_csv(const AccuracyGrid& grid);
std::string serialize_accuracy_grid_json(const AccuracyGrid& grid);

/// Per-run metadata sidecar: the configuration echo makes the stage
/// reproducible; timings are informational and vary between runs.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, std::string>> outputs;
  std::vector<std::pair<std::string, double>> timings_ms;
};

std::string serialize_manifest(const RunManifest& manifest);
void save_manifest(const RunManifest& manifest,
                   const std::filesystem::path& path);

}  // namespace listen

#endif  // LISTEN_IO_HPP_
