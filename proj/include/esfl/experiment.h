// Copyright 2026 The ESFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ESFL_EXPERIMENT_H_
#define ESFL_EXPERIMENT_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esfl/client_dataset.h"
#include "esfl/config.h"
#include "esfl/datasets.h"
#include "esfl/fed_core.h"
#include "esfl/report.h"
#include "esfl/spatial_encoding.h"
#include "esfl/topology.h"

namespace esfl {

// Regional variant of the centralized baseline: one model per node, trained
// on the pooled rows of that node's descendant clients.
inline constexpr std::string_view kCentralizedRegional = "centralized_nn_regional";

struct ExperimentData {
  ClientMap clients;  // split into train/validation
  TierTopology topology;
  SpatialVocabulary vocabulary;
  std::optional<double> oracle_accuracy;
};

struct ExperimentResult {
  MetricsReport report;
  ExperimentData data;
  NodeModels models;  // proposed method, one per topology node
};

// Rewrites every hierarchy path to [leaf, group]. Throws kUnknownRegion if a
// leaf is missing from the override or an override leaf has no data.
void ApplyTopologyOverride(
    const std::map<std::string, std::vector<std::string>>& groups,
    std::span<SpatialAttribute*> attributes);

// Preprocessing, labelling, override and partitioning of a raw corpus.
Partition BuildCsvPartition(std::vector<RawRecord> records, const ExperimentConfig& config,
                            bool discretize);

// Data stage of RunExperiment: source, partition, split, vocabulary.
ExperimentData BuildExperimentData(const ExperimentConfig& config);

// Accuracy of one model on the validation rows of `clients`, in order.
double EvaluateValidation(const ModelParams& model, std::span<const ClientDataset* const> clients,
                          const SpatialVocabulary& vocab);

// Accuracy of `model` on rows of one split.
double Evaluate(const ModelParams& model, const ClientDataset& dataset, Split split,
                const SpatialVocabulary& vocab);

std::vector<size_t> PredictRows(const ModelParams& model, const EncodedRows& rows);

ExperimentResult RunExperiment(const ExperimentConfig& config);

// Writes the report files and one model file per node under dir/models.
std::vector<std::filesystem::path> WriteOutputs(const ExperimentResult& result,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& dir);

// File-name-safe form of a node id.
std::string ModelFileName(std::string_view node_id);

}  // namespace esfl

#endif  // ESFL_EXPERIMENT_H_
