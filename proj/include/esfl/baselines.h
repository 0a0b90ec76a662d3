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

#ifndef ESFL_BASELINES_H_
#define ESFL_BASELINES_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "esfl/client_dataset.h"
#include "esfl/fed_core.h"
#include "esfl/spatial_encoding.h"
#include "esfl/tensor_nn.h"

namespace esfl {

enum class BaselineKind { kCentralizedNn, kEnsemble, kFlatFedAvg, kFlatFedAvgWeighted };

std::string_view BaselineName(BaselineKind kind);
std::optional<BaselineKind> ParseBaseline(std::string_view name);

// One model trained on the train rows of every client, pooled in
// (client_id, row index) order so the result does not depend on the order
// `clients` is given in. Throws kEmptyCorpus on an empty pool.
ModelParams TrainCentralized(std::span<const ClientDataset> clients,
                             const ModelParams& init, const TrainingConfig& config,
                             const SpatialVocabulary& vocab);

// Hard majority vote, lowest class on ties.
size_t EnsemblePredict(std::span<const ModelParams> models,
                       std::span<const double> features);

// Independently trained per-client models (round-0 seeds), ascending
// client_id order.
std::vector<ModelParams> TrainEnsemble(std::span<const ClientDataset> clients,
                                       const ModelParams& init,
                                       const TrainingConfig& config,
                                       const SpatialVocabulary& vocab);

// Single-level FedAvg over all clients: each round every client trains from
// the current model and the server averages, uniformly or weighted by
// sample count.
ModelParams FlatFedAvg(std::span<const ClientDataset> clients, const ModelParams& init,
                       const TrainingConfig& config, const SpatialVocabulary& vocab,
                       bool weighted, size_t rounds = 1);

}  // namespace esfl

#endif  // ESFL_BASELINES_H_
