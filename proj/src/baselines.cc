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

#include "esfl/baselines.h"

#include <algorithm>

#include "esfl/error.h"

namespace esfl {

namespace {

std::vector<const ClientDataset*> SortedById(std::span<const ClientDataset> clients) {
  std::vector<const ClientDataset*> out;
  for (const ClientDataset& c : clients) out.push_back(&c);
  std::sort(out.begin(), out.end(), [](const ClientDataset* a, const ClientDataset* b) {
    return a->client_id < b->client_id;
  });
  return out;
}

}  // namespace

std::string_view BaselineName(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kCentralizedNn: return "centralized_nn";
    case BaselineKind::kEnsemble: return "ensemble";
    case BaselineKind::kFlatFedAvg: return "flat_fedavg";
    case BaselineKind::kFlatFedAvgWeighted: return "flat_fedavg_weighted";
  }
  return "unknown";
}

std::optional<BaselineKind> ParseBaseline(std::string_view name) {
  for (BaselineKind k : {BaselineKind::kCentralizedNn, BaselineKind::kEnsemble,
                         BaselineKind::kFlatFedAvg, BaselineKind::kFlatFedAvgWeighted}) {
    if (BaselineName(k) == name) return k;
  }
  return std::nullopt;
}

ModelParams TrainCentralized(std::span<const ClientDataset> clients,
                             const ModelParams& init, const TrainingConfig& config,
                             const SpatialVocabulary& vocab) {
  std::vector<EncodedRows> parts;
  size_t rows = 0;
  for (const ClientDataset* c : SortedById(clients)) {
    parts.push_back(EncodeRows(*c, Split::kTrain, vocab));
    rows += parts.back().labels.size();
  }
  if (rows == 0) throw Error(ErrorCode::kEmptyCorpus, "no training rows to pool");

  Matrix pooled(rows, init.dims().input);
  std::vector<size_t> labels;
  labels.reserve(rows);
  size_t k = 0;
  for (const EncodedRows& p : parts) {
    if (p.labels.empty()) continue;
    if (p.features.cols() != init.dims().input) {
      throw Error(ErrorCode::kShape, "pooled client encodes to a different width than the model");
    }
    for (size_t r = 0; r < p.features.rows(); ++r) {
      std::copy(p.features.row(r).begin(), p.features.row(r).end(), pooled.row(k++).begin());
    }
    labels.insert(labels.end(), p.labels.begin(), p.labels.end());
  }
  return TrainClassifier(init, pooled, labels, config);
}

size_t EnsemblePredict(std::span<const ModelParams> models,
                       std::span<const double> features) {
  if (models.empty()) throw Error(ErrorCode::kEmptyAggregation, "empty ensemble");
  std::vector<size_t> votes(models.front().dims().classes, 0);
  for (const ModelParams& m : models) {
    if (!(m.dims() == models.front().dims())) {
      throw Error(ErrorCode::kShape, "ensemble members have different dimensions");
    }
    ++votes[Predict(m, features)];
  }
  // max_element returns the first maximum: lowest class wins ties.
  return static_cast<size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

std::vector<ModelParams> TrainEnsemble(std::span<const ClientDataset> clients,
                                       const ModelParams& init,
                                       const TrainingConfig& config,
                                       const SpatialVocabulary& vocab) {
  std::vector<ModelParams> out;
  for (const ClientDataset* c : SortedById(clients)) {
    TrainingConfig cfg = config;
    cfg.seed = ClientSeed(config.seed, c->client_id, 0);
    out.push_back(LocalTrain(*c, init, cfg, vocab).params);
  }
  return out;
}

ModelParams FlatFedAvg(std::span<const ClientDataset> clients, const ModelParams& init,
                       const TrainingConfig& config, const SpatialVocabulary& vocab,
                       bool weighted, size_t rounds) {
  if (clients.empty()) throw Error(ErrorCode::kEmptyAggregation, "no clients");
  if (rounds == 0) throw Error(ErrorCode::kInvalidConfig, "rounds must be >= 1");
  const auto sorted = SortedById(clients);
  ModelParams global = init;
  for (size_t round = 0; round < rounds; ++round) {
    std::vector<ClientUpdate> updates;
    for (const ClientDataset* c : sorted) {
      TrainingConfig cfg = config;
      cfg.seed = ClientSeed(config.seed, c->client_id, round);
      updates.push_back(LocalTrain(*c, global, cfg, vocab));
    }
    global = weighted ? WeightedAggregate(updates) : FedAvg(updates);
  }
  return global;
}

}  // namespace esfl
