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

#ifndef ESFL_FED_CORE_H_
#define ESFL_FED_CORE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "esfl/client_dataset.h"
#include "esfl/spatial_encoding.h"
#include "esfl/tensor_nn.h"
#include "esfl/topology.h"

namespace esfl {

// What a node sends to its parent: the full parameter vector plus the raw
// spatial weight used by weighted aggregation.
struct ClientUpdate {
  std::string client_id;
  ModelParams params;
  size_t sample_count = 1;
  double spatial_weight_raw = 1.0;
};

enum class AggregationMode { kUniform, kSampleWeighted };

struct AggregationPolicy {
  AggregationMode mode = AggregationMode::kSampleWeighted;
  size_t rounds = 1;

  void Validate() const;
};

std::string_view AggregationModeName(AggregationMode mode);

// Client-side parallelism. Results do not depend on the worker count.
struct ExecutionOptions {
  size_t workers = 1;
};

// Seed for one client's training in one round (round 0 = hash(base, id)).
uint64_t ClientSeed(uint64_t base_seed, std::string_view client_id, size_t round);

// Trains on the dataset's train rows, encoded with `vocab`. sample_count and
// spatial_weight_raw are both the number of train rows.
ClientUpdate LocalTrain(const ClientDataset& dataset, const ModelParams& init,
                        const TrainingConfig& config,
                        const SpatialVocabulary& vocab);

// Element-wise mean, accumulated in ascending client_id order.
ModelParams FedAvg(std::span<const ClientUpdate> updates);

// raws / sum(raws). Throws kDegenerateWeights when the sum is zero.
std::vector<double> NormalizeWeights(std::span<const double> raws);

// sum_i w_i * params_i with w = NormalizeWeights(spatial_weight_raw),
// accumulated in ascending client_id order.
ModelParams WeightedAggregate(std::span<const ClientUpdate> updates);

using NodeModels = std::map<std::string, ModelParams>;

// Runs policy.rounds rounds of train-up/aggregate/broadcast-down over the
// tree and returns the final model held by every node: localized models at
// tier 0, regional aggregates above, the global model at the root.
NodeModels RunTierRound(const TierTopology& topology, const ClientMap& datasets,
                        const ModelParams& global_init,
                        const AggregationPolicy& policy,
                        const TrainingConfig& config,
                        const SpatialVocabulary& vocab,
                        ExecutionOptions exec = {});

}  // namespace esfl

#endif  // ESFL_FED_CORE_H_
