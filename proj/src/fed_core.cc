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

#include "esfl/fed_core.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "esfl/error.h"
#include "esfl/rng.h"

namespace esfl {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double Value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Validates the update list and returns it ordered by client_id.
std::vector<const ClientUpdate*> Ordered(std::span<const ClientUpdate> updates) {
  if (updates.empty()) {
    throw Error(ErrorCode::kEmptyAggregation, "no updates to aggregate");
  }
  std::vector<const ClientUpdate*> out;
  out.reserve(updates.size());
  for (const ClientUpdate& u : updates) {
    if (!(u.params.dims() == updates.front().params.dims()) ||
        u.params.size() != updates.front().params.size()) {
      throw Error(ErrorCode::kShape,
                  "update \"" + u.client_id + "\" has different model dimensions");
    }
    if (u.sample_count == 0) {
      throw Error(ErrorCode::kEmptyClient,
                  "update \"" + u.client_id + "\" reports zero samples");
    }
    out.push_back(&u);
  }
  std::sort(out.begin(), out.end(), [](const ClientUpdate* a, const ClientUpdate* b) {
    return a->client_id < b->client_id;
  });
  for (size_t i = 1; i < out.size(); ++i) {
    if (out[i]->client_id == out[i - 1]->client_id) {
      throw Error(ErrorCode::kTopology,
                  "duplicate update from \"" + out[i]->client_id + "\"");
    }
  }
  return out;
}

// Accumulates offsets from the lowest-id model rather than raw values, so
// identical inputs reproduce themselves exactly whatever the weights.
ModelParams Combine(const std::vector<const ClientUpdate*>& ordered,
                    std::span<const double> weights, double divisor) {
  const size_t n = ordered.front()->params.size();
  const std::span<const double> base = ordered.front()->params.Flatten();
  ModelParams out(ordered.front()->params.dims());
  auto values = out.mutable_values();
  for (size_t j = 0; j < n; ++j) {
    CompensatedSum acc;
    for (size_t i = 1; i < ordered.size(); ++i) {
      const double d = ordered[i]->params.Flatten()[j] - base[j];
      acc.Add(weights.empty() ? d : weights[i] * d);
    }
    values[j] = base[j] + acc.Value() / divisor;
  }
  return out;
}

}  // namespace

void AggregationPolicy::Validate() const {
  if (rounds == 0) throw Error(ErrorCode::kInvalidConfig, "rounds must be >= 1");
}

std::string_view AggregationModeName(AggregationMode mode) {
  return mode == AggregationMode::kUniform ? "uniform" : "sample_weighted";
}

uint64_t ClientSeed(uint64_t base_seed, std::string_view client_id, size_t round) {
  if (round == 0) return DeriveSeed(base_seed, client_id);
  return DeriveSeed(base_seed, std::string(client_id) + "#round" + std::to_string(round));
}

ClientUpdate LocalTrain(const ClientDataset& dataset, const ModelParams& init,
                        const TrainingConfig& config,
                        const SpatialVocabulary& vocab) {
  if (dataset.rows.empty() || dataset.CountSplit(Split::kTrain) == 0) {
    throw Error(ErrorCode::kEmptyClient,
                "client \"" + dataset.client_id + "\" has no training rows");
  }
  dataset.Validate();
  if (init.dims().classes != dataset.n_classes) {
    throw Error(ErrorCode::kShape, "client \"" + dataset.client_id + "\" has " +
                                       std::to_string(dataset.n_classes) +
                                       " classes, model has " +
                                       std::to_string(init.dims().classes));
  }
  EncodedRows train = EncodeRows(dataset, Split::kTrain, vocab);
  if (train.features.cols() != init.dims().input) {
    throw Error(ErrorCode::kShape,
                "client \"" + dataset.client_id + "\" encodes to width " +
                    std::to_string(train.features.cols()) + ", model expects " +
                    std::to_string(init.dims().input));
  }
  ClientUpdate update;
  update.client_id = dataset.client_id;
  update.params = TrainClassifier(init, train.features, train.labels, config);
  update.sample_count = train.labels.size();
  update.spatial_weight_raw = static_cast<double>(update.sample_count);
  return update;
}

ModelParams FedAvg(std::span<const ClientUpdate> updates) {
  auto ordered = Ordered(updates);
  return Combine(ordered, {}, static_cast<double>(ordered.size()));
}

std::vector<double> NormalizeWeights(std::span<const double> raws) {
  if (raws.empty()) throw Error(ErrorCode::kEmptyAggregation, "no weights");
  CompensatedSum total;
  for (double r : raws) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw Error(ErrorCode::kDegenerateWeights,
                  "weights must be finite and non-negative");
    }
    total.Add(r);
  }
  const double sum = total.Value();
  if (!(sum > 0.0)) {
    throw Error(ErrorCode::kDegenerateWeights, "weights sum to zero");
  }
  std::vector<double> out;
  out.reserve(raws.size());
  for (double r : raws) out.push_back(r / sum);
  return out;
}

ModelParams WeightedAggregate(std::span<const ClientUpdate> updates) {
  auto ordered = Ordered(updates);
  std::vector<double> raws;
  raws.reserve(ordered.size());
  for (const ClientUpdate* u : ordered) raws.push_back(u->spatial_weight_raw);
  const std::vector<double> weights = NormalizeWeights(raws);
  return Combine(ordered, weights, 1.0);
}

NodeModels RunTierRound(const TierTopology& topology, const ClientMap& datasets,
                        const ModelParams& global_init,
                        const AggregationPolicy& policy,
                        const TrainingConfig& config,
                        const SpatialVocabulary& vocab, ExecutionOptions exec) {
  policy.Validate();
  config.Validate();
  if (topology.nodes().empty()) {
    throw Error(ErrorCode::kTopology, "empty topology");
  }
  const std::vector<std::string> clients = topology.clients();
  for (const std::string& id : clients) {
    if (!datasets.contains(id)) {
      throw Error(ErrorCode::kMissingClient, "client \"" + id + "\" has no dataset");
    }
  }

  NodeModels models;
  std::map<std::string, size_t> samples;
  ModelParams broadcast = global_init;
  for (size_t round = 0; round < policy.rounds; ++round) {
    // Clients: independent work, joined before any aggregation.
    std::vector<ClientUpdate> updates(clients.size());
    std::vector<std::exception_ptr> errors(clients.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i = next++; i < clients.size(); i = next++) {
        try {
          TrainingConfig cfg = config;
          cfg.seed = ClientSeed(config.seed, clients[i], round);
          updates[i] = LocalTrain(datasets.at(clients[i]), broadcast, cfg, vocab);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const size_t n_workers = std::clamp<size_t>(exec.workers, 1, clients.size());
    if (n_workers == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (ClientUpdate& u : updates) {
      samples[u.client_id] = u.sample_count;
      models[u.client_id] = std::move(u.params);
    }

    // Aggregators, bottom-up.
    for (size_t tier = 1; tier < topology.depth(); ++tier) {
      for (const std::string& id : topology.NodesAtTier(tier)) {
        std::vector<ClientUpdate> children;
        size_t total = 0;
        for (const std::string& child : topology.children(id)) {
          const size_t n = samples.at(child);
          children.push_back(ClientUpdate{child, models.at(child), n,
                                          static_cast<double>(n)});
          total += n;
        }
        models[id] = policy.mode == AggregationMode::kUniform
                         ? FedAvg(children)
                         : WeightedAggregate(children);
        samples[id] = total;
      }
    }
    broadcast = models.at(topology.root());
  }
  return models;
}

}  // namespace esfl
