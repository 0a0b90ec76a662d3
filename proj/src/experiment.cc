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

#include "esfl/experiment.h"

#include <cmath>
#include <set>
#include <thread>

#include "esfl/baselines.h"
#include "esfl/error.h"
#include "esfl/model_io.h"
#include "esfl/rng.h"

namespace esfl {

namespace {

template <typename Fn>
auto Stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw e.WithStage(name);
  }
}

std::vector<const ClientDataset*> Members(const ExperimentData& data, std::string_view node) {
  std::vector<const ClientDataset*> out;
  for (const std::string& id : data.topology.DescendantClients(node)) {
    out.push_back(&data.clients.at(id));
  }
  return out;
}

size_t RawWidth(const ClientMap& clients) {
  const size_t width = clients.begin()->second.rows.front().features.size();
  for (const auto& [id, ds] : clients) {
    for (const LabeledRow& row : ds.rows) {
      if (row.features.size() != width) {
        throw Error(ErrorCode::kShape, "client \"" + id + "\" has rows of width " +
                                           std::to_string(row.features.size()) + ", expected " +
                                           std::to_string(width));
      }
    }
  }
  return width;
}

double EnsembleAccuracy(std::span<const ModelParams> models,
                        std::span<const ClientDataset* const> clients,
                        const SpatialVocabulary& vocab) {
  std::vector<size_t> predicted;
  std::vector<size_t> actual;
  for (const ClientDataset* ds : clients) {
    const EncodedRows rows = EncodeRows(*ds, Split::kValidation, vocab);
    for (size_t i = 0; i < rows.labels.size(); ++i) {
      predicted.push_back(EnsemblePredict(models, rows.features.row(i)));
    }
    actual.insert(actual.end(), rows.labels.begin(), rows.labels.end());
  }
  return Accuracy(predicted, actual);
}

}  // namespace

void ApplyTopologyOverride(const std::map<std::string, std::vector<std::string>>& groups,
                           std::span<SpatialAttribute*> attributes) {
  std::map<std::string, std::string> group_of;
  for (const auto& [group, leaves] : groups) {
    for (const std::string& leaf : leaves) group_of[leaf] = group;
  }
  std::set<std::string> seen;
  for (SpatialAttribute* attr : attributes) {
    const std::string leaf = attr->hierarchy_path.front();
    auto it = group_of.find(leaf);
    if (it == group_of.end()) {
      throw Error(ErrorCode::kUnknownRegion,
                  "topology override does not assign \"" + leaf + "\" to any group");
    }
    attr->hierarchy_path = {leaf, it->second};
    seen.insert(leaf);
  }
  for (const auto& [leaf, group] : group_of) {
    if (!seen.contains(leaf)) {
      throw Error(ErrorCode::kUnknownRegion,
                  "topology override leaf \"" + leaf + "\" does not exist in the data");
    }
  }
}

Partition BuildCsvPartition(std::vector<RawRecord> records, const ExperimentConfig& config,
                            bool discretize) {
  records = Preprocess(std::move(records), config.preprocessing);
  if (records.empty()) throw Error(ErrorCode::kEmptyCorpus, "no rows left after preprocessing");

  std::vector<size_t> labels;
  if (discretize) {
    std::vector<double> targets;
    for (const RawRecord& r : records) targets.push_back(*r.target);
    labels = DiscretizeTarget(targets, config.n_classes);
  } else {
    for (const RawRecord& r : records) {
      const double t = *r.target;
      if (!(t >= 0.0 && t < static_cast<double>(config.n_classes)) || t != std::floor(t)) {
        throw Error(ErrorCode::kInvalidLabel, "line " + std::to_string(r.source_line) +
                                                  ": target is not a class index below " +
                                                  std::to_string(config.n_classes));
      }
      labels.push_back(static_cast<size_t>(t));
    }
  }

  if (!config.topology_override.empty()) {
    std::vector<SpatialAttribute*> attrs;
    for (RawRecord& r : records) attrs.push_back(&r.spatial);
    ApplyTopologyOverride(config.topology_override, attrs);
  }
  return PartitionClients(records, labels, PartitionOptions{config.n_classes, config.min_rows});
}

ExperimentData BuildExperimentData(const ExperimentConfig& config) {
  ExperimentData data;
  if (config.synthetic) {
    SyntheticData s = GenerateSynthetic(*config.synthetic);
    data.oracle_accuracy = s.oracle_accuracy;
    data.clients = std::move(s.clients);
    data.topology = std::move(s.topology);
    if (!config.topology_override.empty()) {
      std::vector<SpatialAttribute*> attrs;
      for (auto& [id, ds] : data.clients) attrs.push_back(&ds.spatial);
      ApplyTopologyOverride(config.topology_override, attrs);
      std::map<std::string, std::vector<std::string>> paths;
      for (const auto& [id, ds] : data.clients) paths[id] = ds.spatial.hierarchy_path;
      data.topology = TierTopology::FromPaths(paths);
    }
  } else if (config.csv) {
    Partition p = BuildCsvPartition(IngestCsv(config.csv->path, config.csv->schema), config,
                                    config.discretize);
    data.clients = std::move(p.clients);
    data.topology = std::move(p.topology);
  } else {
    throw Error(ErrorCode::kConfigValidation, "no data source configured");
  }

  std::vector<SpatialAttribute> attrs;
  for (auto& [id, ds] : data.clients) {
    ds = TrainValidSplit(std::move(ds), config.train_ratio, DeriveSeed(config.seed, "split/" + id));
    attrs.push_back(ds.spatial);
  }
  data.vocabulary = BuildVocabulary(attrs, config.encoding);
  return data;
}

std::vector<size_t> PredictRows(const ModelParams& model, const EncodedRows& rows) {
  std::vector<size_t> out;
  out.reserve(rows.labels.size());
  for (size_t i = 0; i < rows.labels.size(); ++i) {
    out.push_back(Predict(model, rows.features.row(i)));
  }
  return out;
}

double Evaluate(const ModelParams& model, const ClientDataset& dataset, Split split,
                const SpatialVocabulary& vocab) {
  const EncodedRows rows = EncodeRows(dataset, split, vocab);
  return Accuracy(PredictRows(model, rows), rows.labels);
}

double EvaluateValidation(const ModelParams& model, std::span<const ClientDataset* const> clients,
                          const SpatialVocabulary& vocab) {
  std::vector<size_t> predicted;
  std::vector<size_t> actual;
  for (const ClientDataset* ds : clients) {
    const EncodedRows rows = EncodeRows(*ds, Split::kValidation, vocab);
    const std::vector<size_t> p = PredictRows(model, rows);
    predicted.insert(predicted.end(), p.begin(), p.end());
    actual.insert(actual.end(), rows.labels.begin(), rows.labels.end());
  }
  return Accuracy(predicted, actual);
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  ExperimentResult res;
  res.data = Stage("data", [&] { return BuildExperimentData(config); });
  const ExperimentData& data = res.data;
  const SpatialVocabulary& vocab = data.vocabulary;
  const uint64_t master = config.seed;

  MetricsReport& report = res.report;
  report.code_version = std::string(kCodeVersion);
  report.master_seed = master;
  report.config_json = ConfigToJson(config);
  report.oracle_accuracy = data.oracle_accuracy;
  report.vocabulary = vocab;

  const ModelDims dims{InputWidth(vocab, Stage("data", [&] { return RawWidth(data.clients); })),
                       config.hidden_dim, config.n_classes};
  const uint64_t init_seed = DeriveSeed(master, "init");
  const ModelParams init = InitParams(dims, init_seed);
  TrainingConfig training = config.training;
  training.seed = master;

  report.seeds["init"] = init_seed;
  report.seeds["training_base"] = master;
  if (config.synthetic) report.seeds["synthetic"] = config.synthetic->seed;
  for (const auto& [id, ds] : data.clients) {
    report.seeds["split/" + id] = DeriveSeed(master, "split/" + id);
    report.seeds["client/" + id] = ClientSeed(master, id, 0);
  }

  ExecutionOptions exec;
  exec.workers = config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                     : config.workers;
  res.models = Stage("federated training", [&] {
    return RunTierRound(data.topology, data.clients, init, config.aggregation, training, vocab,
                        exec);
  });

  Stage("evaluation", [&] {
    for (const TierNode& node : data.topology.nodes()) {
      const auto members = Members(data, node.id);
      report.tier_accuracies.push_back(
          TierAccuracy{node.id, node.tier, std::string(kProposedMethod),
                       EvaluateValidation(res.models.at(node.id), members, vocab)});
    }
    for (const std::string& id : data.topology.clients()) {
      const EncodedRows rows = EncodeRows(data.clients.at(id), Split::kValidation, vocab);
      report.client_predictions.push_back(
          ClientPredictions{id, PredictRows(res.models.at(id), rows), rows.labels});
    }
  });

  Stage("baselines", [&] {
    std::vector<ClientDataset> pooled;
    for (const auto& [id, ds] : data.clients) pooled.push_back(ds);

    auto add_single = [&](std::string_view method, const ModelParams& model) {
      for (const TierNode& node : data.topology.nodes()) {
        const auto members = Members(data, node.id);
        report.tier_accuracies.push_back(TierAccuracy{node.id, node.tier, std::string(method),
                                                      EvaluateValidation(model, members, vocab)});
      }
    };

    for (BaselineKind kind : config.baselines) {
      switch (kind) {
        case BaselineKind::kCentralizedNn: {
          TrainingConfig c = training;
          c.seed = DeriveSeed(master, "centralized");
          report.seeds["centralized"] = c.seed;
          add_single(BaselineName(kind), TrainCentralized(pooled, init, c, vocab));
          for (const TierNode& node : data.topology.nodes()) {
            const auto members = Members(data, node.id);
            std::vector<ClientDataset> subset;
            for (const ClientDataset* ds : members) subset.push_back(*ds);
            c.seed = DeriveSeed(master, "centralized/" + node.id);
            const ModelParams m = TrainCentralized(subset, init, c, vocab);
            report.tier_accuracies.push_back(
                TierAccuracy{node.id, node.tier, std::string(kCentralizedRegional),
                             EvaluateValidation(m, members, vocab)});
          }
          break;
        }
        case BaselineKind::kEnsemble: {
          const std::vector<ModelParams> models = TrainEnsemble(pooled, init, training, vocab);
          for (const TierNode& node : data.topology.nodes()) {
            report.tier_accuracies.push_back(
                TierAccuracy{node.id, node.tier, std::string(BaselineName(kind)),
                             EnsembleAccuracy(models, Members(data, node.id), vocab)});
          }
          break;
        }
        case BaselineKind::kFlatFedAvg:
        case BaselineKind::kFlatFedAvgWeighted:
          add_single(BaselineName(kind),
                     FlatFedAvg(pooled, init, training, vocab,
                                kind == BaselineKind::kFlatFedAvgWeighted,
                                config.aggregation.rounds));
          break;
      }
    }
  });

  const std::string& root = data.topology.root();
  for (const TierAccuracy& t : report.tier_accuracies) {
    if (t.node_id == root) report.global_accuracies.push_back(MethodAccuracy{t.method, t.accuracy});
  }
  return res;
}

std::string ModelFileName(std::string_view node_id) {
  std::string out;
  for (char c : node_id) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_' || c == '.';
    out.push_back(safe ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out + ".esfl";
}

std::vector<std::filesystem::path> WriteOutputs(const ExperimentResult& result,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written =
      EmitReport(result.report, dir, ReportFormats{config.write_json, config.write_csv});
  const std::filesystem::path models = dir / "models";
  std::error_code ec;
  std::filesystem::create_directories(models, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + models.string() + ": " + ec.message());
  std::set<std::string> names;
  for (const auto& [id, params] : result.models) {
    const std::string name = ModelFileName(id);
    if (!names.insert(name).second) {
      throw Error(ErrorCode::kIo, "node ids collide on model file name " + name);
    }
    written.push_back(models / name);
    WriteModelFile(written.back(), params);
  }
  return written;
}

}  // namespace esfl
