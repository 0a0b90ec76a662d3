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

// Command-line front end: run, validate-config, gen-synthetic, evaluate-model.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "esfl/config.h"
#include "esfl/datasets.h"
#include "esfl/error.h"
#include "esfl/experiment.h"
#include "esfl/model_io.h"
#include "esfl/report.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

int ExitCodeFor(esfl::ErrorCode code) {
  switch (esfl::CategoryOf(code)) {
    case esfl::ErrorCategory::kConfig:
      return kExitConfig;
    case esfl::ErrorCategory::kData:
      return kExitData;
    case esfl::ErrorCategory::kRuntime:
      return kExitRuntime;
  }
  return kExitRuntime;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw esfl::Error(esfl::ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int Run(const std::string& config_path, const std::string& out, const std::optional<uint64_t>& seed) {
  esfl::ExperimentConfig config = esfl::LoadConfig(config_path);
  if (!out.empty()) config.output_dir = out;
  if (seed) config.seed = *seed;
  const esfl::ExperimentResult result = esfl::RunExperiment(config);
  esfl::WriteOutputs(result, config, config.output_dir);
  for (const esfl::MethodAccuracy& m : result.report.global_accuracies) {
    std::printf("%-26s %.4f\n", m.method.c_str(), m.accuracy);
  }
  std::printf("wrote %s\n", config.output_dir.string().c_str());
  return 0;
}

int ValidateConfig(const std::string& config_path) {
  const esfl::ExperimentConfig config = esfl::LoadConfig(config_path);
  const esfl::ExperimentData data = esfl::BuildExperimentData(config);
  std::printf("config ok: %zu clients, %zu tiers\n", data.clients.size(), data.topology.depth());
  return 0;
}

int GenSynthetic(const std::string& spec_path, const std::string& out) {
  const esfl::SyntheticSpec spec = esfl::ParseSyntheticSpec(ReadText(spec_path));
  const std::vector<esfl::RawRecord> records = esfl::SyntheticRecords(spec);
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) throw esfl::Error(esfl::ErrorCode::kIo, "cannot open " + out + " for writing");
  esfl::WriteCsv(file, records);
  if (!file) throw esfl::Error(esfl::ErrorCode::kIo, "failed writing " + out);
  std::printf("wrote %zu rows to %s\n", records.size(), out.c_str());
  return 0;
}

// Scores a saved model on every row of a CSV, labelled and grouped the way
// the config prescribes. Synthetic-source configs read targets as classes.
int EvaluateModel(const std::string& model_path, const std::string& data_path,
                  const std::string& config_path) {
  const esfl::ExperimentConfig config = esfl::LoadConfig(config_path);
  const esfl::ModelParams model = esfl::ReadModelFile(model_path);
  const esfl::CsvSchema schema = config.csv ? config.csv->schema : esfl::CsvSchema{};
  const esfl::Partition part = esfl::BuildCsvPartition(esfl::IngestCsv(data_path, schema), config,
                                                       config.csv && config.discretize);
  std::vector<esfl::SpatialAttribute> attrs;
  for (const auto& [id, ds] : part.clients) attrs.push_back(ds.spatial);
  const esfl::SpatialVocabulary vocab = esfl::BuildVocabulary(attrs, config.encoding);

  const size_t raw = part.clients.begin()->second.rows.front().features.size();
  if (model.dims().input != esfl::InputWidth(vocab, raw) ||
      model.dims().classes != config.n_classes) {
    throw esfl::Error(esfl::ErrorCode::kShape,
                      "model expects input " + std::to_string(model.dims().input) + " and " +
                          std::to_string(model.dims().classes) + " classes, data gives input " +
                          std::to_string(esfl::InputWidth(vocab, raw)) + " and " +
                          std::to_string(config.n_classes) + " classes");
  }
  std::vector<size_t> predicted;
  std::vector<size_t> actual;
  for (const auto& [id, ds] : part.clients) {
    const esfl::EncodedRows rows = esfl::EncodeRows(ds, esfl::Split::kTrain, vocab);
    const std::vector<size_t> p = esfl::PredictRows(model, rows);
    std::printf("%-26s %.4f\n", id.c_str(), esfl::Accuracy(p, rows.labels));
    predicted.insert(predicted.end(), p.begin(), p.end());
    actual.insert(actual.end(), rows.labels.begin(), rows.labels.end());
  }
  std::printf("%-26s %.4f\n", "overall", esfl::Accuracy(predicted, actual));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatially encoded N-tier federated learning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::optional<uint64_t> seed;
  CLI::App* run = app.add_subcommand("run", "Run an experiment and write its reports");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out, "Output directory, overrides output.directory");
  run->add_option("--seed", seed, "Master seed, overrides the config");

  CLI::App* validate = app.add_subcommand("validate-config", "Check a config and its data");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required();

  std::string spec_path;
  CLI::App* gen = app.add_subcommand("gen-synthetic", "Export a synthetic corpus as CSV");
  gen->add_option("--spec", spec_path, "Synthetic spec (JSON)")->required();
  gen->add_option("--out", out, "Output CSV path")->required();

  std::string model_path;
  std::string data_path;
  CLI::App* eval = app.add_subcommand("evaluate-model", "Score a saved model on a CSV");
  eval->add_option("--model", model_path, "Model file")->required();
  eval->add_option("--data", data_path, "CSV data")->required();
  eval->add_option("--config", config_path, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return Run(config_path, out, seed);
    if (*validate) return ValidateConfig(config_path);
    if (*gen) return GenSynthetic(spec_path, out);
    if (*eval) return EvaluateModel(model_path, data_path, config_path);
  } catch (const esfl::ConfigError& e) {
    std::fprintf(stderr, "esfl: %s\n", std::string(esfl::ErrorCodeName(e.code())).c_str());
    for (const std::string& p : e.problems()) std::fprintf(stderr, "  %s\n", p.c_str());
    return ExitCodeFor(e.code());
  } catch (const esfl::Error& e) {
    std::fprintf(stderr, "esfl: %s: %s\n", std::string(esfl::ErrorCodeName(e.code())).c_str(),
                 e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "esfl: internal error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
