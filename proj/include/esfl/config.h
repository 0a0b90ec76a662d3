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

#ifndef ESFL_CONFIG_H_
#define ESFL_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "esfl/baselines.h"
#include "esfl/datasets.h"
#include "esfl/error.h"
#include "esfl/fed_core.h"
#include "esfl/spatial_encoding.h"
#include "esfl/tensor_nn.h"

namespace esfl {

inline constexpr std::string_view kCodeVersion = "esfl 1.0.0";

struct CsvSource {
  std::filesystem::path path;
  CsvSchema schema;
};

struct ExperimentConfig {
  // Exactly one of the two is set.
  std::optional<CsvSource> csv;
  std::optional<SyntheticSpec> synthetic;

  PreprocessOptions preprocessing;
  // Quantile-discretize the target; otherwise it must already hold class
  // indices in [0, n_classes).
  bool discretize = true;
  size_t min_rows = 5;
  double train_ratio = 0.8;

  size_t n_classes = 3;
  EncodingOptions encoding;

  // Tier-1 group name -> leaf labels. Empty means the tree follows the
  // hierarchy columns of the data.
  std::map<std::string, std::vector<std::string>> topology_override;

  size_t hidden_dim = 16;
  TrainingConfig training;
  AggregationPolicy aggregation;
  std::vector<BaselineKind> baselines = {
      BaselineKind::kCentralizedNn, BaselineKind::kEnsemble,
      BaselineKind::kFlatFedAvg, BaselineKind::kFlatFedAvgWeighted};

  std::filesystem::path output_dir = "esfl_out";
  bool write_json = true;
  bool write_csv = true;

  // 0 = one worker per hardware thread.
  size_t workers = 1;
  uint64_t seed = 0;
};

// Raised for unknown keys (kStrictMode) or invariant violations
// (kConfigValidation); problems() lists every issue found, not just the
// first.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Relative csv paths resolve against base_dir.
ExperimentConfig ParseConfig(std::string_view json_text,
                             const std::filesystem::path& base_dir = ".");
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// Canonical JSON of the resolved config. The output directory and worker
// count are left out: neither changes what is computed.
std::string ConfigToJson(const ExperimentConfig& config);

// Stand-alone synthetic spec documents (gen-synthetic). Same strictness.
SyntheticSpec ParseSyntheticSpec(std::string_view json_text);

}  // namespace esfl

#endif  // ESFL_CONFIG_H_
