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

#ifndef ESFL_REPORT_H_
#define ESFL_REPORT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "esfl/spatial_encoding.h"

namespace esfl {

inline constexpr std::string_view kProposedMethod = "n_tier_encoded_fl";

struct TierAccuracy {
  std::string node_id;
  size_t tier = 0;
  std::string method;
  double accuracy = 0.0;

  bool operator==(const TierAccuracy&) const = default;
};

struct MethodAccuracy {
  std::string method;
  double accuracy = 0.0;

  bool operator==(const MethodAccuracy&) const = default;
};

// Validation-row predictions of one client's localized model.
struct ClientPredictions {
  std::string client_id;
  std::vector<size_t> predicted;
  std::vector<size_t> actual;

  bool operator==(const ClientPredictions&) const = default;
};

struct MetricsReport {
  std::string code_version;
  uint64_t master_seed = 0;
  // Canonical JSON text of the resolved config.
  std::string config_json;
  std::map<std::string, uint64_t> seeds;
  std::optional<double> oracle_accuracy;
  SpatialVocabulary vocabulary;

  std::vector<TierAccuracy> tier_accuracies;
  std::vector<MethodAccuracy> global_accuracies;
  std::vector<ClientPredictions> client_predictions;

  bool operator==(const MetricsReport&) const = default;
};

// Fraction of positions where predicted == actual. Throws kEmptyEval on
// empty input and kShape on a length mismatch.
double Accuracy(std::span<const size_t> predicted, std::span<const size_t> actual);

std::string ReportToJson(const MetricsReport& report);
MetricsReport ReportFromJson(std::string_view text);

struct ReportFormats {
  bool json = true;
  bool csv = true;
};

inline constexpr std::string_view kReportJsonFile = "report.json";
inline constexpr std::string_view kTierCsvFile = "tier_accuracy.csv";
inline constexpr std::string_view kGlobalCsvFile = "global_comparison.csv";
inline constexpr std::string_view kPredictionsCsvFile = "client_predictions.csv";

// Writes report.json and/or the three CSV tables into `dir` (created if
// needed) and returns the paths written. Throws kIo.
std::vector<std::filesystem::path> EmitReport(const MetricsReport& report,
                                              const std::filesystem::path& dir,
                                              ReportFormats formats = {});

}  // namespace esfl

#endif  // ESFL_REPORT_H_
