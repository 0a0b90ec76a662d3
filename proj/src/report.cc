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

#include "esfl/report.h"

#include <charconv>
#include <fstream>

#include "esfl/error.h"
#include "json.hpp"

namespace esfl {

namespace {

using nlohmann::json;

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

double Accuracy(std::span<const size_t> predicted, std::span<const size_t> actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::kShape, "predicted and actual vectors differ in length");
  }
  if (actual.empty()) throw Error(ErrorCode::kEmptyEval, "no rows to evaluate");
  size_t hits = 0;
  for (size_t i = 0; i < actual.size(); ++i) hits += predicted[i] == actual[i];
  return static_cast<double>(hits) / static_cast<double>(actual.size());
}

std::string ReportToJson(const MetricsReport& r) {
  json j;
  j["code_version"] = r.code_version;
  j["master_seed"] = r.master_seed;
  j["config"] = json::parse(r.config_json.empty() ? "{}" : r.config_json);
  j["seeds"] = r.seeds;
  j["oracle_accuracy"] = r.oracle_accuracy ? json(*r.oracle_accuracy) : json(nullptr);
  const CoordinateBounds& b = r.vocabulary.bounds();
  j["vocabulary"] = {{"levels", r.vocabulary.levels()},
                     {"bounds",
                      {{"min_latitude", b.min_latitude},
                       {"max_latitude", b.max_latitude},
                       {"min_longitude", b.min_longitude},
                       {"max_longitude", b.max_longitude}}},
                     {"coordinates", r.vocabulary.options().coordinates},
                     {"hierarchy", r.vocabulary.options().hierarchy}};
  j["tier_accuracies"] = json::array();
  for (const TierAccuracy& t : r.tier_accuracies) {
    j["tier_accuracies"].push_back(
        {{"node_id", t.node_id}, {"tier", t.tier}, {"method", t.method}, {"accuracy", t.accuracy}});
  }
  j["global_accuracies"] = json::array();
  for (const MethodAccuracy& m : r.global_accuracies) {
    j["global_accuracies"].push_back({{"method", m.method}, {"accuracy", m.accuracy}});
  }
  j["client_predictions"] = json::array();
  for (const ClientPredictions& c : r.client_predictions) {
    j["client_predictions"].push_back(
        {{"client_id", c.client_id}, {"predicted", c.predicted}, {"actual", c.actual}});
  }
  return j.dump(2) + "\n";
}

MetricsReport ReportFromJson(std::string_view text) {
  try {
    json j = json::parse(text);
    MetricsReport r;
    r.code_version = j.at("code_version").get<std::string>();
    r.master_seed = j.at("master_seed").get<uint64_t>();
    r.config_json = j.at("config").dump(2);
    r.seeds = j.at("seeds").get<std::map<std::string, uint64_t>>();
    if (!j.at("oracle_accuracy").is_null()) r.oracle_accuracy = j.at("oracle_accuracy").get<double>();
    const json& v = j.at("vocabulary");
    const json& b = v.at("bounds");
    r.vocabulary = SpatialVocabulary::FromParts(
        v.at("levels").get<std::vector<std::vector<std::string>>>(),
        CoordinateBounds{b.at("min_latitude").get<double>(), b.at("max_latitude").get<double>(),
                         b.at("min_longitude").get<double>(), b.at("max_longitude").get<double>()},
        EncodingOptions{v.at("coordinates").get<bool>(), v.at("hierarchy").get<bool>()});
    for (const json& t : j.at("tier_accuracies")) {
      r.tier_accuracies.push_back(TierAccuracy{t.at("node_id").get<std::string>(),
                                               t.at("tier").get<size_t>(),
                                               t.at("method").get<std::string>(),
                                               t.at("accuracy").get<double>()});
    }
    for (const json& m : j.at("global_accuracies")) {
      r.global_accuracies.push_back(
          MethodAccuracy{m.at("method").get<std::string>(), m.at("accuracy").get<double>()});
    }
    for (const json& c : j.at("client_predictions")) {
      r.client_predictions.push_back(ClientPredictions{c.at("client_id").get<std::string>(),
                                                       c.at("predicted").get<std::vector<size_t>>(),
                                                       c.at("actual").get<std::vector<size_t>>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed report JSON: ") + e.what());
  }
}

std::vector<std::filesystem::path> EmitReport(const MetricsReport& report,
                                              const std::filesystem::path& dir,
                                              ReportFormats formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  if (formats.json) {
    written.push_back(dir / kReportJsonFile);
    WriteFile(written.back(), ReportToJson(report));
  }
  if (formats.csv) {
    std::string tiers = "node_id,tier,method,accuracy\n";
    for (const TierAccuracy& t : report.tier_accuracies) {
      tiers += CsvField(t.node_id) + "," + std::to_string(t.tier) + "," + CsvField(t.method) +
               "," + FormatDouble(t.accuracy) + "\n";
    }
    written.push_back(dir / kTierCsvFile);
    WriteFile(written.back(), tiers);

    std::string global = "method,accuracy\n";
    for (const MethodAccuracy& m : report.global_accuracies) {
      global += CsvField(m.method) + "," + FormatDouble(m.accuracy) + "\n";
    }
    written.push_back(dir / kGlobalCsvFile);
    WriteFile(written.back(), global);

    std::string preds = "client_id,row,predicted,actual\n";
    for (const ClientPredictions& c : report.client_predictions) {
      for (size_t i = 0; i < c.actual.size(); ++i) {
        preds += CsvField(c.client_id) + "," + std::to_string(i) + "," +
                 std::to_string(c.predicted[i]) + "," + std::to_string(c.actual[i]) + "\n";
      }
    }
    written.push_back(dir / kPredictionsCsvFile);
    WriteFile(written.back(), preds);
  }
  return written;
}

}  // namespace esfl
