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

#ifndef ESFL_DATASETS_H_
#define ESFL_DATASETS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "esfl/client_dataset.h"
#include "esfl/spatial_encoding.h"
#include "esfl/topology.h"

namespace esfl {

// One CSV row. std::nullopt marks a missing cell.
struct RawRecord {
  SpatialAttribute spatial;
  std::string ref_date;
  std::vector<std::optional<double>> features;
  std::optional<double> target;
  size_t source_line = 0;

  const std::string& unit() const { return spatial.hierarchy_path.front(); }
  bool operator==(const RawRecord&) const = default;
};

// Column mapping. Hierarchy levels are every column named
// <level_prefix><n>, ordered by n; features are every column starting with
// feature_prefix, in header order.
struct CsvSchema {
  std::string client_label = "client_label";
  std::string level_prefix = "level_";
  std::string latitude = "latitude";
  std::string longitude = "longitude";
  std::string ref_date = "ref_date";
  std::string target = "target";
  std::string feature_prefix = "feature_";

  bool operator==(const CsvSchema&) const = default;
};

// Throws kSchema for a missing mapped column and kRow (with the 1-based
// line number) for an unparseable row; kIo if the file cannot be read.
std::vector<RawRecord> IngestCsv(const std::filesystem::path& path,
                                 const CsvSchema& schema = {});
std::vector<RawRecord> ParseCsv(std::istream& in, const CsvSchema& schema = {});

// Writes records using the default schema layout:
// client_label, level_1.., latitude, longitude, ref_date, target, feature_0..
void WriteCsv(std::ostream& out, std::span<const RawRecord> records);

// Days since 1970-01-01 for an ISO-8601 date (YYYY-MM-DD, optionally
// followed by a 'T' time part, which is ignored). Throws kRow if invalid.
int64_t DateOrdinal(std::string_view iso_date);

struct PreprocessOptions {
  bool interpolate = true;
  bool remove_outliers = true;
  double z_threshold = 3.0;

  bool operator==(const PreprocessOptions&) const = default;
};

// Per spatial unit, in date order: linear interpolation of missing numeric
// cells (nearest value at the series ends), then repeated removal of rows
// whose target z-score exceeds z_threshold until none remain. Without
// interpolation, rows with missing cells are dropped. Output is grouped by
// unit (ascending) and date-ordered within a unit; no missing cells remain.
// Throws kUnitUnusable when a unit has no observed value for a column.
std::vector<RawRecord> Preprocess(std::vector<RawRecord> records,
                                  const PreprocessOptions& options = {});

// Class thresholds at the k/n_classes corpus quantiles; a value equal to a
// threshold goes to the higher class. Thresholds equal to the corpus minimum
// are inactive, so a constant corpus maps to class 0.
std::vector<size_t> DiscretizeTarget(std::span<const double> values,
                                     size_t n_classes);

struct PartitionOptions {
  size_t n_classes = 3;
  size_t min_rows = 5;
};

struct Partition {
  ClientMap clients;
  TierTopology topology;
};

// One client per distinct leaf label; the tree follows the hierarchy paths.
// labels[i] is the class of records[i]. Throws kThinClient naming every
// client below min_rows.
Partition PartitionClients(std::span<const RawRecord> records,
                           std::span<const size_t> labels,
                           const PartitionOptions& options);

// Tags floor(ratio * n) rows as train via a seeded shuffle, the rest as
// validation. Throws kSplit if either side would be empty.
ClientDataset TrainValidSplit(ClientDataset dataset, double ratio, uint64_t seed);

// Synthetic spatially clustered benchmark. Every region shares the feature
// distribution (uniform on [-1,1]^2) but shifts the decision boundary by a
// region-specific offset, so the label is a deterministic function of
// (region, features) that the features alone cannot recover. Labels are
// flipped to a different class with probability noise_rate.
struct SyntheticSpec {
  size_t n_regions = 3;
  size_t clients_per_region = 4;
  size_t rows_per_client = 200;
  size_t n_classes = 2;
  double region_separation = 1.0;
  double noise_rate = 0.0;
  uint64_t seed = 0;

  // Throws kInvalidConfig.
  void Validate() const;
  bool operator==(const SyntheticSpec&) const = default;
};

struct SyntheticData {
  ClientMap clients;
  TierTopology topology;
  double oracle_accuracy = 1.0;
};

SyntheticData GenerateSynthetic(const SyntheticSpec& spec);

// The same corpus as CSV-ready records (target = class index).
std::vector<RawRecord> SyntheticRecords(const SyntheticSpec& spec);

// Noise-free label of the construction, exposed for oracle tests.
size_t SyntheticRule(const SyntheticSpec& spec, size_t region, double x0, double x1);

}  // namespace esfl

#endif  // ESFL_DATASETS_H_
