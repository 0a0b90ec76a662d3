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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "esfl/datasets.h"
#include "esfl/error.h"
#include "esfl/rng.h"

namespace esfl {

Partition PartitionClients(std::span<const RawRecord> records,
                           std::span<const size_t> labels,
                           const PartitionOptions& options) {
  if (records.empty()) throw Error(ErrorCode::kEmptyCorpus, "no records to partition");
  if (labels.size() != records.size()) {
    throw Error(ErrorCode::kShape, "one label per record is required");
  }
  std::map<std::string, std::vector<size_t>> members;
  for (size_t i = 0; i < records.size(); ++i) members[records[i].unit()].push_back(i);

  std::vector<std::string> thin;
  for (const auto& [unit, idx] : members) {
    if (idx.size() < options.min_rows) {
      thin.push_back("\"" + unit + "\" (" + std::to_string(idx.size()) + " rows)");
    }
  }
  if (!thin.empty()) {
    std::string msg = "clients below min_rows=" + std::to_string(options.min_rows) + ":";
    for (const std::string& t : thin) msg += " " + t;
    throw Error(ErrorCode::kThinClient, msg);
  }

  Partition out;
  std::map<std::string, std::vector<std::string>> paths;
  for (const auto& [unit, idx] : members) {
    const RawRecord& first = records[idx.front()];
    ClientDataset ds;
    ds.client_id = unit;
    ds.n_classes = options.n_classes;
    ds.spatial.hierarchy_path = first.spatial.hierarchy_path;
    bool same_coords = true;
    double lat = 0.0;
    double lon = 0.0;
    for (size_t i : idx) {
      const RawRecord& r = records[i];
      if (r.spatial.hierarchy_path != first.spatial.hierarchy_path) {
        throw Error(ErrorCode::kInconsistentHierarchy,
                    "unit \"" + unit + "\" appears under two different hierarchy paths");
      }
      same_coords = same_coords && r.spatial.latitude == first.spatial.latitude &&
                    r.spatial.longitude == first.spatial.longitude;
      lat += r.spatial.latitude;
      lon += r.spatial.longitude;
      LabeledRow row;
      row.label = labels[i];
      for (const auto& f : r.features) {
        if (!f) {
          throw Error(ErrorCode::kRow, "line " + std::to_string(r.source_line) +
                                           ": missing feature after preprocessing");
        }
        row.features.push_back(*f);
      }
      ds.rows.push_back(std::move(row));
    }
    // A unit's coordinates are its records' mean position.
    const double n = static_cast<double>(idx.size());
    ds.spatial.latitude = same_coords ? first.spatial.latitude : lat / n;
    ds.spatial.longitude = same_coords ? first.spatial.longitude : lon / n;
    ds.Validate();
    paths.emplace(unit, ds.spatial.hierarchy_path);
    out.clients.emplace(unit, std::move(ds));
  }
  out.topology = TierTopology::FromPaths(paths);
  return out;
}

ClientDataset TrainValidSplit(ClientDataset dataset, double ratio, uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::kSplit, "split ratio must be in (0, 1)");
  }
  const size_t n = dataset.rows.size();
  const size_t n_train = static_cast<size_t>(std::floor(ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw Error(ErrorCode::kSplit, "splitting client \"" + dataset.client_id + "\" (" +
                                       std::to_string(n) + " rows) at ratio " +
                                       std::to_string(ratio) + " leaves one side empty");
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.Shuffle(std::span<size_t>(order));
  for (size_t k = 0; k < n; ++k) {
    dataset.rows[order[k]].split = k < n_train ? Split::kTrain : Split::kValidation;
  }
  return dataset;
}

}  // namespace esfl
