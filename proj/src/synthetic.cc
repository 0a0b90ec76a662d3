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

#include <cstdio>
#include <string>

#include "esfl/datasets.h"
#include "esfl/error.h"
#include "esfl/rng.h"

namespace esfl {

namespace {

// Half-width of the middle class band for three-class corpora.
constexpr double kMiddleBand = 0.5;

std::string RegionId(size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "region%02zu", r);
  return buf;
}

std::string ClientId(size_t r, size_t c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "r%02zu_c%02zu", r, c);
  return buf;
}

std::string DateFromOrdinal(int64_t z) {
  // civil_from_days (H. Hinnant).
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t y0 = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  const int64_t y = y0 + (m <= 2 ? 1 : 0);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
  return buf;
}

struct SyntheticRow {
  double x0;
  double x1;
  size_t label;
};

std::vector<SyntheticRow> ClientRows(const SyntheticSpec& spec, size_t region,
                                     const std::string& client_id) {
  Rng rng(DeriveSeed(spec.seed, client_id));
  std::vector<SyntheticRow> rows;
  rows.reserve(spec.rows_per_client);
  for (size_t i = 0; i < spec.rows_per_client; ++i) {
    SyntheticRow row{rng.Uniform(-1.0, 1.0), rng.Uniform(-1.0, 1.0), 0};
    row.label = SyntheticRule(spec, region, row.x0, row.x1);
    if (rng.Uniform01() < spec.noise_rate) {
      row.label = (row.label + 1 + rng.UniformIndex(spec.n_classes - 1)) % spec.n_classes;
    }
    rows.push_back(row);
  }
  return rows;
}

SpatialAttribute ClientSpatial(size_t region, size_t client) {
  SpatialAttribute s;
  s.latitude = 45.0 + 2.0 * static_cast<double>(region) + 0.25 * static_cast<double>(client);
  s.longitude = -66.0 + 2.0 * static_cast<double>(region) + 0.15 * static_cast<double>(client);
  s.hierarchy_path = {ClientId(region, client), RegionId(region)};
  return s;
}

}  // namespace

void SyntheticSpec::Validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidConfig, m); };
  if (n_regions == 0 || clients_per_region == 0 || rows_per_client == 0) {
    fail("synthetic counts must all be >= 1");
  }
  if (n_regions > 99 || clients_per_region > 99) fail("at most 99 regions and 99 clients per region");
  if (n_classes != 2 && n_classes != 3) fail("synthetic n_classes must be 2 or 3");
  if (!(region_separation >= 0.0)) fail("region_separation must be >= 0");
  if (!(noise_rate >= 0.0 && noise_rate < 0.5)) fail("noise_rate must be in [0, 0.5)");
}

size_t SyntheticRule(const SyntheticSpec& spec, size_t region, double x0, double x1) {
  // Region offsets spread evenly over [-separation, +separation].
  const double offset =
      spec.n_regions > 1
          ? spec.region_separation *
                (2.0 * static_cast<double>(region) / static_cast<double>(spec.n_regions - 1) - 1.0)
          : 0.0;
  const double score = x0 + x1 - offset;
  if (spec.n_classes == 2) return score >= 0.0 ? 1 : 0;
  if (score < -kMiddleBand) return 0;
  return score < kMiddleBand ? 1 : 2;
}

SyntheticData GenerateSynthetic(const SyntheticSpec& spec) {
  spec.Validate();
  SyntheticData out;
  std::map<std::string, std::vector<std::string>> paths;
  for (size_t r = 0; r < spec.n_regions; ++r) {
    for (size_t c = 0; c < spec.clients_per_region; ++c) {
      ClientDataset ds;
      ds.client_id = ClientId(r, c);
      ds.spatial = ClientSpatial(r, c);
      ds.n_classes = spec.n_classes;
      for (const SyntheticRow& row : ClientRows(spec, r, ds.client_id)) {
        ds.rows.push_back(LabeledRow{{row.x0, row.x1}, row.label, Split::kTrain});
      }
      paths.emplace(ds.client_id, ds.spatial.hierarchy_path);
      out.clients.emplace(ds.client_id, std::move(ds));
    }
  }
  out.topology = TierTopology::FromPaths(paths);
  // Flipped labels are never the majority class at any point, so the
  // noise-free rule is Bayes-optimal.
  out.oracle_accuracy = 1.0 - spec.noise_rate;
  return out;
}

std::vector<RawRecord> SyntheticRecords(const SyntheticSpec& spec) {
  spec.Validate();
  const int64_t start = DateOrdinal("2020-01-01");
  std::vector<RawRecord> records;
  for (size_t r = 0; r < spec.n_regions; ++r) {
    for (size_t c = 0; c < spec.clients_per_region; ++c) {
      const SpatialAttribute spatial = ClientSpatial(r, c);
      const auto rows = ClientRows(spec, r, spatial.hierarchy_path.front());
      for (size_t i = 0; i < rows.size(); ++i) {
        RawRecord rec;
        rec.spatial = spatial;
        rec.ref_date = DateFromOrdinal(start + static_cast<int64_t>(i));
        rec.features = {rows[i].x0, rows[i].x1};
        rec.target = static_cast<double>(rows[i].label);
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

}  // namespace esfl
