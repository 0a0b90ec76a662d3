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

#include "esfl/datasets.h"
#include "esfl/error.h"

namespace esfl {

namespace {

// Fills missing entries of a position-ordered series: linear between the
// nearest observed neighbours, nearest observed value at either end.
// Returns false when nothing is observed.
bool FillSeries(std::vector<std::optional<double>*>& series) {
  std::vector<size_t> known;
  for (size_t i = 0; i < series.size(); ++i) {
    if (series[i]->has_value()) known.push_back(i);
  }
  if (known.empty()) return false;
  for (size_t i = 0; i < known.front(); ++i) *series[i] = **series[known.front()];
  for (size_t i = known.back() + 1; i < series.size(); ++i) *series[i] = **series[known.back()];
  for (size_t k = 0; k + 1 < known.size(); ++k) {
    const size_t a = known[k];
    const size_t b = known[k + 1];
    const double va = **series[a];
    const double vb = **series[b];
    for (size_t i = a + 1; i < b; ++i) {
      const double t = static_cast<double>(i - a) / static_cast<double>(b - a);
      *series[i] = va + (vb - va) * t;
    }
  }
  return true;
}

bool HasMissing(const RawRecord& r) {
  return !r.target || std::any_of(r.features.begin(), r.features.end(),
                                  [](const auto& f) { return !f.has_value(); });
}

// Drops the rows whose target z-score (population standard deviation)
// exceeds the threshold; returns how many were dropped.
size_t DropOutliers(std::vector<RawRecord>& unit, double threshold) {
  const double n = static_cast<double>(unit.size());
  double sum = 0.0;
  for (const RawRecord& r : unit) sum += *r.target;
  const double mean = sum / n;
  double ss = 0.0;
  for (const RawRecord& r : unit) ss += (*r.target - mean) * (*r.target - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0)) return 0;
  const size_t before = unit.size();
  std::erase_if(unit, [&](const RawRecord& r) {
    return std::fabs(*r.target - mean) / sd > threshold;
  });
  return before - unit.size();
}

}  // namespace

std::vector<RawRecord> Preprocess(std::vector<RawRecord> records,
                                  const PreprocessOptions& options) {
  if (records.empty()) return records;
  const size_t width = records.front().features.size();
  std::map<std::string, std::vector<RawRecord>> units;
  for (RawRecord& r : records) {
    if (r.features.size() != width) {
      throw Error(ErrorCode::kSchema, "records carry different numbers of features");
    }
    units[r.unit()].push_back(std::move(r));
  }

  std::vector<RawRecord> out;
  for (auto& [name, unit] : units) {
    std::vector<std::pair<int64_t, size_t>> keys;
    for (size_t i = 0; i < unit.size(); ++i) keys.emplace_back(DateOrdinal(unit[i].ref_date), i);
    std::stable_sort(keys.begin(), keys.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<RawRecord> sorted;
    sorted.reserve(unit.size());
    for (const auto& k : keys) sorted.push_back(std::move(unit[k.second]));
    unit = std::move(sorted);

    if (options.interpolate) {
      for (size_t c = 0; c <= width; ++c) {
        std::vector<std::optional<double>*> series;
        for (RawRecord& r : unit) series.push_back(c < width ? &r.features[c] : &r.target);
        if (!FillSeries(series)) {
          throw Error(ErrorCode::kUnitUnusable,
                      "unit \"" + name + "\" has no observed values for " +
                          (c < width ? "feature " + std::to_string(c) : std::string("target")));
        }
      }
    } else {
      std::erase_if(unit, HasMissing);
      if (unit.empty()) {
        throw Error(ErrorCode::kUnitUnusable,
                    "unit \"" + name + "\" has no complete rows");
      }
    }

    if (options.remove_outliers) {
      while (DropOutliers(unit, options.z_threshold) > 0) {
      }
    }
    for (RawRecord& r : unit) out.push_back(std::move(r));
  }
  return out;
}

std::vector<size_t> DiscretizeTarget(std::span<const double> values, size_t n_classes) {
  if (n_classes < 2) {
    throw Error(ErrorCode::kInvalidConfig, "n_classes must be >= 2");
  }
  std::vector<size_t> out(values.size(), 0);
  if (values.empty()) return out;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> thresholds;
  for (size_t k = 1; k < n_classes; ++k) {
    const double t = sorted[k * sorted.size() / n_classes];
    if (t > sorted.front()) thresholds.push_back(t);
  }
  for (size_t i = 0; i < values.size(); ++i) {
    size_t cls = 0;
    for (double t : thresholds) {
      if (values[i] >= t) ++cls;
    }
    out[i] = cls;
  }
  return out;
}

}  // namespace esfl
