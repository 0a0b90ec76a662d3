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

#include "esfl/spatial_encoding.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "esfl/error.h"

namespace esfl {

namespace {

double Normalize(double v, double lo, double hi) {
  if (!(hi > lo)) return 0.5;
  return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

std::vector<std::map<std::string, size_t, std::less<>>> IndexLevels(
    const std::vector<std::vector<std::string>>& levels) {
  std::vector<std::map<std::string, size_t, std::less<>>> index(levels.size());
  for (size_t l = 0; l < levels.size(); ++l) {
    for (size_t i = 0; i < levels[l].size(); ++i) index[l].emplace(levels[l][i], i);
  }
  return index;
}

}  // namespace

void SpatialAttribute::Validate() const {
  if (!std::isfinite(latitude) || latitude < -90.0 || latitude > 90.0) {
    throw Error(ErrorCode::kInvalidCoordinate,
                "latitude " + std::to_string(latitude) + " outside [-90, 90]");
  }
  if (!std::isfinite(longitude) || longitude < -180.0 || longitude > 180.0) {
    throw Error(ErrorCode::kInvalidCoordinate,
                "longitude " + std::to_string(longitude) + " outside [-180, 180]");
  }
  if (hierarchy_path.empty()) {
    throw Error(ErrorCode::kInconsistentHierarchy, "empty hierarchy path");
  }
}

SpatialVocabulary SpatialVocabulary::FromParts(
    std::vector<std::vector<std::string>> levels, CoordinateBounds bounds,
    EncodingOptions options) {
  for (const auto& level : levels) {
    if (level.empty() || !std::is_sorted(level.begin(), level.end()) ||
        std::adjacent_find(level.begin(), level.end()) != level.end()) {
      throw Error(ErrorCode::kInconsistentHierarchy,
                  "vocabulary level labels must be non-empty, sorted and unique");
    }
  }
  if (bounds.min_latitude > bounds.max_latitude ||
      bounds.min_longitude > bounds.max_longitude) {
    throw Error(ErrorCode::kInvalidCoordinate, "vocabulary bounds have min > max");
  }
  SpatialVocabulary v;
  v.index_ = IndexLevels(levels);
  v.levels_ = std::move(levels);
  v.bounds_ = bounds;
  v.options_ = options;
  return v;
}

std::optional<size_t> SpatialVocabulary::IndexOf(size_t level,
                                                 std::string_view label) const {
  if (level >= index_.size()) return std::nullopt;
  auto it = index_[level].find(label);
  if (it == index_[level].end()) return std::nullopt;
  return it->second;
}

size_t SpatialVocabulary::EncodingLength() const {
  size_t n = options_.coordinates ? 2 : 0;
  if (options_.hierarchy) {
    for (const auto& level : levels_) n += level.size();
  }
  return n;
}

SpatialEncoding::SpatialEncoding(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "a spatial encoding cannot be empty");
  }
}

SpatialVocabulary BuildVocabulary(std::span<const SpatialAttribute> records,
                                  EncodingOptions options) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot build a vocabulary from no records");
  }
  const size_t depth = records.front().hierarchy_path.size();
  std::vector<std::set<std::string>> labels(depth);
  CoordinateBounds b{records.front().latitude, records.front().latitude,
                     records.front().longitude, records.front().longitude};
  for (const SpatialAttribute& r : records) {
    r.Validate();
    if (r.hierarchy_path.size() != depth) {
      throw Error(ErrorCode::kInconsistentHierarchy,
                  "hierarchy paths of length " + std::to_string(depth) + " and " +
                      std::to_string(r.hierarchy_path.size()) + " mixed");
    }
    for (size_t l = 0; l < depth; ++l) labels[l].insert(r.hierarchy_path[l]);
    b.min_latitude = std::min(b.min_latitude, r.latitude);
    b.max_latitude = std::max(b.max_latitude, r.latitude);
    b.min_longitude = std::min(b.min_longitude, r.longitude);
    b.max_longitude = std::max(b.max_longitude, r.longitude);
  }
  std::vector<std::vector<std::string>> levels;
  levels.reserve(depth);
  for (auto& s : labels) levels.emplace_back(s.begin(), s.end());
  return SpatialVocabulary::FromParts(std::move(levels), b, options);
}

SpatialEncoding EncodeSpatial(const SpatialAttribute& attr,
                              const SpatialVocabulary& vocab) {
  const EncodingOptions& opt = vocab.options();
  if (!opt.enabled()) {
    throw Error(ErrorCode::kInvalidConfig, "spatial encoding is disabled");
  }
  if (attr.hierarchy_path.size() != vocab.depth()) {
    throw Error(ErrorCode::kInconsistentHierarchy,
                "hierarchy path length " + std::to_string(attr.hierarchy_path.size()) +
                    " does not match vocabulary depth " +
                    std::to_string(vocab.depth()));
  }
  std::vector<double> out;
  out.reserve(vocab.EncodingLength());
  if (opt.coordinates) {
    const CoordinateBounds& b = vocab.bounds();
    out.push_back(Normalize(attr.latitude, b.min_latitude, b.max_latitude));
    out.push_back(Normalize(attr.longitude, b.min_longitude, b.max_longitude));
  }
  // Labels are checked even when only coordinates are encoded, so unseen
  // regions never slip through.
  for (size_t l = 0; l < vocab.depth(); ++l) {
    auto idx = vocab.IndexOf(l, attr.hierarchy_path[l]);
    if (!idx) {
      throw Error(ErrorCode::kUnknownRegion,
                  "label \"" + attr.hierarchy_path[l] + "\" at hierarchy level " +
                      std::to_string(l) + " is not in the vocabulary");
    }
    if (opt.hierarchy) {
      const size_t offset = out.size();
      out.resize(offset + vocab.levels()[l].size(), 0.0);
      out[offset + *idx] = 1.0;
    }
  }
  return SpatialEncoding(std::move(out));
}

std::vector<double> FeatureVector(std::span<const double> raw_features,
                                  const SpatialEncoding& encoding) {
  std::vector<double> out(encoding.values().begin(), encoding.values().end());
  out.insert(out.end(), raw_features.begin(), raw_features.end());
  return out;
}

std::vector<double> ModelInput(std::span<const double> raw_features,
                               const SpatialAttribute& attr,
                               const SpatialVocabulary& vocab) {
  if (!vocab.options().enabled()) {
    return {raw_features.begin(), raw_features.end()};
  }
  return FeatureVector(raw_features, EncodeSpatial(attr, vocab));
}

}  // namespace esfl
