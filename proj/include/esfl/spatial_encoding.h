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

#ifndef ESFL_SPATIAL_ENCODING_H_
#define ESFL_SPATIAL_ENCODING_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace esfl {

// Geographic identity of a client: coordinates plus the labels of every
// hierarchy level from leaf to root, e.g. {station, city} or {province}.
// The root itself is implicit and carries no label.
struct SpatialAttribute {
  double latitude = 0.0;
  double longitude = 0.0;
  std::vector<std::string> hierarchy_path;

  // Throws kInvalidCoordinate / kInconsistentHierarchy.
  void Validate() const;

  bool operator==(const SpatialAttribute&) const = default;
};

// Which parts of the encoding are produced. With both off the model sees
// raw features only.
struct EncodingOptions {
  bool coordinates = true;
  bool hierarchy = true;

  bool enabled() const { return coordinates || hierarchy; }
  bool operator==(const EncodingOptions&) const = default;
};

struct CoordinateBounds {
  double min_latitude = 0.0;
  double max_latitude = 0.0;
  double min_longitude = 0.0;
  double max_longitude = 0.0;

  bool operator==(const CoordinateBounds&) const = default;
};

// Label tables and coordinate bounds observed over a training corpus.
// Immutable once built.
class SpatialVocabulary {
 public:
  SpatialVocabulary() = default;

  // Reassembles a vocabulary from its serialized parts. Each level's labels
  // must be strictly increasing.
  static SpatialVocabulary FromParts(std::vector<std::vector<std::string>> levels,
                                     CoordinateBounds bounds,
                                     EncodingOptions options);

  // Sorted labels per level, index 0 = leaf level.
  const std::vector<std::vector<std::string>>& levels() const { return levels_; }
  const CoordinateBounds& bounds() const { return bounds_; }
  const EncodingOptions& options() const { return options_; }

  size_t depth() const { return levels_.size(); }
  std::optional<size_t> IndexOf(size_t level, std::string_view label) const;

  // 2 * coordinates + sum of level sizes * hierarchy.
  size_t EncodingLength() const;

  bool operator==(const SpatialVocabulary& o) const {
    return levels_ == o.levels_ && bounds_ == o.bounds_ && options_ == o.options_;
  }

 private:
  friend SpatialVocabulary BuildVocabulary(std::span<const SpatialAttribute>,
                                           EncodingOptions);

  std::vector<std::vector<std::string>> levels_;
  std::vector<std::map<std::string, size_t, std::less<>>> index_;
  CoordinateBounds bounds_;
  EncodingOptions options_;
};

// Layout: [normalized_lat, normalized_lon] ++ one-hot block per level.
// Never empty.
class SpatialEncoding {
 public:
  explicit SpatialEncoding(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  size_t size() const { return values_.size(); }

  bool operator==(const SpatialEncoding&) const = default;

 private:
  std::vector<double> values_;
};

// Throws kEmptyCorpus on no records, kInconsistentHierarchy on ragged paths.
SpatialVocabulary BuildVocabulary(std::span<const SpatialAttribute> records,
                                  EncodingOptions options = {});

// Throws kUnknownRegion for labels missing from the vocabulary and
// kInvalidConfig when the vocabulary has encoding disabled.
SpatialEncoding EncodeSpatial(const SpatialAttribute& attr,
                              const SpatialVocabulary& vocab);

// encoding ++ raw_features.
std::vector<double> FeatureVector(std::span<const double> raw_features,
                                  const SpatialEncoding& encoding);

// The model input for one row: FeatureVector(raw, EncodeSpatial(attr)) when
// encoding is enabled, raw features alone otherwise.
std::vector<double> ModelInput(std::span<const double> raw_features,
                               const SpatialAttribute& attr,
                               const SpatialVocabulary& vocab);

}  // namespace esfl

#endif  // ESFL_SPATIAL_ENCODING_H_
