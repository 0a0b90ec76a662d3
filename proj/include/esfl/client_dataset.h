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

#ifndef ESFL_CLIENT_DATASET_H_
#define ESFL_CLIENT_DATASET_H_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "esfl/spatial_encoding.h"
#include "esfl/tensor_nn.h"

namespace esfl {

enum class Split { kTrain, kValidation };

struct LabeledRow {
  std::vector<double> features;
  size_t label = 0;
  Split split = Split::kTrain;

  bool operator==(const LabeledRow&) const = default;
};

// One spatial unit's data. Every row shares the client's spatial attribute.
struct ClientDataset {
  std::string client_id;
  SpatialAttribute spatial;
  size_t n_classes = 2;
  std::vector<LabeledRow> rows;

  size_t CountSplit(Split split) const;
  // Throws kEmptyClient on no rows, kInvalidLabel on label >= n_classes,
  // kShape on ragged feature vectors.
  void Validate() const;

  bool operator==(const ClientDataset&) const = default;
};

using ClientMap = std::map<std::string, ClientDataset>;

// Model inputs and labels of the rows tagged `split`, in row order.
struct EncodedRows {
  Matrix features;
  std::vector<size_t> labels;
};

EncodedRows EncodeRows(const ClientDataset& dataset, Split split,
                       const SpatialVocabulary& vocab);

// Model input width for a corpus with `raw_width` raw features.
inline size_t InputWidth(const SpatialVocabulary& vocab, size_t raw_width) {
  return vocab.EncodingLength() + raw_width;
}

}  // namespace esfl

#endif  // ESFL_CLIENT_DATASET_H_
