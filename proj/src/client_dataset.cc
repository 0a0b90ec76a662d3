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

#include "esfl/client_dataset.h"

#include <algorithm>
#include <string>

#include "esfl/error.h"

namespace esfl {

size_t ClientDataset::CountSplit(Split split) const {
  return static_cast<size_t>(std::count_if(
      rows.begin(), rows.end(), [split](const LabeledRow& r) { return r.split == split; }));
}

void ClientDataset::Validate() const {
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptyClient, "client \"" + client_id + "\" has no rows");
  }
  const size_t width = rows.front().features.size();
  for (const LabeledRow& r : rows) {
    if (r.label >= n_classes) {
      throw Error(ErrorCode::kInvalidLabel,
                  "client \"" + client_id + "\" has label " + std::to_string(r.label) +
                      " with " + std::to_string(n_classes) + " classes");
    }
    if (r.features.size() != width) {
      throw Error(ErrorCode::kShape,
                  "client \"" + client_id + "\" has rows of different widths");
    }
  }
}

EncodedRows EncodeRows(const ClientDataset& dataset, Split split,
                       const SpatialVocabulary& vocab) {
  const size_t n = dataset.CountSplit(split);
  EncodedRows out;
  if (n == 0) return out;
  const SpatialEncoding* enc = nullptr;
  std::optional<SpatialEncoding> encoding;
  if (vocab.options().enabled()) {
    encoding.emplace(EncodeSpatial(dataset.spatial, vocab));
    enc = &*encoding;
  }
  const size_t raw_width = dataset.rows.front().features.size();
  const size_t enc_width = enc ? enc->size() : 0;
  out.features = Matrix(n, enc_width + raw_width);
  out.labels.reserve(n);
  size_t k = 0;
  for (const LabeledRow& r : dataset.rows) {
    if (r.split != split) continue;
    if (r.features.size() != raw_width) {
      throw Error(ErrorCode::kShape,
                  "client \"" + dataset.client_id + "\" has rows of different widths");
    }
    auto dst = out.features.row(k++);
    if (enc) std::copy(enc->values().begin(), enc->values().end(), dst.begin());
    std::copy(r.features.begin(), r.features.end(), dst.begin() + enc_width);
    out.labels.push_back(r.label);
  }
  return out;
}

}  // namespace esfl
