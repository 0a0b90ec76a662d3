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

#include "esfl/error.h"

namespace esfl {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "invalid-dimension";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kInvalidLabel: return "invalid-label";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kEmptyCorpus: return "empty-corpus";
    case ErrorCode::kInconsistentHierarchy: return "inconsistent-hierarchy";
    case ErrorCode::kUnknownRegion: return "unknown-region";
    case ErrorCode::kInvalidCoordinate: return "invalid-coordinate";
    case ErrorCode::kEmptyClient: return "empty-client";
    case ErrorCode::kEmptyAggregation: return "empty-aggregation";
    case ErrorCode::kDegenerateWeights: return "degenerate-weights";
    case ErrorCode::kMissingClient: return "missing-client";
    case ErrorCode::kTopology: return "topology";
    case ErrorCode::kCorruptModel: return "corrupt-model";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kRow: return "row";
    case ErrorCode::kUnitUnusable: return "unit-unusable";
    case ErrorCode::kThinClient: return "thin-client";
    case ErrorCode::kSplit: return "split";
    case ErrorCode::kEmptyEval: return "empty-eval";
    case ErrorCode::kConfigValidation: return "config-validation";
    case ErrorCode::kStrictMode: return "strict-mode";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

ErrorCategory CategoryOf(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigValidation:
    case ErrorCode::kStrictMode:
    case ErrorCode::kInvalidConfig:
      return ErrorCategory::kConfig;
    case ErrorCode::kEmptyCorpus:
    case ErrorCode::kInconsistentHierarchy:
    case ErrorCode::kUnknownRegion:
    case ErrorCode::kInvalidCoordinate:
    case ErrorCode::kEmptyClient:
    case ErrorCode::kMissingClient:
    case ErrorCode::kCorruptModel:
    case ErrorCode::kSchema:
    case ErrorCode::kRow:
    case ErrorCode::kUnitUnusable:
    case ErrorCode::kThinClient:
    case ErrorCode::kSplit:
    case ErrorCode::kEmptyEval:
    case ErrorCode::kIo:
      return ErrorCategory::kData;
    default:
      return ErrorCategory::kRuntime;
  }
}

}  // namespace esfl
