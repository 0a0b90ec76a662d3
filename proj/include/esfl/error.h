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

#ifndef ESFL_ERROR_H_
#define ESFL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace esfl {

// Every failure raised by the library carries one of these codes. The CLI
// maps codes onto process exit statuses through CategoryOf().
enum class ErrorCode {
  // tensor_nn
  kInvalidDimension,
  kShape,
  kInvalidLabel,
  kInvalidConfig,
  kNonFinite,
  // spatial_encoding
  kEmptyCorpus,
  kInconsistentHierarchy,
  kUnknownRegion,
  kInvalidCoordinate,
  // fed_core
  kEmptyClient,
  kEmptyAggregation,
  kDegenerateWeights,
  kMissingClient,
  kTopology,
  kCorruptModel,
  // datasets
  kSchema,
  kRow,
  kUnitUnusable,
  kThinClient,
  kSplit,
  // harness
  kEmptyEval,
  kConfigValidation,
  kStrictMode,
  kIo,
};

enum class ErrorCategory { kConfig, kData, kRuntime };

std::string_view ErrorCodeName(ErrorCode code);
ErrorCategory CategoryOf(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  // Same code, message prefixed with the pipeline stage that raised it.
  Error WithStage(std::string_view stage) const {
    return Error(code_, std::string(stage) + ": " + what());
  }

 private:
  ErrorCode code_;
};

}  // namespace esfl

#endif  // ESFL_ERROR_H_
