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

#ifndef ESFL_MODEL_IO_H_
#define ESFL_MODEL_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "esfl/tensor_nn.h"

namespace esfl {

// Model file layout, little-endian, no padding:
//   "ESFL" | version 0x01 | u32 input | u32 hidden | u32 classes |
//   f64 payload in ModelParams flattening order.
inline constexpr uint8_t kModelFormatVersion = 0x01;
inline constexpr size_t kModelHeaderSize = 4 + 1 + 3 * 4;

std::vector<uint8_t> SerializeModel(const ModelParams& params);

// Throws kCorruptModel on bad magic/version, zero dims, a payload whose
// length disagrees with the header, or non-finite values.
ModelParams DeserializeModel(std::span<const uint8_t> bytes);

// Throw kIo on filesystem failures.
void WriteModelFile(const std::filesystem::path& path, const ModelParams& params);
ModelParams ReadModelFile(const std::filesystem::path& path);

}  // namespace esfl

#endif  // ESFL_MODEL_IO_H_
