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

#include "esfl/model_io.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "esfl/error.h"

namespace esfl {

namespace {

constexpr uint8_t kMagic[4] = {'E', 'S', 'F', 'L'};

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutU64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t GetU32(const uint8_t* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
  return v;
}

uint64_t GetU64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}

[[noreturn]] void Corrupt(const std::string& msg) {
  throw Error(ErrorCode::kCorruptModel, "corrupt model: " + msg);
}

uint32_t CheckedDim(size_t d) {
  if (d > std::numeric_limits<uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidDimension, "dimension does not fit in u32");
  }
  return static_cast<uint32_t>(d);
}

}  // namespace

std::vector<uint8_t> SerializeModel(const ModelParams& params) {
  const ModelDims& d = params.dims();
  std::vector<uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(kModelHeaderSize + 8 * params.size());
  out.push_back(kModelFormatVersion);
  PutU32(out, CheckedDim(d.input));
  PutU32(out, CheckedDim(d.hidden));
  PutU32(out, CheckedDim(d.classes));
  for (double v : params.Flatten()) PutU64(out, std::bit_cast<uint64_t>(v));
  return out;
}

ModelParams DeserializeModel(std::span<const uint8_t> bytes) {
  if (bytes.size() < kModelHeaderSize) {
    Corrupt("truncated header (" + std::to_string(bytes.size()) + " bytes)");
  }
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    Corrupt("bad magic bytes");
  }
  if (bytes[4] != kModelFormatVersion) {
    Corrupt("unsupported version " + std::to_string(bytes[4]));
  }
  ModelDims dims{GetU32(&bytes[5]), GetU32(&bytes[9]), GetU32(&bytes[13])};
  if (dims.input == 0 || dims.hidden == 0 || dims.classes == 0) {
    Corrupt("header declares a zero dimension");
  }
  // All factors are < 2^32, so the count fits in 128 bits; compare against
  // the actual payload before allocating anything.
  const unsigned __int128 expected =
      static_cast<unsigned __int128>(dims.hidden) * (dims.input + 1) +
      static_cast<unsigned __int128>(dims.classes) * (dims.hidden + 1);
  const size_t payload = bytes.size() - kModelHeaderSize;
  if (payload % 8 != 0 || static_cast<unsigned __int128>(payload / 8) != expected) {
    Corrupt("payload of " + std::to_string(payload) +
            " bytes does not match the declared dimensions");
  }
  ModelParams params(dims);
  auto values = params.mutable_values();
  const uint8_t* p = bytes.data() + kModelHeaderSize;
  for (size_t i = 0; i < values.size(); ++i, p += 8) {
    values[i] = std::bit_cast<double>(GetU64(p));
    if (!std::isfinite(values[i])) Corrupt("non-finite parameter value");
  }
  return params;
}

void WriteModelFile(const std::filesystem::path& path, const ModelParams& params) {
  const std::vector<uint8_t> bytes = SerializeModel(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

ModelParams ReadModelFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return DeserializeModel(bytes);
}

}  // namespace esfl
