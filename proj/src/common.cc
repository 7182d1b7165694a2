// Copyright 2026 The OPPA Authors
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

#include "oppa/common.h"

namespace oppa {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kFailedPrecondition: return "failed_precondition";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kIllegalAct: return "illegal_act";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kCorruptManifest: return "corrupt_manifest";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kTruncatedBlob: return "truncated_blob";
    case ErrorCode::kIncompatible: return "incompatible";
  }
  return "unknown";
}

std::string ShapeString(const std::vector<int>& shape) {
  std::string out = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

int ArgMax(const std::vector<double>& values, const std::vector<bool>* mask) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(values.size()); ++i) {
    if (mask != nullptr && !(*mask)[i]) continue;
    if (best < 0 || values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace oppa
