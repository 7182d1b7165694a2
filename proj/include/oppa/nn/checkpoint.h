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

#ifndef OPPA_NN_CHECKPOINT_H_
#define OPPA_NN_CHECKPOINT_H_

#include <string>

#include "json.hpp"
#include "oppa/nn/param_store.h"

namespace oppa::nn {

// On-disk layout of a checkpoint directory:
//
//   manifest.json  {"format", "version", "dtype": "f64", "step_count",
//                   "blob_bytes", "meta", "tensors": {name: {"shape",
//                   "dtype", "offset"}}}
//   params.bin     little-endian doubles; for each tensor, in manifest
//                  order, value, grad, moment1, moment2 back to back
//                  starting at "offset".
//
// Tensors appear in ParamStore insertion order and the blob has no padding,
// so save -> load -> save reproduces both files byte for byte.
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kBlobFile = "params.bin";

void SaveCheckpoint(const ParamStore& store, const std::string& dir,
                    const nlohmann::ordered_json& meta = nlohmann::ordered_json::object());

// Errors: kIo (missing files), kCorruptManifest (unparsable or missing
// fields), kTruncatedBlob (blob shorter than the manifest says),
// kShapeMismatch (a tensor's shape disagrees with its byte range; the
// message names the entry).
ParamStore LoadCheckpoint(const std::string& dir,
                          nlohmann::ordered_json* meta = nullptr);

// Loads into an existing store whose layout must match exactly.
void LoadCheckpointInto(ParamStore& store, const std::string& dir);

}  // namespace oppa::nn

#endif  // OPPA_NN_CHECKPOINT_H_
