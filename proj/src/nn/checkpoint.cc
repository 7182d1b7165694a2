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

#include "oppa/nn/checkpoint.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace oppa::nn {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kFieldsPerTensor = 4;

void AppendLe(std::string& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

double ReadLe(const std::string& blob, size_t pos) {
  uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) {
    bits |= static_cast<uint64_t>(static_cast<unsigned char>(blob[pos + b])) << (8 * b);
  }
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open ", path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void WriteFile(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write ", path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "short write to ", path.string());
}

}  // namespace

void SaveCheckpoint(const ParamStore& store, const std::string& dir,
                    const ordered_json& meta) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create ", dir, ": ", ec.message());
  std::string blob;
  ordered_json tensors = ordered_json::object();
  for (const ParamEntry& e : store.entries()) {
    tensors[e.name] = {{"shape", e.value.shape}, {"dtype", "f64"}, {"offset", blob.size()}};
    for (const Tensor* t : {&e.value, &e.grad, &e.moment1, &e.moment2}) {
      for (double v : t->data) AppendLe(blob, v);
    }
  }
  ordered_json manifest = {
      {"format", "oppa-checkpoint"},
      {"version", 1},
      {"dtype", "f64"},
      {"step_count", store.step_count()},
      {"blob_bytes", blob.size()},
      {"meta", meta},
      {"tensors", tensors},
  };
  WriteFile(fs::path(dir) / kBlobFile, blob);
  WriteFile(fs::path(dir) / kManifestFile, manifest.dump(2) + "\n");
}

ParamStore LoadCheckpoint(const std::string& dir, ordered_json* meta) {
  const std::string text = ReadFile(fs::path(dir) / kManifestFile);
  const std::string blob = ReadFile(fs::path(dir) / kBlobFile);
  ordered_json manifest;
  try {
    manifest = ordered_json::parse(text);
  } catch (const std::exception& ex) {
    Fail(ErrorCode::kCorruptManifest, "manifest in ", dir, " is not valid JSON: ",
         ex.what());
  }
  ParamStore store;
  try {
    if (manifest.at("format") != "oppa-checkpoint" || manifest.at("version") != 1 ||
        manifest.at("dtype") != "f64") {
      Fail(ErrorCode::kCorruptManifest, "unsupported checkpoint header in ", dir);
    }
    const size_t blob_bytes = manifest.at("blob_bytes").get<size_t>();
    if (blob.size() < blob_bytes) {
      Fail(ErrorCode::kTruncatedBlob, "blob in ", dir, " holds ", blob.size(),
           " bytes but the manifest declares ", blob_bytes);
    }
    if (blob.size() != blob_bytes) {
      Fail(ErrorCode::kCorruptManifest, "blob in ", dir, " has ",
           blob.size() - blob_bytes, " trailing bytes");
    }
    const ordered_json& tensors = manifest.at("tensors");
    std::vector<std::string> names;
    std::vector<size_t> offsets;
    std::vector<std::vector<int>> shapes;
    for (auto it = tensors.begin(); it != tensors.end(); ++it) {
      names.push_back(it.key());
      offsets.push_back(it.value().at("offset").get<size_t>());
      shapes.push_back(it.value().at("shape").get<std::vector<int>>());
      if (it.value().at("dtype") != "f64") {
        Fail(ErrorCode::kCorruptManifest, "tensor '", it.key(), "' has dtype ",
             it.value().at("dtype").dump(), ", expected \"f64\"");
      }
    }
    for (size_t i = 0; i < names.size(); ++i) {
      const size_t expected_end = i + 1 < names.size() ? offsets[i + 1] : blob_bytes;
      int64_t n = 0;
      bool valid_shape = !shapes[i].empty();
      for (int d : shapes[i]) valid_shape = valid_shape && d > 0;
      if (valid_shape) n = NumElements(shapes[i]);
      const size_t end = offsets[i] + static_cast<size_t>(n) * 8 * kFieldsPerTensor;
      if (!valid_shape || end != expected_end || offsets[i] > blob_bytes) {
        Fail(ErrorCode::kShapeMismatch, "tensor '", names[i], "' with shape ",
             ShapeString(shapes[i]), " at offset ", offsets[i],
             " does not fit its byte range ending at ", expected_end);
      }
      ParamEntry e;
      e.name = names[i];
      size_t pos = offsets[i];
      for (Tensor* t : {&e.value, &e.grad, &e.moment1, &e.moment2}) {
        t->shape = shapes[i];
        t->data.resize(n);
        for (int64_t k = 0; k < n; ++k, pos += 8) t->data[k] = ReadLe(blob, pos);
      }
      store.Add(std::move(e));
    }
    store.set_step_count(manifest.at("step_count").get<int64_t>());
    if (meta != nullptr) *meta = manifest.at("meta");
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorCode::kCorruptManifest, "manifest in ", dir, " is malformed: ", ex.what());
  }
  return store;
}

void LoadCheckpointInto(ParamStore& store, const std::string& dir) {
  ParamStore loaded = LoadCheckpoint(dir);
  if (loaded.size() != store.size()) {
    Fail(ErrorCode::kShapeMismatch, "checkpoint ", dir, " has ", loaded.size(),
         " tensors, model expects ", store.size());
  }
  for (int i = 0; i < store.size(); ++i) {
    const ParamEntry& want = store.at(i);
    const ParamEntry& got = loaded.at(i);
    if (want.name != got.name || want.value.shape != got.value.shape) {
      Fail(ErrorCode::kShapeMismatch, "checkpoint entry '", got.name, "' ",
           ShapeString(got.value.shape), " does not match model entry '",
           want.name, "' ", ShapeString(want.value.shape));
    }
  }
  store = std::move(loaded);
}

}  // namespace oppa::nn
