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

#ifndef OPPA_COMMON_H_
#define OPPA_COMMON_H_

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oppa {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kFailedPrecondition,
  kNotFound,
  kIllegalAct,
  kNonFinite,
  kIo,
  kCorruptManifest,
  kShapeMismatch,
  kTruncatedBlob,
  kIncompatible,
};

const char* ErrorCodeName(ErrorCode code);

// All recoverable failures in the library surface as this exception. The
// code lets callers (CLI, play service) map errors to exit codes and HTTP
// statuses without string matching.
class OppaError : public std::runtime_error {
 public:
  OppaError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

namespace internal {
inline void StrAppendAll(std::ostringstream&) {}
template <typename T, typename... Rest>
void StrAppendAll(std::ostringstream& oss, T&& head, Rest&&... rest) {
  oss << std::forward<T>(head);
  StrAppendAll(oss, std::forward<Rest>(rest)...);
}
}  // namespace internal

template <typename... Args>
std::string StrCat(Args&&... args) {
  std::ostringstream oss;
  internal::StrAppendAll(oss, std::forward<Args>(args)...);
  return oss.str();
}

template <typename... Args>
[[noreturn]] void Fail(ErrorCode code, Args&&... args) {
  throw OppaError(code, StrCat(std::forward<Args>(args)...));
}

std::string ShapeString(const std::vector<int>& shape);

using Rng = std::mt19937_64;

// Uniform double in [0, 1). Implemented without std distributions so the
// stream is identical across standard library implementations.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline int UniformInt(Rng& rng, int n) {
  if (n <= 0) Fail(ErrorCode::kInvalidArgument, "UniformInt: n must be > 0");
  return static_cast<int>(UniformUnit(rng) * n);
}

// Per-episode stream derived as seed xor episode index, mixed so that
// neighbouring episode indices do not produce correlated generators.
inline uint64_t EpisodeSeed(uint64_t seed, uint64_t episode_index) {
  uint64_t z = (seed ^ episode_index) + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Index of the maximum entry; ties resolve to the lowest index. Entries with
// a false mask bit are skipped. Returns -1 if nothing is eligible.
int ArgMax(const std::vector<double>& values,
           const std::vector<bool>* mask = nullptr);

}  // namespace oppa

#endif  // OPPA_COMMON_H_
