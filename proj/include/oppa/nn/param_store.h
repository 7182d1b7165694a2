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

#ifndef OPPA_NN_PARAM_STORE_H_
#define OPPA_NN_PARAM_STORE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "oppa/common.h"

namespace oppa::nn {

// Dense row-major array of doubles. Vectors have rank 1, matrices rank 2.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);
  Tensor(std::vector<int> s, std::vector<double> d);
  static Tensor Vector(std::vector<double> d);

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  int rows() const { return shape.empty() ? 0 : shape[0]; }
  int cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  bool AllFinite() const;
  bool operator==(const Tensor& other) const = default;
};

int64_t NumElements(const std::vector<int>& shape);

struct ParamEntry {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor moment1;
  Tensor moment2;
};

// Named parameters with paired gradient and Adam moment buffers. Iteration
// order is insertion order, which also fixes the checkpoint layout.
class ParamStore {
 public:
  ParamStore() = default;

  // Adds a zero-initialized entry. Duplicate names are rejected.
  int Add(std::string name, std::vector<int> shape);
  // Uniform(-sqrt(6/(fan_in+fan_out)), +...) for rank-2 shapes; rank-1
  // entries (biases) stay zero.
  int AddGlorot(std::string name, std::vector<int> shape, Rng& rng);
  int Add(ParamEntry entry);

  bool Contains(std::string_view name) const;
  int IndexOf(std::string_view name) const;

  ParamEntry& at(int index) { return entries_.at(index); }
  const ParamEntry& at(int index) const { return entries_.at(index); }
  ParamEntry& at(std::string_view name) { return entries_[IndexOf(name)]; }
  const ParamEntry& at(std::string_view name) const {
    return entries_[IndexOf(name)];
  }

  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<ParamEntry>& entries() const { return entries_; }
  int64_t NumParameters() const;

  int64_t step_count() const { return step_count_; }
  void set_step_count(int64_t n) { step_count_ = n; }

  void ZeroGrad();
  // Copies parameter values (not grads or moments) from a store with the
  // same layout. Used for target-network syncs.
  void CopyValuesFrom(const ParamStore& other);
  bool ValuesEqual(const ParamStore& other) const;

  bool operator==(const ParamStore& other) const;

 private:
  std::vector<ParamEntry> entries_;
  std::unordered_map<std::string, int> index_;
  int64_t step_count_ = 0;
};

}  // namespace oppa::nn

#endif  // OPPA_NN_PARAM_STORE_H_
