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

#include "oppa/nn/param_store.h"

#include <cmath>
#include <utility>

namespace oppa::nn {

int64_t NumElements(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    if (d <= 0) {
      Fail(ErrorCode::kInvalidArgument, "non-positive dimension in shape ",
           ShapeString(shape));
    }
    n *= d;
  }
  return n;
}

Tensor::Tensor(std::vector<int> s)
    : shape(std::move(s)), data(NumElements(shape), 0.0) {}

Tensor::Tensor(std::vector<int> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
  if (NumElements(shape) != static_cast<int64_t>(data.size())) {
    Fail(ErrorCode::kDimensionMismatch, "tensor shape ", ShapeString(shape),
         " does not match data length ", data.size());
  }
}

Tensor Tensor::Vector(std::vector<double> d) {
  if (d.empty()) Fail(ErrorCode::kInvalidArgument, "empty vector tensor");
  std::vector<int> s = {static_cast<int>(d.size())};
  return Tensor(std::move(s), std::move(d));
}

bool Tensor::AllFinite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

int ParamStore::Add(ParamEntry entry) {
  if (index_.count(entry.name) > 0) {
    Fail(ErrorCode::kInvalidArgument, "duplicate parameter name '", entry.name,
         "'");
  }
  const int idx = static_cast<int>(entries_.size());
  index_.emplace(entry.name, idx);
  entries_.push_back(std::move(entry));
  return idx;
}

int ParamStore::Add(std::string name, std::vector<int> shape) {
  ParamEntry e;
  e.name = std::move(name);
  e.value = Tensor(shape);
  e.grad = Tensor(shape);
  e.moment1 = Tensor(shape);
  e.moment2 = Tensor(shape);
  return Add(std::move(e));
}

int ParamStore::AddGlorot(std::string name, std::vector<int> shape, Rng& rng) {
  const int idx = Add(std::move(name), shape);
  if (shape.size() == 2) {
    const double limit = std::sqrt(6.0 / (shape[0] + shape[1]));
    for (double& v : entries_[idx].value.data) {
      v = (2.0 * UniformUnit(rng) - 1.0) * limit;
    }
  }
  return idx;
}

bool ParamStore::Contains(std::string_view name) const {
  return index_.count(std::string(name)) > 0;
}

int ParamStore::IndexOf(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    Fail(ErrorCode::kNotFound, "unknown parameter '", name, "'");
  }
  return it->second;
}

int64_t ParamStore::NumParameters() const {
  int64_t n = 0;
  for (const auto& e : entries_) n += e.value.numel();
  return n;
}

void ParamStore::ZeroGrad() {
  for (auto& e : entries_) std::fill(e.grad.data.begin(), e.grad.data.end(), 0.0);
}

void ParamStore::CopyValuesFrom(const ParamStore& other) {
  if (other.size() != size()) {
    Fail(ErrorCode::kShapeMismatch, "parameter store layouts differ: ",
         other.size(), " vs ", size(), " entries");
  }
  for (int i = 0; i < size(); ++i) {
    if (entries_[i].name != other.entries_[i].name ||
        entries_[i].value.shape != other.entries_[i].value.shape) {
      Fail(ErrorCode::kShapeMismatch, "parameter '", entries_[i].name,
           "' does not match '", other.entries_[i].name, "'");
    }
    entries_[i].value.data = other.entries_[i].value.data;
  }
}

bool ParamStore::ValuesEqual(const ParamStore& other) const {
  if (other.size() != size()) return false;
  for (int i = 0; i < size(); ++i) {
    if (!(entries_[i].value == other.entries_[i].value)) return false;
  }
  return true;
}

bool ParamStore::operator==(const ParamStore& other) const {
  if (step_count_ != other.step_count_ || size() != other.size()) return false;
  for (int i = 0; i < size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name || !(a.value == b.value) || !(a.grad == b.grad) ||
        !(a.moment1 == b.moment1) || !(a.moment2 == b.moment2)) {
      return false;
    }
  }
  return true;
}

}  // namespace oppa::nn
