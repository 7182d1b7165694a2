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

#include "oppa/policy/replay.h"

namespace oppa::policy {

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) Fail(ErrorCode::kInvalidArgument, "replay capacity must be >= 1");
  items_.reserve(capacity);
}

void ReplayBuffer::Push(Transition t) {
  ++total_pushed_;
  if (size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(int i) const {
  if (i < 0 || i >= size()) {
    Fail(ErrorCode::kInvalidArgument, "replay index ", i, " outside [0, ", size(), ")");
  }
  return items_[(cursor_ + i) % size()];
}

std::vector<int> ReplayBuffer::SampleIndices(int n, Rng& rng) const {
  if (items_.empty()) Fail(ErrorCode::kFailedPrecondition, "sample from an empty buffer");
  std::vector<int> out(n);
  for (int& i : out) i = UniformInt(rng, size());
  return out;
}

std::vector<const Transition*> ReplayBuffer::Sample(int n, Rng& rng) const {
  std::vector<const Transition*> out;
  for (int i : SampleIndices(n, rng)) out.push_back(&at(i));
  return out;
}

void ReplayBuffer::Clear() {
  items_.clear();
  cursor_ = 0;
}

}  // namespace oppa::policy
