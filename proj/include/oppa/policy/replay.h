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

#ifndef OPPA_POLICY_REPLAY_H_
#define OPPA_POLICY_REPLAY_H_

#include <vector>

#include "oppa/common.h"

namespace oppa::policy {

// One target turn. `opposite` / `next_opposite` are the weights over
// opposite acts that formed the augmented states actually used when acting.
struct Transition {
  std::vector<double> state;
  std::vector<double> opposite;
  std::vector<bool> legal;  // empty means every action is legal
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  std::vector<double> next_opposite;
  std::vector<bool> next_legal;
  bool done = false;
  int observed_opposite = -1;  // opposite act that followed, -1 if none

  bool operator==(const Transition&) const = default;
};

// Fixed-capacity FIFO ring with uniform sampling with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity = 500);

  void Push(Transition t);
  // `n` uniform indices (oldest = 0). kFailedPrecondition when empty.
  std::vector<int> SampleIndices(int n, Rng& rng) const;
  std::vector<const Transition*> Sample(int n, Rng& rng) const;

  // Logical order: 0 is the oldest stored transition.
  const Transition& at(int i) const;
  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }
  int64_t total_pushed() const { return total_pushed_; }
  void Clear();

 private:
  int capacity_;
  std::vector<Transition> items_;
  int cursor_ = 0;  // next write slot once full
  int64_t total_pushed_ = 0;
};

}  // namespace oppa::policy

#endif  // OPPA_POLICY_REPLAY_H_
