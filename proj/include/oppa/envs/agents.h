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

#ifndef OPPA_ENVS_AGENTS_H_
#define OPPA_ENVS_AGENTS_H_

#include <memory>
#include <string>

#include "oppa/envs/negotiation.h"

namespace oppa::envs {

// A negotiation participant choosing catalog indices.
class NegotiationAgent {
 public:
  virtual ~NegotiationAgent() = default;
  virtual std::string name() const = 0;
  virtual void BeginEpisode(uint64_t seed) { (void)seed; }
  // Must return a legal act for `agent`.
  virtual int Act(const NegotiationGame& game, int agent) = 0;
};

// Opens with a greedy claim and concedes one point of own value per own
// proposal down to a floor. Accepts any standing offer worth at least the
// current threshold, and near the deadline anything worth at least the floor.
class ConcedingAgent : public NegotiationAgent {
 public:
  explicit ConcedingAgent(int floor = 5, int step = 1) : floor_(floor), step_(step) {}
  std::string name() const override { return "conceding"; }
  int Act(const NegotiationGame& game, int agent) override;

 private:
  int floor_;
  int step_;
};

// Agrees whenever it can, otherwise claims everything.
class AgreeableAgent : public NegotiationAgent {
 public:
  std::string name() const override { return "agreeable"; }
  int Act(const NegotiationGame& game, int agent) override;
};

// Uniform over legal acts, except it never ends the game.
class RandomAgent : public NegotiationAgent {
 public:
  explicit RandomAgent(uint64_t seed = 0) : rng_(seed) {}
  std::string name() const override { return "random"; }
  void BeginEpisode(uint64_t seed) override { rng_.seed(seed); }
  int Act(const NegotiationGame& game, int agent) override;

 private:
  Rng rng_;
};

// "conceding", "agreeable" or "random"; kInvalidArgument otherwise.
std::unique_ptr<NegotiationAgent> MakeScriptedAgent(const std::string& name);

}  // namespace oppa::envs

#endif  // OPPA_ENVS_AGENTS_H_
