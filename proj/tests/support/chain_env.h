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


#ifndef OPPA_TESTS_SUPPORT_CHAIN_ENV_H_
#define OPPA_TESTS_SUPPORT_CHAIN_ENV_H_

#include <algorithm>
#include <vector>

#include "oppa/envs/environment.h"
#include "oppa/policy/config.h"
#include "oppa/policy/oppa.h"

namespace oppa::testing {

using dialogue::ActKind;
using dialogue::Actor;
using dialogue::DialogueAct;
using envs::DialogueEnv;
using envs::StepResult;
using policy::OppaAgent;
using policy::TrainingConfig;

inline std::vector<double> OneHot(int i, int n) {
  std::vector<double> v(n, 0.0);
  v[i] = 1.0;
  return v;
}

// Five-state deterministic chain. Left at state 0 ends with 0.1, right at
// state 4 ends with 1.0, every other move earns nothing.

constexpr int kChainStates = 5;
constexpr double kChainLeftReward = 0.1;
constexpr double kChainRightReward = 1.0;
constexpr int kChainMaxSteps = 10;

class ChainEnv : public DialogueEnv {
 public:
  ChainEnv()
      : target_("chain:target",
                {DialogueAct::Slot(ActKind::kRequest, "chain.left"),
                 DialogueAct::Slot(ActKind::kRequest, "chain.right")},
                -1),
        opposite_("chain:opposite",
                  {DialogueAct::Control(ActKind::kHello, Actor::kOpposite),
                   DialogueAct::Control(ActKind::kThanks, Actor::kOpposite)},
                  0) {}

  dialogue::EnvKind kind() const override { return dialogue::EnvKind::kCooperative; }
  const envs::ActionCatalog& target_catalog() const override { return target_; }
  const envs::ActionCatalog& opposite_catalog() const override { return opposite_; }
  int state_dim() const override { return kChainStates; }

  int Reset(uint64_t episode_seed) override {
    Rng rng(episode_seed);
    pos_ = UniformInt(rng, kChainStates);
    steps_ = 0;
    done_ = false;
    record_ = envs::SessionRecord{};
    return -1;
  }
  std::vector<double> Observe() const override { return OneHot(pos_, kChainStates); }
  std::vector<bool> LegalMask() const override { return {true, true}; }
  StepResult Step(int action) override {
    if (done_) Fail(ErrorCode::kFailedPrecondition, "chain episode over");
    StepResult r;
    ++steps_;
    if (action == 0 && pos_ == 0) {
      r.reward = kChainLeftReward;
      done_ = true;
    } else if (action == 1 && pos_ == kChainStates - 1) {
      r.reward = kChainRightReward;
      done_ = true;
    } else {
      pos_ += action == 0 ? -1 : 1;
      done_ = steps_ >= kChainMaxSteps;
    }
    r.done = done_;
    if (!done_) r.opposite_act = 1;
    record_.turns = steps_;
    record_.total_reward += r.reward;
    return r;
  }
  bool done() const override { return done_; }
  const envs::SessionRecord& record() const override { return record_; }
  int ExpertAction() const override { return pos_ == 0 ? 0 : 1; }

 private:
  envs::ActionCatalog target_;
  envs::ActionCatalog opposite_;
  int pos_ = 0;
  int steps_ = 0;
  bool done_ = true;
  envs::SessionRecord record_;
};

// Greedy policy of the chain by value iteration on the known model.
inline std::vector<int> ChainOptimalPolicy(double gamma) {
  std::vector<double> v(kChainStates, 0.0);
  auto q = [&](int s, int a) {
    if (a == 0) return s == 0 ? kChainLeftReward : gamma * v[s - 1];
    return s == kChainStates - 1 ? kChainRightReward : gamma * v[s + 1];
  };
  for (int it = 0; it < 200; ++it) {
    std::vector<double> next(kChainStates);
    for (int s = 0; s < kChainStates; ++s) next[s] = std::max(q(s, 0), q(s, 1));
    v = next;
  }
  std::vector<int> pi(kChainStates);
  for (int s = 0; s < kChainStates; ++s) pi[s] = q(s, 1) > q(s, 0) ? 1 : 0;
  return pi;
}

inline TrainingConfig ChainConfig(uint64_t seed) {
  TrainingConfig c;
  c.seed = seed;
  c.gamma_q = 0.5;
  c.hidden = 16;
  c.estimator_hidden = 8;
  c.emb_dim = 2;
  c.batch_size = 16;
  c.learning_rate = 5e-3;
  c.updates_per_episode = 2;
  c.epsilon_start = 1.0;
  c.epsilon_end = 0.05;
  c.epsilon_decay_fraction = 0.5;
  c.max_episodes = 2000;
  c.use_obe = false;
  c.use_action_reg = false;
  return c;
}

inline std::vector<int> GreedyChainPolicy(const OppaAgent& agent) {
  std::vector<int> pi;
  for (int s = 0; s < kChainStates; ++s) pi.push_back(agent.Act(OneHot(s, kChainStates), {}));
  return pi;
}

}  // namespace oppa::testing

#endif  // OPPA_TESTS_SUPPORT_CHAIN_ENV_H_
