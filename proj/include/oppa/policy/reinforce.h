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


#ifndef OPPA_POLICY_REINFORCE_H_
#define OPPA_POLICY_REINFORCE_H_

#include <span>
#include <string>
#include <vector>

#include "oppa/envs/environment.h"
#include "oppa/policy/config.h"
#include "oppa/policy/oppa.h"

namespace oppa::policy {

// Two dense layers with a masked softmax head.
class PolicyNetwork {
 public:
  PolicyNetwork() = default;
  PolicyNetwork(int state_dim, int num_actions, int hidden, Rng& rng);

  Var Forward(Tape& tape, ParamStore& store, const std::vector<double>& state,
              const std::vector<bool>* mask = nullptr) const;
  std::vector<double> Distribution(const std::vector<double>& state,
                                   const std::vector<bool>& legal) const;

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  int state_dim() const { return state_dim_; }
  int num_actions() const { return num_actions_; }

 private:
  int state_dim_ = 0;
  int num_actions_ = 0;
  ParamStore params_;
  nn::DenseLayer l1_;
  nn::DenseLayer l2_;
};

struct PgStep {
  std::vector<double> state;
  std::vector<bool> legal;
  int action = 0;
  double reward = 0.0;
};
using PgEpisode = std::vector<PgStep>;

// G_t = r_t + gamma * G_{t+1}.
std::vector<double> DiscountedReturns(const PgEpisode& episode, double gamma);

// -(1/N) sum_t (G_t - b) log pi(a_t | s_t) over every step of the batch,
// with b the mean return of the batch. kInvalidArgument for an empty batch
// or an empty episode.
Var ReinforceLoss(Tape& tape, const PolicyNetwork& policy, ParamStore& store,
                  std::span<const PgEpisode> episodes, double gamma);

// One SGD step on ReinforceLoss. Returns the loss before the step.
double ReinforceUpdate(PolicyNetwork& policy, std::span<const PgEpisode> episodes,
                       double gamma, double learning_rate, double grad_clip = 0.0);

class ReinforceAgent {
 public:
  ReinforceAgent(const TrainingConfig& config, int state_dim, int num_actions);

  // Greedy: argmax pi, ties to the lowest index.
  int Act(const std::vector<double>& state, const std::vector<bool>& legal) const;
  int Sample(const std::vector<double>& state, const std::vector<bool>& legal,
             Rng& rng) const;

  PolicyNetwork& policy() { return policy_; }
  const PolicyNetwork& policy() const { return policy_; }
  const TrainingConfig& config() const { return config_; }

  void Save(const std::string& dir) const;
  static ReinforceAgent Load(const std::string& dir);

 private:
  TrainingConfig config_;
  PolicyNetwork policy_;
};

class ReinforceTrainer {
 public:
  ReinforceTrainer(const TrainingConfig& config, envs::DialogueEnv& env);

  // Cross-entropy imitation of the corpus actions.
  PretrainReport Pretrain(const std::vector<PretrainExample>& corpus);
  // Samples one episode; every reinforce_batch episodes takes a step.
  EpisodeStats TrainIteration();
  envs::SessionRecord Evaluate(uint64_t episode_seed);

  ReinforceAgent& agent() { return agent_; }
  const ReinforceAgent& agent() const { return agent_; }
  int episode() const { return episode_; }

 private:
  TrainingConfig config_;
  envs::DialogueEnv& env_;
  ReinforceAgent agent_;
  Rng rng_;
  std::vector<PgEpisode> pending_;
  int episode_ = 0;
};

}  // namespace oppa::policy

#endif  // OPPA_POLICY_REINFORCE_H_
