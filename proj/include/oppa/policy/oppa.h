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

#ifndef OPPA_POLICY_OPPA_H_
#define OPPA_POLICY_OPPA_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "oppa/envs/environment.h"
#include "oppa/nn/optim.h"
#include "oppa/policy/config.h"
#include "oppa/policy/networks.h"
#include "oppa/policy/replay.h"

namespace oppa::policy {

// ---------------------------------------------------------------------------
// Building blocks.

struct Candidate {
  int action = -1;
  std::vector<double> dist;
};

// dist = softmax(q / tau) restricted to `mask`. With `rng` the action is
// drawn from dist, otherwise it is argmax(dist) (ties to the lowest index).
// kInvalidArgument for tau <= 0.
Candidate SampleCandidate(const std::vector<double>& q_values, double tau, Rng* rng,
                          const std::vector<bool>* mask = nullptr);
// Same on Q([s ; E onehot(placeholder)], .).
Candidate SampleCandidate(const std::vector<double>& state, const QFunction& q,
                          int placeholder, double tau, Rng* rng,
                          const std::vector<bool>* mask = nullptr);

struct OppositeEstimate {
  int action = -1;
  std::vector<double> dist;
};

OppositeEstimate EstimateOpposite(const std::vector<double>& state, int candidate,
                                  const OppositeEstimator& estimator);

// [s ; column `opposite` of E].
std::vector<double> AugmentState(const std::vector<double>& state, int opposite,
                                 const QFunction& q);

// Draws u ~ U[0,1); u < epsilon picks uniformly among legal actions,
// otherwise argmax over legal actions with ties to the lowest index.
int SelectAction(const std::vector<double>& q_values, double epsilon, Rng& rng,
                 const std::vector<bool>* mask = nullptr);

// done ? r : r + gamma_q * max_next_q.
double BellmanTarget(double reward, bool done, double max_next_q, double gamma_q);
// Uses the target copy of `q` on [s' ; E' w'], maximizing over legal actions.
double BellmanTarget(double reward, const std::vector<double>& next_state,
                     const std::vector<double>& next_opposite, bool done,
                     const QFunction& q, double gamma_q,
                     const std::vector<bool>* next_legal = nullptr);

// mean_i (y_i - q_i)^2; kInvalidArgument on an empty or ragged batch.
double DqnLoss(const std::vector<double>& predicted, const std::vector<double>& targets);
// Same loss on the tape for replayed transitions; targets are constants from
// the target copy.
Var DqnLoss(Tape& tape, QFunction& q, std::span<const Transition* const> batch,
            double gamma_q);

// beta * -log(dist[executed]).
double RegLoss(const std::vector<double>& dist, int executed, double beta);
Var RegLoss(Tape& tape, Var dist, int executed, double beta);

double DecayBeta(double beta, double gamma_beta);
double TotalLoss(double l1, double l2, double w1, double w2);

std::vector<double> OneHotWeights(int index, int size);

// ---------------------------------------------------------------------------
// Agent.

struct Decision {
  int action = -1;
  int candidate = -1;          // placeholder-path candidate; -1 without OBE
  int opposite_estimate = -1;  // estimated reply; -1 without OBE
  std::vector<double> opposite_weights;
};

class OppaAgent {
 public:
  OppaAgent(const TrainingConfig& config, int state_dim, int num_actions, int num_opposite,
            int placeholder);

  // Augments the state and chooses an action. With `rng` the candidate is
  // sampled and exploration applies; without it everything is greedy.
  Decision Decide(const std::vector<double>& state, const std::vector<bool>& legal,
                  double epsilon, Rng* rng) const;
  int Act(const std::vector<double>& state, const std::vector<bool>& legal) const {
    return Decide(state, legal, 0.0, nullptr).action;
  }

  QFunction& q() { return q_; }
  const QFunction& q() const { return q_; }
  OppositeEstimator& estimator() { return estimator_; }
  const OppositeEstimator& estimator() const { return estimator_; }
  const TrainingConfig& config() const { return config_; }
  int placeholder() const { return placeholder_; }
  double beta() const { return beta_; }
  void set_beta(double b) { beta_ = b; }

  // Directory with q/, q_target/, estimator/ checkpoints and agent.json.
  void Save(const std::string& dir) const;
  static OppaAgent Load(const std::string& dir);

 private:
  TrainingConfig config_;
  int placeholder_;
  double beta_;
  QFunction q_;
  OppositeEstimator estimator_;
};

// Seeds for the independent random streams of one run.
enum class Stream : uint64_t {
  kQInit = 1,
  kEstimatorInit = 2,
  kTraining = 3,
  kPolicyInit = 4,
};
uint64_t StreamSeed(uint64_t seed, Stream stream);

// ---------------------------------------------------------------------------
// Training.

struct PretrainExample {
  std::vector<double> state;
  std::vector<bool> legal;
  int target_action = -1;
  int next_opposite = -1;  // -1 when the dialogue ended
};

struct PretrainReport {
  int examples = 0;
  double estimator_loss = 0.0;
  double estimator_accuracy = 0.0;
  double q_loss = 0.0;
  double q_accuracy = 0.0;
};

// Scripted-expert rollouts; with probability `noise` a uniformly random legal
// action replaces the expert's, for state coverage.
std::vector<PretrainExample> CollectExpertCorpus(envs::DialogueEnv& env, int episodes,
                                                 uint64_t seed, double noise = 0.0);

// Accuracy of argmax pi_o on examples with a recorded reply.
double EstimatorAccuracy(const OppositeEstimator& est,
                         const std::vector<PretrainExample>& corpus);

struct EpisodeStats {
  int episode = 0;
  double reward = 0.0;
  int turns = 0;
  bool success = false;
  double epsilon = 0.0;
  double beta = 0.0;
  double q_loss = 0.0;
  double reg_loss = 0.0;
  double estimator_loss = 0.0;
  int updates = 0;
  std::vector<int> actions;
  envs::SessionRecord record;
};

// Runs the online loop against one environment.
class OppaTrainer {
 public:
  OppaTrainer(const TrainingConfig& config, envs::DialogueEnv& env);

  // Supervised warm start of pi_o and imitation of Q.
  PretrainReport Pretrain(const std::vector<PretrainExample>& corpus);

  // One episode with the current epsilon followed by the updates.
  EpisodeStats TrainIteration();

  // Greedy rollout without learning or random draws.
  envs::SessionRecord Evaluate(uint64_t episode_seed);

  OppaAgent& agent() { return agent_; }
  const OppaAgent& agent() const { return agent_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  int episode() const { return episode_; }
  int iterations() const { return iterations_; }

 private:
  struct UpdateLosses {
    double q = 0.0;
    double reg = 0.0;
  };
  UpdateLosses UpdateQ();
  double UpdateEstimator();
  void StepAdam(ParamStore& store, double lr);

  TrainingConfig config_;
  envs::DialogueEnv& env_;
  OppaAgent agent_;
  ReplayBuffer buffer_;
  Rng rng_;
  int episode_ = 0;
  int iterations_ = 0;
};

bool EpisodeSucceeded(const envs::SessionRecord& record);

}  // namespace oppa::policy

#endif  // OPPA_POLICY_OPPA_H_
