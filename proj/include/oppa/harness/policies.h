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


#ifndef OPPA_HARNESS_POLICIES_H_
#define OPPA_HARNESS_POLICIES_H_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "oppa/dialogue/state.h"
#include "oppa/envs/environment.h"
#include "oppa/harness/config.h"
#include "oppa/policy/oppa.h"
#include "oppa/policy/reinforce.h"

namespace oppa::harness {

std::shared_ptr<envs::NegotiationAgent> MakeOpponent(const std::string& name);
std::unique_ptr<envs::DialogueEnv> MakeEnv(const ExperimentConfig& config);

// What a checkpoint was trained on. Written next to the agent files.
struct EnvSpec {
  std::string env = "cooperative";
  int state_dim = 0;
  dialogue::CoopConfig cooperative = dialogue::CoopConfig::DeskScale();
  envs::NegotiationConfig negotiation;

  static EnvSpec Of(const ExperimentConfig& config);
  nlohmann::ordered_json ToJson() const;
  static EnvSpec FromJson(const nlohmann::json& j);
  // Everything except first_mover, which only changes who opens.
  bool SameGame(const EnvSpec& other) const;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual void BeginEpisode(uint64_t seed) { (void)seed; }
  virtual int Act(const envs::DialogueEnv& env) = 0;
};

// A trained policy acting on encoded states only.
class LearnedPolicy : public Policy {
 public:
  virtual int ActOnState(const std::vector<double>& state,
                         const std::vector<bool>& legal) const = 0;
  int Act(const envs::DialogueEnv& env) override {
    return ActOnState(env.Observe(), env.LegalMask());
  }
  virtual int state_dim() const = 0;
  virtual int num_actions() const = 0;
  virtual void Save(const std::string& dir) const = 0;
};

class OppaPolicy : public LearnedPolicy {
 public:
  explicit OppaPolicy(std::shared_ptr<const policy::OppaAgent> agent)
      : agent_(std::move(agent)) {}
  std::string name() const override { return "oppa"; }
  int ActOnState(const std::vector<double>& state,
                 const std::vector<bool>& legal) const override {
    return agent_->Act(state, legal);
  }
  int state_dim() const override { return agent_->q().state_dim(); }
  int num_actions() const override { return agent_->q().num_actions(); }
  void Save(const std::string& dir) const override { agent_->Save(dir); }
  const policy::OppaAgent& agent() const { return *agent_; }

 private:
  std::shared_ptr<const policy::OppaAgent> agent_;
};

class ReinforcePolicy : public LearnedPolicy {
 public:
  explicit ReinforcePolicy(std::shared_ptr<const policy::ReinforceAgent> agent)
      : agent_(std::move(agent)) {}
  std::string name() const override { return "reinforce"; }
  int ActOnState(const std::vector<double>& state,
                 const std::vector<bool>& legal) const override {
    return agent_->Act(state, legal);
  }
  int state_dim() const override { return agent_->policy().state_dim(); }
  int num_actions() const override { return agent_->policy().num_actions(); }
  void Save(const std::string& dir) const override { agent_->Save(dir); }

 private:
  std::shared_ptr<const policy::ReinforceAgent> agent_;
};

// The env's scripted expert.
class ExpertPolicy : public Policy {
 public:
  std::string name() const override { return "expert"; }
  int Act(const envs::DialogueEnv& env) override { return env.ExpertAction(); }
};

// Uniform over legal actions.
class RandomPolicy : public Policy {
 public:
  std::string name() const override { return "random"; }
  void BeginEpisode(uint64_t seed) override { rng_.seed(seed); }
  int Act(const envs::DialogueEnv& env) override;

 private:
  Rng rng_;
};

// Checkpoint directory: agent files plus env.json.
void SaveCheckpointDir(const LearnedPolicy& policy, const EnvSpec& spec,
                       const std::string& dir);
std::shared_ptr<LearnedPolicy> LoadPolicy(const std::string& dir);
EnvSpec LoadEnvSpec(const std::string& dir);

// kIncompatible unless the checkpoint can act in `spec`'s environment.
void CheckCompatible(const LearnedPolicy& policy, const EnvSpec& trained_on,
                     const EnvSpec& target);

// Drives a learned policy as either side of a negotiation game.
class PolicyNegotiationAgent : public envs::NegotiationAgent {
 public:
  PolicyNegotiationAgent(std::shared_ptr<const LearnedPolicy> policy,
                         const envs::NegotiationConfig& config, int state_dim);
  std::string name() const override { return policy_->name(); }
  int Act(const envs::NegotiationGame& game, int agent) override;

 private:
  std::shared_ptr<const LearnedPolicy> policy_;
  dialogue::NegoStateEncoder encoder_;
};

}  // namespace oppa::harness

#endif  // OPPA_HARNESS_POLICIES_H_
