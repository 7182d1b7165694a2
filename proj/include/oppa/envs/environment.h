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

#ifndef OPPA_ENVS_ENVIRONMENT_H_
#define OPPA_ENVS_ENVIRONMENT_H_

#include <memory>
#include <optional>
#include <vector>

#include "oppa/envs/agents.h"
#include "oppa/envs/cooperative.h"
#include "oppa/envs/negotiation.h"
#include "oppa/envs/session.h"

namespace oppa::envs {

struct StepResult {
  double reward = 0.0;
  bool done = false;
  // Opposite agent's reply as an index into opposite_catalog(); -1 when the
  // dialogue ended before it could reply.
  int opposite_act = -1;
};

// Episodic dialogue from the target agent's side. The opposite agent is
// part of the environment.
class DialogueEnv {
 public:
  virtual ~DialogueEnv() = default;
  virtual dialogue::EnvKind kind() const = 0;
  virtual const ActionCatalog& target_catalog() const = 0;
  virtual const ActionCatalog& opposite_catalog() const = 0;
  virtual int state_dim() const = 0;

  // Starts an episode. Returns the opposite agent's opening act index, or -1
  // when the target speaks first.
  virtual int Reset(uint64_t episode_seed) = 0;
  virtual std::vector<double> Observe() const = 0;
  virtual std::vector<bool> LegalMask() const = 0;
  // kIllegalAct for illegal or out-of-range actions; kFailedPrecondition
  // when no episode is running.
  virtual StepResult Step(int action) = 0;
  virtual bool done() const = 0;
  virtual const SessionRecord& record() const = 0;
  // Scripted expert's choice in the current state.
  virtual int ExpertAction() const = 0;
};

class CooperativeEnv : public DialogueEnv {
 public:
  CooperativeEnv(dialogue::CoopConfig config, int state_dim);

  dialogue::EnvKind kind() const override { return dialogue::EnvKind::kCooperative; }
  const ActionCatalog& target_catalog() const override { return system_catalog_; }
  const ActionCatalog& opposite_catalog() const override { return user_catalog_; }
  int state_dim() const override { return encoder_.state_dim(); }
  int Reset(uint64_t episode_seed) override;
  std::vector<double> Observe() const override;
  std::vector<bool> LegalMask() const override;
  StepResult Step(int action) override;
  bool done() const override { return done_; }
  const SessionRecord& record() const override { return record_; }
  int ExpertAction() const override;

  // Starts an episode with a fixed user goal.
  int ResetWithGoal(const Goal& goal);

  const dialogue::CoopConfig& config() const { return config_; }
  const CoopState& state() const { return state_; }
  const AgendaSimulator& simulator() const { return *simulator_; }
  double success_reward() const { return 2.0 * config_.patience; }

 private:
  int Begin(AgendaSimulator simulator);

  dialogue::CoopConfig config_;
  ActionCatalog system_catalog_;
  ActionCatalog user_catalog_;
  dialogue::CoopStateEncoder encoder_;
  std::optional<AgendaSimulator> simulator_;
  CoopState state_;
  SessionRecord record_;
  bool done_ = true;
};

// The target is agent 0; the first mover is drawn per episode. Reward is the
// target's score at the end of the game.
class NegotiationEnv : public DialogueEnv {
 public:
  NegotiationEnv(NegotiationConfig config, int state_dim,
                 std::shared_ptr<NegotiationAgent> opponent,
                 std::shared_ptr<NegotiationAgent> expert = nullptr);

  dialogue::EnvKind kind() const override { return dialogue::EnvKind::kNegotiation; }
  const ActionCatalog& target_catalog() const override { return *catalog_; }
  const ActionCatalog& opposite_catalog() const override { return *catalog_; }
  int state_dim() const override { return encoder_.state_dim(); }
  int Reset(uint64_t episode_seed) override;
  std::vector<double> Observe() const override;
  std::vector<bool> LegalMask() const override;
  StepResult Step(int action) override;
  bool done() const override { return !game_.has_value() || game_->finished(); }
  const SessionRecord& record() const override { return record_; }
  int ExpertAction() const override;

  const NegotiationConfig& config() const { return config_; }
  const NegotiationGame& game() const { return *game_; }
  std::shared_ptr<const ActionCatalog> catalog_ptr() const { return catalog_; }

 private:
  void OpponentMove();

  NegotiationConfig config_;
  std::shared_ptr<const ActionCatalog> catalog_;
  dialogue::NegoStateEncoder encoder_;
  std::shared_ptr<NegotiationAgent> opponent_;
  std::shared_ptr<NegotiationAgent> expert_;
  std::optional<NegotiationGame> game_;
  SessionRecord record_;
};

// Plays a full negotiation between two agents and fills a record from agent
// 0's side.
SessionRecord PlayNegotiation(NegotiationGame& game, NegotiationAgent& agent0,
                              NegotiationAgent& agent1);

// Fills the negotiation outcome fields of `record` from a finished game.
void FillNegotiationOutcome(const NegotiationGame& game, int target_agent,
                            SessionRecord& record);

}  // namespace oppa::envs

#endif  // OPPA_ENVS_ENVIRONMENT_H_
