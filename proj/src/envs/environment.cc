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

#include "oppa/envs/environment.h"

namespace oppa::envs {

using dialogue::Actor;
using dialogue::EnvKind;

CooperativeEnv::CooperativeEnv(dialogue::CoopConfig config, int state_dim)
    : config_(std::move(config)),
      system_catalog_(dialogue::EnumerateSystemActions(config_)),
      user_catalog_(dialogue::EnumerateUserActions(config_)),
      encoder_(config_, state_dim) {}

int CooperativeEnv::Reset(uint64_t episode_seed) {
  return Begin(AgendaSimulator::New(episode_seed, config_));
}

int CooperativeEnv::ResetWithGoal(const Goal& goal) {
  return Begin(AgendaSimulator(goal, config_.patience));
}

int CooperativeEnv::Begin(AgendaSimulator simulator) {
  simulator_.emplace(std::move(simulator));
  state_ = CoopState{};
  state_.max_turns = config_.patience;
  record_ = SessionRecord{};
  record_.env = EnvKind::kCooperative;
  record_.goal = simulator_->goal();
  const DialogueAct opening = simulator_->Start();
  TrackUserAct(state_, opening);
  record_.acts.push_back(opening);
  done_ = false;
  return user_catalog_.IndexOf(opening);
}

std::vector<double> CooperativeEnv::Observe() const { return encoder_.Encode(state_); }

std::vector<bool> CooperativeEnv::LegalMask() const {
  return std::vector<bool>(system_catalog_.size(), true);
}

StepResult CooperativeEnv::Step(int action) {
  if (done_) Fail(ErrorCode::kFailedPrecondition, "episode is not running");
  if (action < 0 || action >= system_catalog_.size()) {
    Fail(ErrorCode::kIllegalAct, "action ", action, " outside catalog of size ",
         system_catalog_.size());
  }
  DialogueAct act = system_catalog_.At(action);
  act.actor = Actor::kTarget;
  TrackSystemAct(state_, act);
  record_.acts.push_back(act);
  const UserTurn reply = simulator_->Step(act);
  TrackUserAct(state_, reply.act);
  record_.acts.push_back(reply.act);
  ++record_.turns;

  StepResult out;
  out.reward = -1.0 + (reply.success ? success_reward() : 0.0);
  out.done = reply.done;
  out.opposite_act = user_catalog_.IndexOf(reply.act);
  record_.total_reward += out.reward;
  if (reply.done) {
    done_ = true;
    record_.simulator_success = reply.success;
    record_.outcome = reply.success ? "success" : "failure";
  }
  return out;
}

int CooperativeEnv::ExpertAction() const {
  return ScriptedSystemAction(state_, config_, system_catalog_);
}

NegotiationEnv::NegotiationEnv(NegotiationConfig config, int state_dim,
                               std::shared_ptr<NegotiationAgent> opponent,
                               std::shared_ptr<NegotiationAgent> expert)
    : config_(config),
      catalog_(std::make_shared<const ActionCatalog>(
          dialogue::EnumerateNegotiationActions(config.caps, config.max_actions))),
      encoder_(*catalog_, config.caps, state_dim),
      opponent_(std::move(opponent)),
      expert_(expert ? std::move(expert) : std::make_shared<ConcedingAgent>()) {
  if (!opponent_) Fail(ErrorCode::kInvalidArgument, "negotiation env needs an opponent");
}

void FillNegotiationOutcome(const NegotiationGame& game, int target_agent,
                            SessionRecord& record) {
  record.env = EnvKind::kNegotiation;
  record.scenario = game.scenario();
  record.target_agent = target_agent;
  record.first_mover = game.first_mover();
  record.acts.clear();
  for (const Move& m : game.moves()) {
    DialogueAct act = game.catalog().At(m.act);
    act.actor = m.agent == target_agent ? Actor::kTarget : Actor::kOpposite;
    record.acts.push_back(act);
  }
  record.turns = 0;
  for (const Move& m : game.moves()) record.turns += m.agent == target_agent ? 1 : 0;
  if (!game.finished()) return;
  record.outcome = GameStatusName(game.status());
  record.allocation_target = game.allocation(target_agent);
  record.allocation_opposite = game.allocation(1 - target_agent);
  record.score_target = NegoScore(game, target_agent);
  record.score_opposite = NegoScore(game, 1 - target_agent);
  record.total_reward = record.score_target;
}

void NegotiationEnv::OpponentMove() {
  const int act = opponent_->Act(*game_, 1);
  game_->StepIndex(1, act);
}

int NegotiationEnv::Reset(uint64_t episode_seed) {
  game_.emplace(NegotiationGame::New(episode_seed, config_, catalog_));
  opponent_->BeginEpisode(EpisodeSeed(episode_seed, 1));
  expert_->BeginEpisode(EpisodeSeed(episode_seed, 2));
  record_ = SessionRecord{};
  int opening = -1;
  if (game_->first_mover() == 1) {
    OpponentMove();
    opening = game_->moves().back().act;
  }
  FillNegotiationOutcome(*game_, 0, record_);
  return opening;
}

std::vector<double> NegotiationEnv::Observe() const {
  return encoder_.Encode(game_->ViewFor(0));
}

std::vector<bool> NegotiationEnv::LegalMask() const {
  if (done()) return std::vector<bool>(catalog_->size(), false);
  return game_->LegalMask(0);
}

StepResult NegotiationEnv::Step(int action) {
  if (done()) Fail(ErrorCode::kFailedPrecondition, "episode is not running");
  if (action < 0 || action >= catalog_->size()) {
    Fail(ErrorCode::kIllegalAct, "action ", action, " outside catalog of size ",
         catalog_->size());
  }
  StepResult out;
  if (!game_->StepIndex(0, action)) {
    OpponentMove();
    out.opposite_act = game_->moves().back().act;
  }
  out.done = game_->finished();
  FillNegotiationOutcome(*game_, 0, record_);
  if (out.done) out.reward = record_.score_target;
  return out;
}

int NegotiationEnv::ExpertAction() const { return expert_->Act(*game_, 0); }

SessionRecord PlayNegotiation(NegotiationGame& game, NegotiationAgent& agent0,
                              NegotiationAgent& agent1) {
  while (!game.finished()) {
    const int mover = game.current_mover();
    NegotiationAgent& agent = mover == 0 ? agent0 : agent1;
    game.StepIndex(mover, agent.Act(game, mover));
  }
  SessionRecord record;
  FillNegotiationOutcome(game, 0, record);
  return record;
}

}  // namespace oppa::envs
