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

#ifndef OPPA_ENVS_NEGOTIATION_H_
#define OPPA_ENVS_NEGOTIATION_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oppa/dialogue/act.h"
#include "oppa/dialogue/state.h"

namespace oppa::envs {

using dialogue::ActionCatalog;
using dialogue::DialogueAct;
using dialogue::ItemCounts;
using dialogue::Scenario;

struct NegotiationConfig {
  ItemCounts caps = {4, 4, 4};
  int max_turns = 20;
  int max_actions = 4096;
  int first_mover = 1;  // agent index, or -1 to draw it per game
};

nlohmann::json NegotiationConfigToJson(const NegotiationConfig& c);
NegotiationConfig NegotiationConfigFromJson(const nlohmann::json& j);

// Every scenario with 1 <= count_i <= cap_i and both agents' values summing
// to 10, in a fixed order. Empty if none exist.
const std::vector<Scenario>& FeasibleScenarios(const ItemCounts& caps);

// Uniform draw from FeasibleScenarios(caps); kInvalidArgument if empty.
Scenario SampleScenario(Rng& rng, const ItemCounts& caps);

enum class GameStatus { kRunning, kAgreed, kNoDeal, kTimeout };
const char* GameStatusName(GameStatus s);

struct Move {
  int agent = 0;
  int act = -1;  // catalog index
};

// Two-agent alternating-offers game. Agent 0 holds values_a, agent 1
// values_b. A propose claims counts for the proposer; agreeing to the other
// agent's standing proposal gives the proposer its claim and the agreeing
// agent the remainder.
class NegotiationGame {
 public:
  NegotiationGame(Scenario scenario, std::shared_ptr<const ActionCatalog> catalog,
                  int max_turns, int first_mover);

  // Samples a scenario (and the first mover when configured as -1).
  static NegotiationGame New(uint64_t seed, const NegotiationConfig& config,
                             std::shared_ptr<const ActionCatalog> catalog);

  // Applies `act` for `agent`. Throws kIllegalAct (state untouched) when the
  // game is over, it is not the agent's turn, or the act is illegal now.
  // Returns true once the game has finished.
  bool Step(int agent, const DialogueAct& act);
  bool StepIndex(int agent, int act_index);

  // Empty string when legal, otherwise the reason.
  std::string IllegalReason(int agent, const DialogueAct& act) const;
  std::vector<bool> LegalMask(int agent) const;
  std::vector<int> LegalActions(int agent) const;

  // The game from `agent`'s point of view (last k moves, own values only).
  dialogue::NegoState ViewFor(int agent) const;

  const Scenario& scenario() const { return scenario_; }
  const ActionCatalog& catalog() const { return *catalog_; }
  std::shared_ptr<const ActionCatalog> catalog_ptr() const { return catalog_; }
  GameStatus status() const { return status_; }
  bool finished() const { return status_ != GameStatus::kRunning; }
  int current_mover() const { return mover_; }
  int first_mover() const { return first_mover_; }
  int turn() const { return static_cast<int>(moves_.size()); }
  int max_turns() const { return max_turns_; }
  const std::vector<Move>& moves() const { return moves_; }
  const std::optional<ItemCounts>& standing_claim() const { return standing_claim_; }
  int standing_proposer() const { return standing_proposer_; }
  // Final allocation; all zeros unless agreed.
  ItemCounts allocation(int agent) const { return allocation_[agent]; }

 private:
  Scenario scenario_;
  std::shared_ptr<const ActionCatalog> catalog_;
  int max_turns_;
  int first_mover_;
  int mover_;
  GameStatus status_ = GameStatus::kRunning;
  std::vector<Move> moves_;
  std::optional<ItemCounts> standing_claim_;
  int standing_proposer_ = -1;
  std::array<ItemCounts, 2> allocation_{};
};

// Value of the agent's final allocation; 0 for no-deal and timeout.
// kFailedPrecondition while the game is running.
int NegoScore(const NegotiationGame& game, int agent);

// True iff no division of the item pool gives both agents at least their
// scores with one strictly better. Brute force over all divisions.
bool ParetoOptimal(const Scenario& scenario, int score_a, int score_b);

}  // namespace oppa::envs

#endif  // OPPA_ENVS_NEGOTIATION_H_
