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

#include "oppa/envs/agents.h"

namespace oppa::envs {

using dialogue::ActKind;
using dialogue::kNumItemTypes;
using dialogue::TotalValue;

namespace {

int Find(const NegotiationGame& game, const DialogueAct& act) {
  return game.catalog().IndexOf(act);
}

// Standing offer's value to `agent`, or -1 when there is nothing to accept.
int OfferValue(const NegotiationGame& game, int agent) {
  if (!game.standing_claim().has_value() || game.standing_proposer() == agent) return -1;
  ItemCounts receive{};
  for (int i = 0; i < kNumItemTypes; ++i) {
    receive[i] = game.scenario().counts[i] - (*game.standing_claim())[i];
  }
  return TotalValue(receive, game.scenario().values(agent));
}

int OwnProposals(const NegotiationGame& game, int agent) {
  int n = 0;
  for (const Move& m : game.moves()) {
    if (m.agent == agent && game.catalog().At(m.act).kind == ActKind::kPropose) ++n;
  }
  return n;
}

// Cheapest claim worth at least `threshold`: lowest own value, then fewest
// items, then catalog order.
int ClaimAtLeast(const NegotiationGame& game, int agent, int threshold) {
  const auto& values = game.scenario().values(agent);
  int best = -1;
  int best_value = 0;
  int best_items = 0;
  for (int i = 0; i < game.catalog().size(); ++i) {
    const DialogueAct& act = game.catalog().At(i);
    if (act.kind != ActKind::kPropose) continue;
    if (!game.IllegalReason(agent, act).empty()) continue;
    const int v = TotalValue(act.counts, values);
    if (v < threshold) continue;
    const int items = act.counts[0] + act.counts[1] + act.counts[2];
    if (best < 0 || v < best_value || (v == best_value && items < best_items)) {
      best = i;
      best_value = v;
      best_items = items;
    }
  }
  return best;
}

}  // namespace

int ConcedingAgent::Act(const NegotiationGame& game, int agent) {
  const int threshold = std::max(floor_, 10 - step_ * OwnProposals(game, agent));
  const int offer = OfferValue(game, agent);
  const bool deadline = game.turn() >= game.max_turns() - 2;
  if (offer >= threshold || (deadline && offer >= floor_)) {
    return Find(game, DialogueAct::Control(ActKind::kAgree));
  }
  const int claim = ClaimAtLeast(game, agent, threshold);
  if (claim >= 0) return claim;
  return ClaimAtLeast(game, agent, 0);
}

int AgreeableAgent::Act(const NegotiationGame& game, int agent) {
  if (OfferValue(game, agent) >= 0) return Find(game, DialogueAct::Control(ActKind::kAgree));
  return Find(game, DialogueAct::Propose(game.scenario().counts));
}

int RandomAgent::Act(const NegotiationGame& game, int agent) {
  std::vector<int> legal;
  for (int i : game.LegalActions(agent)) {
    if (game.catalog().At(i).kind != ActKind::kEnd) legal.push_back(i);
  }
  return legal[UniformInt(rng_, static_cast<int>(legal.size()))];
}

std::unique_ptr<NegotiationAgent> MakeScriptedAgent(const std::string& name) {
  if (name == "conceding") return std::make_unique<ConcedingAgent>();
  if (name == "agreeable") return std::make_unique<AgreeableAgent>();
  if (name == "random") return std::make_unique<RandomAgent>();
  Fail(ErrorCode::kInvalidArgument, "unknown scripted agent '", name, "'");
}

}  // namespace oppa::envs
