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

#include "oppa/envs/negotiation.h"

#include <map>
#include <mutex>

namespace oppa::envs {

using dialogue::ActKind;
using dialogue::Actor;
using dialogue::kNumItemTypes;
using dialogue::TotalValue;
using nlohmann::json;

json NegotiationConfigToJson(const NegotiationConfig& c) {
  return {{"caps", c.caps},
          {"max_turns", c.max_turns},
          {"max_actions", c.max_actions},
          {"first_mover", c.first_mover}};
}

NegotiationConfig NegotiationConfigFromJson(const json& j) {
  NegotiationConfig c;
  try {
    if (j.contains("caps")) c.caps = j.at("caps").get<ItemCounts>();
    c.max_turns = j.value("max_turns", c.max_turns);
    c.max_actions = j.value("max_actions", c.max_actions);
    c.first_mover = j.value("first_mover", c.first_mover);
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kInvalidArgument, "malformed negotiation config: ", ex.what());
  }
  for (int cap : c.caps) {
    if (cap < 1) Fail(ErrorCode::kInvalidArgument, "item caps must be >= 1");
  }
  if (c.max_turns < 2) Fail(ErrorCode::kInvalidArgument, "max_turns must be >= 2");
  if (c.first_mover < -1 || c.first_mover > 1) {
    Fail(ErrorCode::kInvalidArgument, "first_mover must be 0, 1 or -1");
  }
  return c;
}

namespace {

std::vector<ItemCounts> ValueVectors(const ItemCounts& counts) {
  std::vector<ItemCounts> out;
  const int total = dialogue::kScenarioTotalValue;
  for (int a = 0; a * counts[0] <= total; ++a) {
    for (int b = 0; a * counts[0] + b * counts[1] <= total; ++b) {
      const int rest = total - a * counts[0] - b * counts[1];
      if (rest % counts[2] == 0) out.push_back({a, b, rest / counts[2]});
    }
  }
  return out;
}

}  // namespace

const std::vector<Scenario>& FeasibleScenarios(const ItemCounts& caps) {
  static std::mutex mu;
  static std::map<ItemCounts, std::vector<Scenario>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(caps);
  if (it != cache.end()) return it->second;
  std::vector<Scenario> all;
  for (int b = 1; b <= caps[0]; ++b) {
    for (int h = 1; h <= caps[1]; ++h) {
      for (int l = 1; l <= caps[2]; ++l) {
        const ItemCounts counts = {b, h, l};
        const std::vector<ItemCounts> values = ValueVectors(counts);
        for (const auto& va : values) {
          for (const auto& vb : values) all.push_back({counts, va, vb});
        }
      }
    }
  }
  return cache.emplace(caps, std::move(all)).first->second;
}

Scenario SampleScenario(Rng& rng, const ItemCounts& caps) {
  const auto& all = FeasibleScenarios(caps);
  if (all.empty()) {
    Fail(ErrorCode::kInvalidArgument, "no feasible scenario under caps ",
         ShapeString({caps[0], caps[1], caps[2]}));
  }
  return all[UniformInt(rng, static_cast<int>(all.size()))];
}

const char* GameStatusName(GameStatus s) {
  switch (s) {
    case GameStatus::kRunning: return "running";
    case GameStatus::kAgreed: return "agreed";
    case GameStatus::kNoDeal: return "no_deal";
    case GameStatus::kTimeout: return "timeout";
  }
  return "unknown";
}

NegotiationGame::NegotiationGame(Scenario scenario,
                                 std::shared_ptr<const ActionCatalog> catalog,
                                 int max_turns, int first_mover)
    : scenario_(scenario),
      catalog_(std::move(catalog)),
      max_turns_(max_turns),
      first_mover_(first_mover),
      mover_(first_mover) {
  scenario_.Validate();
  if (first_mover != 0 && first_mover != 1) {
    Fail(ErrorCode::kInvalidArgument, "first mover must be 0 or 1");
  }
  if (max_turns < 1) Fail(ErrorCode::kInvalidArgument, "max_turns must be >= 1");
}

NegotiationGame NegotiationGame::New(uint64_t seed, const NegotiationConfig& config,
                                     std::shared_ptr<const ActionCatalog> catalog) {
  Rng rng(seed);
  Scenario s = SampleScenario(rng, config.caps);
  const int first = config.first_mover >= 0 ? config.first_mover : UniformInt(rng, 2);
  return NegotiationGame(s, std::move(catalog), config.max_turns, first);
}

std::string NegotiationGame::IllegalReason(int agent, const DialogueAct& act) const {
  if (finished()) return StrCat("game is over (", GameStatusName(status_), ")");
  if (agent != mover_) return StrCat("not agent ", agent, "'s turn");
  if (!dialogue::IsNegotiationKind(act.kind)) {
    return StrCat("act kind '", dialogue::ActKindName(act.kind),
                  "' is not part of the negotiation grammar");
  }
  switch (act.kind) {
    case ActKind::kPropose:
      for (int i = 0; i < kNumItemTypes; ++i) {
        if (act.counts[i] < 0 || act.counts[i] > scenario_.counts[i]) {
          return StrCat("claim of ", act.counts[i], " ", dialogue::kItemNames[i],
                        " exceeds the ", scenario_.counts[i], " available");
        }
      }
      if (!catalog_->Contains(act)) return "propose vector is outside the action catalog";
      return "";
    case ActKind::kAgree:
    case ActKind::kDisagree:
      if (!standing_claim_.has_value() || standing_proposer_ == agent) {
        return StrCat("no standing proposal from the other agent to ",
                      dialogue::ActKindName(act.kind));
      }
      return "";
    default:
      return "";
  }
}

bool NegotiationGame::Step(int agent, const DialogueAct& act) {
  const std::string reason = IllegalReason(agent, act);
  if (!reason.empty()) Fail(ErrorCode::kIllegalAct, reason);
  DialogueAct recorded = act;
  recorded.args.clear();
  moves_.push_back({agent, catalog_->IndexOf(recorded)});
  switch (act.kind) {
    case ActKind::kPropose:
      standing_claim_ = act.counts;
      standing_proposer_ = agent;
      break;
    case ActKind::kAgree: {
      const int proposer = standing_proposer_;
      for (int i = 0; i < kNumItemTypes; ++i) {
        allocation_[proposer][i] = (*standing_claim_)[i];
        allocation_[1 - proposer][i] = scenario_.counts[i] - (*standing_claim_)[i];
      }
      status_ = GameStatus::kAgreed;
      break;
    }
    case ActKind::kDisagree:
      standing_claim_.reset();
      standing_proposer_ = -1;
      break;
    case ActKind::kEnd:
      status_ = GameStatus::kNoDeal;
      break;
    default:
      break;
  }
  if (status_ == GameStatus::kRunning && turn() >= max_turns_) status_ = GameStatus::kTimeout;
  mover_ = 1 - mover_;
  return finished();
}

bool NegotiationGame::StepIndex(int agent, int act_index) {
  return Step(agent, catalog_->At(act_index));
}

std::vector<bool> NegotiationGame::LegalMask(int agent) const {
  std::vector<bool> mask(catalog_->size(), false);
  for (int i = 0; i < catalog_->size(); ++i) {
    mask[i] = IllegalReason(agent, catalog_->At(i)).empty();
  }
  return mask;
}

std::vector<int> NegotiationGame::LegalActions(int agent) const {
  std::vector<int> out;
  const std::vector<bool> mask = LegalMask(agent);
  for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
    if (mask[i]) out.push_back(i);
  }
  return out;
}

dialogue::NegoState NegotiationGame::ViewFor(int agent) const {
  dialogue::NegoState s;
  s.counts = scenario_.counts;
  s.own_values = scenario_.values(agent);
  const int n = static_cast<int>(moves_.size());
  for (int i = std::max(0, n - dialogue::kNegotiationHistory); i < n; ++i) {
    s.history.push_back({moves_[i].agent == agent ? Actor::kTarget : Actor::kOpposite,
                         moves_[i].act});
  }
  if (standing_claim_.has_value()) {
    ItemCounts receive = *standing_claim_;
    if (standing_proposer_ != agent) {
      for (int i = 0; i < kNumItemTypes; ++i) receive[i] = scenario_.counts[i] - receive[i];
    }
    s.standing_receive = receive;
    s.standing_proposer = standing_proposer_ == agent ? Actor::kTarget : Actor::kOpposite;
  }
  s.turn = turn();
  s.max_turns = max_turns_;
  return s;
}

int NegoScore(const NegotiationGame& game, int agent) {
  if (!game.finished()) {
    Fail(ErrorCode::kFailedPrecondition, "score requested while the game is running");
  }
  if (game.status() != GameStatus::kAgreed) return 0;
  return TotalValue(game.allocation(agent), game.scenario().values(agent));
}

bool ParetoOptimal(const Scenario& scenario, int score_a, int score_b) {
  const ItemCounts& c = scenario.counts;
  for (int b = 0; b <= c[0]; ++b) {
    for (int h = 0; h <= c[1]; ++h) {
      for (int l = 0; l <= c[2]; ++l) {
        const ItemCounts mine = {b, h, l};
        const ItemCounts rest = {c[0] - b, c[1] - h, c[2] - l};
        const int a = TotalValue(mine, scenario.values_a);
        const int o = TotalValue(rest, scenario.values_b);
        if (a >= score_a && o >= score_b && (a > score_a || o > score_b)) return false;
      }
    }
  }
  return true;
}

}  // namespace oppa::envs
