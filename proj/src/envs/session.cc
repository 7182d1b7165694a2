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

#include "oppa/envs/session.h"

#include <map>
#include <set>

namespace oppa::envs {

using dialogue::ActKind;
using dialogue::Actor;
using dialogue::DialogueAct;
using nlohmann::json;

json SessionRecordToJson(const SessionRecord& r) {
  json acts = json::array();
  for (const auto& a : r.acts) acts.push_back(dialogue::ActToJson(a));
  json j = {{"env", dialogue::EnvKindName(r.env)},
            {"acts", acts},
            {"turns", r.turns},
            {"total_reward", r.total_reward},
            {"outcome", r.outcome}};
  if (r.env == dialogue::EnvKind::kCooperative) {
    j["goal"] = dialogue::GoalToJson(r.goal);
    j["simulator_success"] = r.simulator_success;
  } else {
    j["scenario"] = dialogue::ScenarioToJson(r.scenario);
    j["target_agent"] = r.target_agent;
    j["first_mover"] = r.first_mover;
    j["allocation_target"] = r.allocation_target;
    j["allocation_opposite"] = r.allocation_opposite;
    j["score_target"] = r.score_target;
    j["score_opposite"] = r.score_opposite;
  }
  return j;
}

SessionRecord SessionRecordFromJson(const json& j) {
  SessionRecord r;
  try {
    r.env = dialogue::EnvKindFromString(j.at("env").get<std::string>());
    for (const auto& a : j.at("acts")) r.acts.push_back(dialogue::ActFromJson(a));
    r.turns = j.value("turns", 0);
    r.total_reward = j.value("total_reward", 0.0);
    r.outcome = j.value("outcome", "");
    if (r.env == dialogue::EnvKind::kCooperative) {
      r.goal = dialogue::GoalFromJson(j.at("goal"));
      r.simulator_success = j.value("simulator_success", false);
    } else {
      r.scenario = dialogue::ScenarioFromJson(j.at("scenario"));
      r.target_agent = j.value("target_agent", 0);
      r.first_mover = j.value("first_mover", 0);
      r.allocation_target = j.value("allocation_target", dialogue::ItemCounts{});
      r.allocation_opposite = j.value("allocation_opposite", dialogue::ItemCounts{});
      r.score_target = j.value("score_target", 0);
      r.score_opposite = j.value("score_opposite", 0);
    }
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kInvalidArgument, "malformed session record: ", ex.what());
  }
  return r;
}

InformScores InformScoresOf(const SessionRecord& r) {
  const std::set<std::string> requested = r.goal.RequestedSlots();
  std::set<std::string> informed;
  for (const DialogueAct& a : r.acts) {
    if (a.actor == Actor::kTarget && a.kind == ActKind::kInform && !a.args.empty()) {
      informed.insert(a.args.front().slot);
    }
  }
  int hits = 0;
  for (const auto& s : informed) hits += requested.count(s) ? 1 : 0;
  InformScores out;
  out.recall = requested.empty() ? 1.0 : static_cast<double>(hits) / requested.size();
  if (informed.empty()) return out;
  out.precision = static_cast<double>(hits) / informed.size();
  if (out.precision + out.recall > 0.0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

double InformF1(const SessionRecord& r) { return InformScoresOf(r).f1; }

double MatchRate(const SessionRecord& r) {
  std::map<std::string, std::string> told;
  std::set<std::string> matched;
  std::map<std::string, const dialogue::DomainGoal*> by_domain;
  for (const auto& d : r.goal.domains) by_domain[d.domain] = &d;
  for (const DialogueAct& a : r.acts) {
    if (a.args.empty()) continue;
    if (a.actor == Actor::kOpposite && a.kind == ActKind::kInform) {
      told[a.args.front().slot] = a.args.front().value;
    } else if (a.actor == Actor::kTarget && a.kind == ActKind::kBook) {
      auto it = by_domain.find(a.args.front().slot);
      if (it == by_domain.end()) continue;
      bool ok = true;
      for (const auto& c : it->second->constraints) {
        auto t = told.find(c.slot);
        ok = ok && t != told.end() && t->second == c.value;
      }
      if (ok) matched.insert(it->first);
    }
  }
  int bookings = 0;
  int hits = 0;
  for (const auto& d : r.goal.domains) {
    if (!d.book) continue;
    ++bookings;
    hits += matched.count(d.domain) ? 1 : 0;
  }
  return bookings == 0 ? 1.0 : static_cast<double>(hits) / bookings;
}

bool TaskSuccess(const SessionRecord& r) {
  return InformScoresOf(r).recall == 1.0 && MatchRate(r) == 1.0;
}

}  // namespace oppa::envs
