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

#ifndef OPPA_ENVS_SESSION_H_
#define OPPA_ENVS_SESSION_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "oppa/dialogue/act.h"
#include "oppa/dialogue/state.h"

namespace oppa::envs {

// Transcript and outcome of one finished dialogue.
struct SessionRecord {
  dialogue::EnvKind env = dialogue::EnvKind::kCooperative;
  std::vector<dialogue::DialogueAct> acts;  // actor-tagged, in order
  int turns = 0;                            // target turns
  double total_reward = 0.0;
  std::string outcome;  // success/failure or agreed/no_deal/timeout

  // Cooperative sessions.
  dialogue::Goal goal;
  bool simulator_success = false;

  // Negotiation sessions.
  dialogue::Scenario scenario;
  int target_agent = 0;
  int first_mover = 0;
  dialogue::ItemCounts allocation_target{};
  dialogue::ItemCounts allocation_opposite{};
  int score_target = 0;
  int score_opposite = 0;

  bool operator==(const SessionRecord&) const = default;
};

nlohmann::json SessionRecordToJson(const SessionRecord& r);
SessionRecord SessionRecordFromJson(const nlohmann::json& j);

struct InformScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Slots the target informed against the goal's requested slots. F1 is 0 when
// the target informed nothing; recall is 1 when nothing was requested.
InformScores InformScoresOf(const SessionRecord& r);
double InformF1(const SessionRecord& r);

// Fraction of booking domains with a booking made after every goal
// constraint of that domain was informed by the user with its goal value.
// 1 when the goal books nothing.
double MatchRate(const SessionRecord& r);

// Full inform recall and a match rate of 1.
bool TaskSuccess(const SessionRecord& r);

}  // namespace oppa::envs

#endif  // OPPA_ENVS_SESSION_H_
