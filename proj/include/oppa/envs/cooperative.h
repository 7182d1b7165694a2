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

#ifndef OPPA_ENVS_COOPERATIVE_H_
#define OPPA_ENVS_COOPERATIVE_H_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "oppa/common.h"
#include "oppa/dialogue/act.h"
#include "oppa/dialogue/state.h"

namespace oppa::envs {

using dialogue::CoopConfig;
using dialogue::CoopState;
using dialogue::DialogueAct;
using dialogue::Goal;

// Samples a goal: a random number of distinct domains, each with a random
// non-empty subset of constraints (random values) and of request slots, kept
// in configuration order.
Goal SampleGoal(Rng& rng, const CoopConfig& config);

struct AgendaItem {
  enum class Type { kInform, kRequest, kBook };
  Type type = Type::kInform;
  std::string domain;
  std::string slot;   // qualified; empty for kBook
  std::string value;  // kInform only
  bool operator==(const AgendaItem&) const = default;
};

struct UserTurn {
  DialogueAct act;
  bool done = false;
  bool success = false;
};

// Agenda-based user simulator. The agenda is a stack built per goal domain
// as constraints, then requests, then the booking. Each turn the user either
// answers a relevant system request or emits the top of the stack; informs
// are popped when emitted, requests and bookings when the system satisfies
// them. The dialogue succeeds when the stack empties and fails when the
// patience budget of system turns runs out.
class AgendaSimulator {
 public:
  AgendaSimulator(Goal goal, int patience);
  static AgendaSimulator New(uint64_t seed, const CoopConfig& config);

  // Opening user act. kFailedPrecondition when called twice.
  DialogueAct Start();
  // kFailedPrecondition before Start or after the dialogue ended.
  UserTurn Step(const DialogueAct& system_act);

  const Goal& goal() const { return goal_; }
  const std::vector<AgendaItem>& agenda() const { return agenda_; }
  int turns() const { return turns_; }
  int patience() const { return patience_; }
  bool finished() const { return finished_; }
  bool success() const { return success_; }

 private:
  DialogueAct EmitTop();

  Goal goal_;
  int patience_;
  std::vector<AgendaItem> agenda_;  // front is the top
  std::map<std::string, std::string> told_;
  int turns_ = 0;
  bool started_ = false;
  bool finished_ = false;
  bool success_ = false;
};

// Rule-based state tracking from the system's side.
void TrackUserAct(CoopState& state, const DialogueAct& user_act);
void TrackSystemAct(CoopState& state, const DialogueAct& system_act);

// Scripted system policy: answer outstanding requests, then book, otherwise
// ask for a missing constraint of the active domain.
int ScriptedSystemAction(const CoopState& state, const CoopConfig& config,
                         const dialogue::ActionCatalog& system_catalog);

}  // namespace oppa::envs

#endif  // OPPA_ENVS_COOPERATIVE_H_
