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

#ifndef OPPA_DIALOGUE_ACT_H_
#define OPPA_DIALOGUE_ACT_H_

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "oppa/common.h"

namespace oppa::dialogue {

enum class Actor { kTarget, kOpposite };

enum class ActKind {
  // Cooperative grammar.
  kInform,
  kRequest,
  kBook,
  kOffer,
  kBye,
  kHello,
  kThanks,
  // Negotiation grammar.
  kPropose,
  kAgree,
  kDisagree,
  kEnd,
  kGreet,
};

enum class EnvKind { kNegotiation, kCooperative };

inline constexpr int kNumItemTypes = 3;
using ItemCounts = std::array<int, kNumItemTypes>;
inline constexpr std::array<const char*, kNumItemTypes> kItemNames = {"book", "hat",
                                                                      "ball"};

const char* ActorName(Actor actor);
Actor ActorFromString(const std::string& name);
const char* ActKindName(ActKind kind);
ActKind ActKindFromString(const std::string& name);
const char* EnvKindName(EnvKind kind);
EnvKind EnvKindFromString(const std::string& name);
bool IsNegotiationKind(ActKind kind);

struct SlotValue {
  std::string slot;  // "domain.slot"
  std::string value;
  bool operator==(const SlotValue&) const = default;
};

struct DialogueAct {
  Actor actor = Actor::kTarget;
  ActKind kind = ActKind::kGreet;
  std::vector<SlotValue> args;  // cooperative acts
  ItemCounts counts{};          // propose: counts claimed by the proposer

  bool operator==(const DialogueAct&) const = default;

  static DialogueAct Propose(ItemCounts claim, Actor actor = Actor::kTarget);
  static DialogueAct Control(ActKind kind, Actor actor = Actor::kTarget);
  static DialogueAct Slot(ActKind kind, std::string slot, std::string value = "",
                          Actor actor = Actor::kTarget);
};

// Canonical identity of an act for catalog lookup: ignores the actor and
// slot values, keeps kind, slot names and propose counts.
std::string ActKey(const DialogueAct& act);

// Canonical token rendering, e.g. "propose b=1 h=0 l=1", "agree",
// "inform hotel.phone". Used by episode logs and the reward model.
std::string RenderAct(const DialogueAct& act);

nlohmann::json ActToJson(const DialogueAct& act);
DialogueAct ActFromJson(const nlohmann::json& j);

// Fixed, ordered list of acts defining a discrete action space.
class ActionCatalog {
 public:
  ActionCatalog() = default;
  ActionCatalog(std::string id, std::vector<DialogueAct> acts, int placeholder);

  const std::string& id() const { return id_; }
  int size() const { return static_cast<int>(acts_.size()); }
  const std::vector<DialogueAct>& acts() const { return acts_; }
  // Neutral act used as the constant opposite-action placeholder.
  int placeholder() const { return placeholder_; }

  // kNotFound for acts outside the catalog.
  int IndexOf(const DialogueAct& act) const;
  bool Contains(const DialogueAct& act) const;
  // kNotFound for out-of-range indices.
  const DialogueAct& At(int index) const;

 private:
  std::string id_;
  std::vector<DialogueAct> acts_;
  std::unordered_map<std::string, int> index_;
  int placeholder_ = -1;
};

struct ActionIndex {
  int index = -1;
  std::string catalog_id;
  bool operator==(const ActionIndex&) const = default;
};

ActionIndex ActToIndex(const DialogueAct& act, const ActionCatalog& catalog);
DialogueAct IndexToAct(const ActionIndex& index, const ActionCatalog& catalog,
                       Actor actor = Actor::kTarget);

// All propose vectors with 0 <= count <= cap in lexicographic (book, hat,
// ball) order, followed by agree, disagree, end and greet. Greet is the
// placeholder.
ActionCatalog EnumerateNegotiationActions(const ItemCounts& caps,
                                          int max_actions = 4096);

}  // namespace oppa::dialogue

#endif  // OPPA_DIALOGUE_ACT_H_
