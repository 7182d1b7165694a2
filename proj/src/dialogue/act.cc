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

#include "oppa/dialogue/act.h"

#include <utility>

namespace oppa::dialogue {

namespace {

constexpr std::array<std::pair<ActKind, const char*>, 12> kKindNames = {{
    {ActKind::kInform, "inform"},
    {ActKind::kRequest, "request"},
    {ActKind::kBook, "book"},
    {ActKind::kOffer, "offer"},
    {ActKind::kBye, "bye"},
    {ActKind::kHello, "hello"},
    {ActKind::kThanks, "thanks"},
    {ActKind::kPropose, "propose"},
    {ActKind::kAgree, "agree"},
    {ActKind::kDisagree, "disagree"},
    {ActKind::kEnd, "end"},
    {ActKind::kGreet, "greet"},
}};

constexpr std::array<char, kNumItemTypes> kItemLetters = {'b', 'h', 'l'};

}  // namespace

const char* ActorName(Actor actor) {
  return actor == Actor::kTarget ? "target" : "opposite";
}

Actor ActorFromString(const std::string& name) {
  if (name == "target") return Actor::kTarget;
  if (name == "opposite") return Actor::kOpposite;
  Fail(ErrorCode::kInvalidArgument, "unknown actor '", name, "'");
}

const char* ActKindName(ActKind kind) {
  for (const auto& [k, n] : kKindNames) {
    if (k == kind) return n;
  }
  return "unknown";
}

ActKind ActKindFromString(const std::string& name) {
  for (const auto& [k, n] : kKindNames) {
    if (name == n) return k;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown act kind '", name, "'");
}

const char* EnvKindName(EnvKind kind) {
  return kind == EnvKind::kNegotiation ? "negotiation" : "cooperative";
}

EnvKind EnvKindFromString(const std::string& name) {
  if (name == "negotiation") return EnvKind::kNegotiation;
  if (name == "cooperative") return EnvKind::kCooperative;
  Fail(ErrorCode::kInvalidArgument, "unknown environment '", name, "'");
}

bool IsNegotiationKind(ActKind kind) {
  switch (kind) {
    case ActKind::kPropose:
    case ActKind::kAgree:
    case ActKind::kDisagree:
    case ActKind::kEnd:
    case ActKind::kGreet:
      return true;
    default:
      return false;
  }
}

DialogueAct DialogueAct::Propose(ItemCounts claim, Actor actor) {
  DialogueAct a;
  a.actor = actor;
  a.kind = ActKind::kPropose;
  a.counts = claim;
  return a;
}

DialogueAct DialogueAct::Control(ActKind kind, Actor actor) {
  DialogueAct a;
  a.actor = actor;
  a.kind = kind;
  return a;
}

DialogueAct DialogueAct::Slot(ActKind kind, std::string slot, std::string value,
                              Actor actor) {
  DialogueAct a;
  a.actor = actor;
  a.kind = kind;
  a.args.push_back({std::move(slot), std::move(value)});
  return a;
}

std::string ActKey(const DialogueAct& act) {
  std::string key = ActKindName(act.kind);
  if (act.kind == ActKind::kPropose) {
    for (int i = 0; i < kNumItemTypes; ++i) {
      key += StrCat(" ", kItemLetters[i], "=", act.counts[i]);
    }
  }
  for (const SlotValue& sv : act.args) key += " " + sv.slot;
  return key;
}

std::string RenderAct(const DialogueAct& act) {
  std::string out = ActKey(act);
  if (act.kind != ActKind::kPropose) {
    out = ActKindName(act.kind);
    for (const SlotValue& sv : act.args) {
      out += " " + sv.slot;
      if (!sv.value.empty()) out += "=" + sv.value;
    }
  }
  return out;
}

nlohmann::json ActToJson(const DialogueAct& act) {
  nlohmann::json j = {{"actor", ActorName(act.actor)}, {"kind", ActKindName(act.kind)}};
  if (act.kind == ActKind::kPropose) {
    j["counts"] = {{"book", act.counts[0]}, {"hat", act.counts[1]}, {"ball", act.counts[2]}};
  }
  if (!act.args.empty()) {
    nlohmann::json args = nlohmann::json::array();
    for (const SlotValue& sv : act.args) args.push_back({{"slot", sv.slot}, {"value", sv.value}});
    j["args"] = args;
  }
  return j;
}

DialogueAct ActFromJson(const nlohmann::json& j) {
  DialogueAct act;
  try {
    act.kind = ActKindFromString(j.at("kind").get<std::string>());
    act.actor = j.contains("actor") ? ActorFromString(j.at("actor").get<std::string>())
                                    : Actor::kTarget;
    if (act.kind == ActKind::kPropose) {
      const auto& c = j.at("counts");
      for (int i = 0; i < kNumItemTypes; ++i) act.counts[i] = c.at(kItemNames[i]).get<int>();
    }
    if (j.contains("args")) {
      for (const auto& a : j.at("args")) {
        act.args.push_back({a.at("slot").get<std::string>(),
                            a.value("value", std::string())});
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorCode::kInvalidArgument, "malformed act JSON: ", ex.what());
  }
  return act;
}

ActionCatalog::ActionCatalog(std::string id, std::vector<DialogueAct> acts,
                             int placeholder)
    : id_(std::move(id)), acts_(std::move(acts)), placeholder_(placeholder) {
  for (int i = 0; i < size(); ++i) {
    if (!index_.emplace(ActKey(acts_[i]), i).second) {
      Fail(ErrorCode::kInvalidArgument, "duplicate act '", ActKey(acts_[i]),
           "' in catalog ", id_);
    }
  }
  if (placeholder_ < -1 || placeholder_ >= size()) {
    Fail(ErrorCode::kInvalidArgument, "placeholder index out of range");
  }
}

int ActionCatalog::IndexOf(const DialogueAct& act) const {
  auto it = index_.find(ActKey(act));
  if (it == index_.end()) {
    Fail(ErrorCode::kNotFound, "act '", ActKey(act), "' is not in catalog ", id_);
  }
  return it->second;
}

bool ActionCatalog::Contains(const DialogueAct& act) const {
  return index_.count(ActKey(act)) > 0;
}

const DialogueAct& ActionCatalog::At(int index) const {
  if (index < 0 || index >= size()) {
    Fail(ErrorCode::kNotFound, "action index ", index, " outside catalog ", id_,
         " of size ", size());
  }
  return acts_[index];
}

ActionIndex ActToIndex(const DialogueAct& act, const ActionCatalog& catalog) {
  return {catalog.IndexOf(act), catalog.id()};
}

DialogueAct IndexToAct(const ActionIndex& index, const ActionCatalog& catalog,
                       Actor actor) {
  if (index.catalog_id != catalog.id()) {
    Fail(ErrorCode::kIncompatible, "index from catalog ", index.catalog_id,
         " used with catalog ", catalog.id());
  }
  DialogueAct act = catalog.At(index.index);
  act.actor = actor;
  return act;
}

ActionCatalog EnumerateNegotiationActions(const ItemCounts& caps, int max_actions) {
  for (int c : caps) {
    if (c < 0) Fail(ErrorCode::kInvalidArgument, "negative item cap");
  }
  const int64_t n = static_cast<int64_t>(caps[0] + 1) * (caps[1] + 1) * (caps[2] + 1) + 4;
  if (n > max_actions) {
    Fail(ErrorCode::kInvalidArgument, "negotiation catalog size ", n,
         " exceeds cap ", max_actions);
  }
  std::vector<DialogueAct> acts;
  for (int b = 0; b <= caps[0]; ++b) {
    for (int h = 0; h <= caps[1]; ++h) {
      for (int l = 0; l <= caps[2]; ++l) acts.push_back(DialogueAct::Propose({b, h, l}));
    }
  }
  for (ActKind k : {ActKind::kAgree, ActKind::kDisagree, ActKind::kEnd, ActKind::kGreet}) {
    acts.push_back(DialogueAct::Control(k));
  }
  const int placeholder = static_cast<int>(acts.size()) - 1;
  return ActionCatalog(StrCat("negotiation:", caps[0], "x", caps[1], "x", caps[2]),
                       std::move(acts), placeholder);
}

}  // namespace oppa::dialogue
