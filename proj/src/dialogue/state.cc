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

#include "oppa/dialogue/state.h"

#include <cstring>

namespace oppa::dialogue {

using nlohmann::json;

int TotalValue(const ItemCounts& counts, const ItemCounts& values) {
  int total = 0;
  for (int i = 0; i < kNumItemTypes; ++i) total += counts[i] * values[i];
  return total;
}

void Scenario::Validate() const {
  bool any = false;
  for (int i = 0; i < kNumItemTypes; ++i) {
    if (counts[i] < 0 || values_a[i] < 0 || values_b[i] < 0) {
      Fail(ErrorCode::kInvalidArgument, "scenario has a negative count or value");
    }
    any = any || counts[i] > 0;
  }
  if (!any) Fail(ErrorCode::kInvalidArgument, "scenario has no items");
  for (int agent = 0; agent < 2; ++agent) {
    const int total = TotalValue(counts, values(agent));
    if (total != kScenarioTotalValue) {
      Fail(ErrorCode::kInvalidArgument, "agent ", agent, " total value is ", total,
           ", expected ", kScenarioTotalValue);
    }
  }
}

namespace {

json CountsToJson(const ItemCounts& c) {
  return {{"book", c[0]}, {"hat", c[1]}, {"ball", c[2]}};
}

ItemCounts CountsFromJson(const json& j) {
  ItemCounts c{};
  for (int i = 0; i < kNumItemTypes; ++i) c[i] = j.at(kItemNames[i]).get<int>();
  return c;
}

}  // namespace

json ScenarioToJson(const Scenario& s) {
  return {{"counts", CountsToJson(s.counts)},
          {"values_a", CountsToJson(s.values_a)},
          {"values_b", CountsToJson(s.values_b)}};
}

Scenario ScenarioFromJson(const json& j) {
  Scenario s;
  try {
    s.counts = CountsFromJson(j.at("counts"));
    s.values_a = CountsFromJson(j.at("values_a"));
    s.values_b = CountsFromJson(j.at("values_b"));
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kInvalidArgument, "malformed scenario JSON: ", ex.what());
  }
  s.Validate();
  return s;
}

CoopConfig CoopConfig::DeskScale() {
  CoopConfig c;
  c.domains = {
      {"hotel",
       {"area", "price", "stars"},
       {{"north", "south", "centre"}, {"cheap", "moderate", "expensive"}, {"3", "4", "5"}},
       {"phone", "address", "postcode"}},
      {"restaurant",
       {"food", "area", "price"},
       {{"italian", "chinese", "indian"},
        {"north", "south", "centre"},
        {"cheap", "moderate", "expensive"}},
       {"phone", "address", "postcode"}},
  };
  return c;
}

void CoopConfig::Validate() const {
  if (domains.empty()) Fail(ErrorCode::kInvalidArgument, "cooperative config has no domains");
  if (patience < 1) Fail(ErrorCode::kInvalidArgument, "patience must be >= 1");
  if (min_domains < 1 || max_domains < min_domains ||
      max_domains > static_cast<int>(domains.size())) {
    Fail(ErrorCode::kInvalidArgument, "invalid domain count range [", min_domains, ", ",
         max_domains, "]");
  }
  for (const DomainSpec& d : domains) {
    if (d.constraint_slots.empty() || d.request_slots.empty()) {
      Fail(ErrorCode::kInvalidArgument, "domain '", d.name,
           "' needs constraint and request slots");
    }
    if (d.constraint_values.size() != d.constraint_slots.size()) {
      Fail(ErrorCode::kInvalidArgument, "domain '", d.name,
           "' needs one value list per constraint slot");
    }
    for (const auto& vals : d.constraint_values) {
      if (vals.empty()) Fail(ErrorCode::kInvalidArgument, "empty value list in '", d.name, "'");
    }
    for (const auto& r : d.request_slots) {
      for (const auto& c : d.constraint_slots) {
        if (r == c) {
          Fail(ErrorCode::kInvalidArgument, "slot '", r, "' is both constraint and request in '",
               d.name, "'");
        }
      }
    }
  }
}

const DomainSpec& CoopConfig::domain(const std::string& name) const {
  for (const auto& d : domains) {
    if (d.name == name) return d;
  }
  Fail(ErrorCode::kNotFound, "unknown domain '", name, "'");
}

json CoopConfigToJson(const CoopConfig& c) {
  json domains = json::array();
  for (const auto& d : c.domains) {
    domains.push_back({{"name", d.name},
                       {"constraint_slots", d.constraint_slots},
                       {"constraint_values", d.constraint_values},
                       {"request_slots", d.request_slots}});
  }
  return {{"domains", domains},
          {"patience", c.patience},
          {"min_domains", c.min_domains},
          {"max_domains", c.max_domains},
          {"booking_probability", c.booking_probability},
          {"max_actions", c.max_actions}};
}

CoopConfig CoopConfigFromJson(const json& j) {
  CoopConfig c = CoopConfig::DeskScale();
  try {
    if (j.contains("domains")) {
      c.domains.clear();
      for (const auto& d : j.at("domains")) {
        c.domains.push_back({d.at("name").get<std::string>(),
                             d.at("constraint_slots").get<std::vector<std::string>>(),
                             d.at("constraint_values").get<std::vector<std::vector<std::string>>>(),
                             d.at("request_slots").get<std::vector<std::string>>()});
      }
    }
    c.patience = j.value("patience", c.patience);
    c.min_domains = j.value("min_domains", c.min_domains);
    c.max_domains = j.value("max_domains", std::min<int>(c.max_domains, c.domains.size()));
    c.booking_probability = j.value("booking_probability", c.booking_probability);
    c.max_actions = j.value("max_actions", c.max_actions);
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kInvalidArgument, "malformed cooperative config: ", ex.what());
  }
  c.Validate();
  return c;
}

std::string QualifiedSlot(const std::string& domain, const std::string& slot) {
  return domain + "." + slot;
}

void Goal::Validate() const {
  if (domains.empty()) Fail(ErrorCode::kInvalidArgument, "goal has no domains");
  for (const auto& d : domains) {
    for (const auto& r : d.requests) {
      for (const auto& c : d.constraints) {
        if (r == c.slot) {
          Fail(ErrorCode::kInvalidArgument, "goal slot '", r,
               "' is both a constraint and a request");
        }
      }
    }
  }
}

std::set<std::string> Goal::RequestedSlots() const {
  std::set<std::string> out;
  for (const auto& d : domains) out.insert(d.requests.begin(), d.requests.end());
  return out;
}

json GoalToJson(const Goal& g) {
  json domains = json::array();
  for (const auto& d : g.domains) {
    json constraints = json::array();
    for (const auto& c : d.constraints) constraints.push_back({c.slot, c.value});
    domains.push_back({{"domain", d.domain},
                       {"constraints", constraints},
                       {"requests", d.requests},
                       {"book", d.book}});
  }
  return {{"domains", domains}};
}

Goal GoalFromJson(const json& j) {
  Goal g;
  try {
    for (const auto& d : j.at("domains")) {
      DomainGoal dg;
      dg.domain = d.at("domain").get<std::string>();
      // Constraint order is part of the agenda, so keep the array order when
      // given as [[slot, value], ...] and the object order otherwise.
      const auto& cs = d.at("constraints");
      if (cs.is_array()) {
        for (const auto& c : cs) dg.constraints.push_back({c.at(0), c.at(1)});
      } else {
        for (auto it = cs.begin(); it != cs.end(); ++it) {
          dg.constraints.push_back({it.key(), it.value().get<std::string>()});
        }
      }
      dg.requests = d.at("requests").get<std::vector<std::string>>();
      dg.book = d.value("book", true);
      g.domains.push_back(std::move(dg));
    }
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kInvalidArgument, "malformed goal JSON: ", ex.what());
  }
  g.Validate();
  return g;
}

ActionCatalog EnumerateSystemActions(const CoopConfig& config) {
  std::vector<DialogueAct> acts;
  for (const auto& d : config.domains) {
    for (const auto& r : d.request_slots) {
      acts.push_back(DialogueAct::Slot(ActKind::kInform, QualifiedSlot(d.name, r)));
    }
    for (const auto& c : d.constraint_slots) {
      acts.push_back(DialogueAct::Slot(ActKind::kRequest, QualifiedSlot(d.name, c)));
    }
    acts.push_back(DialogueAct::Slot(ActKind::kBook, d.name));
  }
  acts.push_back(DialogueAct::Control(ActKind::kHello));
  acts.push_back(DialogueAct::Control(ActKind::kBye));
  if (static_cast<int>(acts.size()) > config.max_actions) {
    Fail(ErrorCode::kInvalidArgument, "system catalog size ", acts.size(),
         " exceeds cap ", config.max_actions);
  }
  return ActionCatalog("cooperative-system", std::move(acts), -1);
}

ActionCatalog EnumerateUserActions(const CoopConfig& config) {
  std::vector<DialogueAct> acts;
  for (const auto& d : config.domains) {
    for (const auto& c : d.constraint_slots) {
      acts.push_back(DialogueAct::Slot(ActKind::kInform, QualifiedSlot(d.name, c), "",
                                       Actor::kOpposite));
    }
    for (const auto& r : d.request_slots) {
      acts.push_back(DialogueAct::Slot(ActKind::kRequest, QualifiedSlot(d.name, r), "",
                                       Actor::kOpposite));
    }
    acts.push_back(DialogueAct::Slot(ActKind::kBook, d.name, "", Actor::kOpposite));
  }
  const int placeholder = static_cast<int>(acts.size());
  acts.push_back(DialogueAct::Control(ActKind::kHello, Actor::kOpposite));
  acts.push_back(DialogueAct::Control(ActKind::kThanks, Actor::kOpposite));
  acts.push_back(DialogueAct::Control(ActKind::kBye, Actor::kOpposite));
  if (static_cast<int>(acts.size()) > config.max_actions) {
    Fail(ErrorCode::kInvalidArgument, "user catalog size ", acts.size(),
         " exceeds cap ", config.max_actions);
  }
  return ActionCatalog("cooperative-user", std::move(acts), placeholder);
}

CoopStateEncoder::CoopStateEncoder(const CoopConfig& config, int state_dim)
    : config_(config), state_dim_(state_dim) {
  const int raw = RawFeatureCount(config);
  if (raw > state_dim) {
    Fail(ErrorCode::kInvalidArgument, "cooperative state needs ", raw,
         " features but state_dim is ", state_dim);
  }
}

int CoopStateEncoder::RawFeatureCount(const CoopConfig& config) {
  int n = 1;  // turn
  for (const auto& d : config.domains) {
    n += static_cast<int>(d.constraint_slots.size()) +
         2 * static_cast<int>(d.request_slots.size()) + 2;
  }
  return n;
}

// Per domain: [constraint known x C | request outstanding x R |
// request informed x R | booking requested | booked], then turn/max_turns.
std::vector<double> CoopStateEncoder::Encode(const CoopState& state) const {
  if (state.turn < 0 || state.turn > state.max_turns) {
    Fail(ErrorCode::kInvalidArgument, "turn ", state.turn, " outside [0, ",
         state.max_turns, "]");
  }
  std::vector<double> f(state_dim_, 0.0);
  int k = 0;
  for (const auto& d : config_.domains) {
    for (const auto& c : d.constraint_slots) {
      f[k++] = state.belief.count(QualifiedSlot(d.name, c)) ? 1.0 : 0.0;
    }
    for (const auto& r : d.request_slots) {
      f[k++] = state.requested.count(QualifiedSlot(d.name, r)) ? 1.0 : 0.0;
    }
    for (const auto& r : d.request_slots) {
      f[k++] = state.informed.count(QualifiedSlot(d.name, r)) ? 1.0 : 0.0;
    }
    f[k++] = state.requested.count(QualifiedSlot(d.name, "book")) ? 1.0 : 0.0;
    f[k++] = state.booked.count(d.name) ? 1.0 : 0.0;
  }
  f[k++] = static_cast<double>(state.turn) / state.max_turns;
  return f;
}

NegoStateEncoder::NegoStateEncoder(const ActionCatalog& catalog, const ItemCounts& caps,
                                   int state_dim)
    : catalog_(catalog), caps_(caps), state_dim_(state_dim) {
  if (RawFeatureCount() > state_dim) {
    Fail(ErrorCode::kInvalidArgument, "negotiation state needs ", RawFeatureCount(),
         " features but state_dim is ", state_dim);
  }
}

namespace {
constexpr int kHistoryKinds = 5;  // propose, agree, disagree, end, greet
constexpr int kHistoryWidth = kHistoryKinds + kNumItemTypes + 1;

int HistoryKindSlot(ActKind kind) {
  switch (kind) {
    case ActKind::kPropose: return 0;
    case ActKind::kAgree: return 1;
    case ActKind::kDisagree: return 2;
    case ActKind::kEnd: return 3;
    default: return 4;
  }
}
}  // namespace

int NegoStateEncoder::RawFeatureCount() {
  return 2 * kNumItemTypes + kNegotiationHistory * kHistoryWidth + 1 + 2 + kNumItemTypes;
}

// [counts/cap x3 | own values/10 x3 | history k x (kind one-hot x5, counts
// this agent would receive/cap x3, opposite-actor bit) | turn/max_turns |
// standing by opposite, standing by self | standing receive/cap x3].
// History is right-aligned: the most recent act occupies the last block and
// unused blocks stay zero.
std::vector<double> NegoStateEncoder::Encode(const NegoState& state) const {
  if (state.turn < 0 || state.turn > state.max_turns) {
    Fail(ErrorCode::kInvalidArgument, "turn ", state.turn, " outside [0, ",
         state.max_turns, "]");
  }
  std::vector<double> f(state_dim_, 0.0);
  auto norm = [this](int v, int i) { return caps_[i] > 0 ? static_cast<double>(v) / caps_[i] : 0.0; };
  int k = 0;
  for (int i = 0; i < kNumItemTypes; ++i) f[k++] = norm(state.counts[i], i);
  for (int i = 0; i < kNumItemTypes; ++i) {
    f[k++] = static_cast<double>(state.own_values[i]) / kScenarioTotalValue;
  }
  const int n = static_cast<int>(state.history.size());
  if (n > kNegotiationHistory) {
    Fail(ErrorCode::kInvalidArgument, "history holds ", n, " acts, window is ",
         kNegotiationHistory);
  }
  for (int slot = 0; slot < kNegotiationHistory; ++slot) {
    const int base = k + slot * kHistoryWidth;
    const int h = slot - (kNegotiationHistory - n);
    if (h < 0) continue;
    const HistoryEntry& e = state.history[h];
    const DialogueAct& act = catalog_.At(e.act);
    f[base + HistoryKindSlot(act.kind)] = 1.0;
    if (act.kind == ActKind::kPropose) {
      for (int i = 0; i < kNumItemTypes; ++i) {
        const int receive = e.actor == Actor::kTarget ? act.counts[i]
                                                      : state.counts[i] - act.counts[i];
        f[base + kHistoryKinds + i] = norm(receive, i);
      }
    }
    f[base + kHistoryKinds + kNumItemTypes] = e.actor == Actor::kOpposite ? 1.0 : 0.0;
  }
  k += kNegotiationHistory * kHistoryWidth;
  f[k++] = static_cast<double>(state.turn) / state.max_turns;
  if (state.standing_receive.has_value()) {
    f[k + (state.standing_proposer == Actor::kOpposite ? 0 : 1)] = 1.0;
    for (int i = 0; i < kNumItemTypes; ++i) f[k + 2 + i] = norm((*state.standing_receive)[i], i);
  }
  return f;
}

uint64_t FeatureDigest(const std::vector<double>& features) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : features) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace oppa::dialogue
