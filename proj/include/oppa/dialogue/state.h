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

#ifndef OPPA_DIALOGUE_STATE_H_
#define OPPA_DIALOGUE_STATE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "oppa/dialogue/act.h"

namespace oppa::dialogue {

inline constexpr int kScenarioTotalValue = 10;

// Negotiation item pool and the two agents' private per-type values.
struct Scenario {
  ItemCounts counts{};
  ItemCounts values_a{};
  ItemCounts values_b{};

  // Each agent's total value sums to 10 and at least one count is positive.
  void Validate() const;
  const ItemCounts& values(int agent) const { return agent == 0 ? values_a : values_b; }
  bool operator==(const Scenario&) const = default;
};

int TotalValue(const ItemCounts& counts, const ItemCounts& values);

nlohmann::json ScenarioToJson(const Scenario& s);
Scenario ScenarioFromJson(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Cooperative task vocabulary.

struct DomainSpec {
  std::string name;
  std::vector<std::string> constraint_slots;
  // Candidate values per constraint slot, parallel to constraint_slots.
  std::vector<std::vector<std::string>> constraint_values;
  std::vector<std::string> request_slots;
};

struct CoopConfig {
  std::vector<DomainSpec> domains;
  int patience = 12;  // target turns before the user gives up
  int min_domains = 1;
  int max_domains = 2;
  double booking_probability = 1.0;
  int max_actions = 4096;

  // Two domains with three constraint and three request slots each.
  static CoopConfig DeskScale();
  void Validate() const;
  const DomainSpec& domain(const std::string& name) const;
};

nlohmann::json CoopConfigToJson(const CoopConfig& c);
CoopConfig CoopConfigFromJson(const nlohmann::json& j);

std::string QualifiedSlot(const std::string& domain, const std::string& slot);

struct DomainGoal {
  std::string domain;
  std::vector<SlotValue> constraints;  // slot -> required value
  std::vector<std::string> requests;   // qualified request slots
  bool book = true;
  bool operator==(const DomainGoal&) const = default;
};

struct Goal {
  std::vector<DomainGoal> domains;
  // Request slots must not repeat constraint slots within a domain.
  void Validate() const;
  std::set<std::string> RequestedSlots() const;
  bool operator==(const Goal&) const = default;
};

nlohmann::json GoalToJson(const Goal& g);
Goal GoalFromJson(const nlohmann::json& j);

// System acts: per domain inform(request slot) x R, request(constraint slot)
// x C, book; then hello and bye.
ActionCatalog EnumerateSystemActions(const CoopConfig& config);
// User acts: per domain inform(constraint) x C, request(request slot) x R,
// book; then hello (placeholder), thanks and bye.
ActionCatalog EnumerateUserActions(const CoopConfig& config);

// ---------------------------------------------------------------------------
// Dialogue states.

// Rule-tracked belief of the system in the cooperative task. Slot keys are
// qualified "domain.slot" names; a pending booking request is the key
// "domain.book" in `requested`.
struct CoopState {
  std::map<std::string, std::string> belief;
  std::set<std::string> informed;
  std::set<std::string> requested;
  std::set<std::string> booked;
  int turn = 0;
  int max_turns = 12;
  bool operator==(const CoopState&) const = default;
};

inline constexpr int kNegotiationHistory = 4;

struct HistoryEntry {
  Actor actor = Actor::kTarget;
  int act = -1;  // index in the negotiation catalog
  bool operator==(const HistoryEntry&) const = default;
};

// One agent's view of a negotiation.
struct NegoState {
  ItemCounts counts{};
  ItemCounts own_values{};
  std::vector<HistoryEntry> history;  // most recent last, at most k entries
  // Standing proposal as the counts this agent would receive, and who made it.
  std::optional<ItemCounts> standing_receive;
  Actor standing_proposer = Actor::kOpposite;
  int turn = 0;
  int max_turns = 20;
  bool operator==(const NegoState&) const = default;
};

using DialogueState = std::variant<CoopState, NegoState>;

// Fixed-length binary/normalized features padded with zeros to state_dim.
class CoopStateEncoder {
 public:
  CoopStateEncoder(const CoopConfig& config, int state_dim);
  static int RawFeatureCount(const CoopConfig& config);
  std::vector<double> Encode(const CoopState& state) const;
  int state_dim() const { return state_dim_; }

 private:
  CoopConfig config_;
  int state_dim_;
};

class NegoStateEncoder {
 public:
  NegoStateEncoder(const ActionCatalog& catalog, const ItemCounts& caps,
                   int state_dim);
  static int RawFeatureCount();
  std::vector<double> Encode(const NegoState& state) const;
  int state_dim() const { return state_dim_; }

 private:
  ActionCatalog catalog_;
  ItemCounts caps_;
  int state_dim_;
};

// 64-bit FNV-1a over the IEEE bytes of a feature vector.
uint64_t FeatureDigest(const std::vector<double>& features);

}  // namespace oppa::dialogue

#endif  // OPPA_DIALOGUE_STATE_H_
