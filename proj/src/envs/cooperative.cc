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

#include "oppa/envs/cooperative.h"

#include <algorithm>

namespace oppa::envs {

using dialogue::ActKind;
using dialogue::Actor;
using dialogue::DomainGoal;
using dialogue::DomainSpec;
using dialogue::QualifiedSlot;
using dialogue::SlotValue;

namespace {

// Random subset of {0..n-1} of size k, returned in increasing order.
std::vector<int> SampleSubset(Rng& rng, int n, int k) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) std::swap(idx[i], idx[i + UniformInt(rng, n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::string DomainOf(const std::string& qualified) {
  return qualified.substr(0, qualified.find('.'));
}

}  // namespace

Goal SampleGoal(Rng& rng, const CoopConfig& config) {
  config.Validate();
  const int num_domains = static_cast<int>(config.domains.size());
  const int hi = std::min(config.max_domains, num_domains);
  const int lo = std::min(config.min_domains, hi);
  const int n = lo + UniformInt(rng, hi - lo + 1);
  std::vector<int> order(num_domains);
  for (int i = 0; i < num_domains; ++i) order[i] = i;
  for (int i = 0; i < n; ++i) std::swap(order[i], order[i + UniformInt(rng, num_domains - i)]);

  Goal goal;
  for (int k = 0; k < n; ++k) {
    const DomainSpec& spec = config.domains[order[k]];
    DomainGoal dg;
    dg.domain = spec.name;
    const int nc = static_cast<int>(spec.constraint_slots.size());
    for (int c : SampleSubset(rng, nc, 1 + UniformInt(rng, nc))) {
      const auto& values = spec.constraint_values[c];
      dg.constraints.push_back({QualifiedSlot(spec.name, spec.constraint_slots[c]),
                                values[UniformInt(rng, static_cast<int>(values.size()))]});
    }
    const int nr = static_cast<int>(spec.request_slots.size());
    for (int r : SampleSubset(rng, nr, 1 + UniformInt(rng, nr))) {
      dg.requests.push_back(QualifiedSlot(spec.name, spec.request_slots[r]));
    }
    dg.book = UniformUnit(rng) < config.booking_probability;
    goal.domains.push_back(std::move(dg));
  }
  return goal;
}

AgendaSimulator::AgendaSimulator(Goal goal, int patience)
    : goal_(std::move(goal)), patience_(patience) {
  goal_.Validate();
  if (patience < 1) Fail(ErrorCode::kInvalidArgument, "patience must be >= 1");
  for (const DomainGoal& d : goal_.domains) {
    for (const SlotValue& c : d.constraints) {
      agenda_.push_back({AgendaItem::Type::kInform, d.domain, c.slot, c.value});
    }
    for (const std::string& r : d.requests) {
      agenda_.push_back({AgendaItem::Type::kRequest, d.domain, r, ""});
    }
    if (d.book) agenda_.push_back({AgendaItem::Type::kBook, d.domain, "", ""});
  }
}

AgendaSimulator AgendaSimulator::New(uint64_t seed, const CoopConfig& config) {
  Rng rng(seed);
  return AgendaSimulator(SampleGoal(rng, config), config.patience);
}

DialogueAct AgendaSimulator::EmitTop() {
  const AgendaItem top = agenda_.front();
  switch (top.type) {
    case AgendaItem::Type::kInform:
      agenda_.erase(agenda_.begin());
      told_[top.slot] = top.value;
      return DialogueAct::Slot(ActKind::kInform, top.slot, top.value, Actor::kOpposite);
    case AgendaItem::Type::kRequest:
      return DialogueAct::Slot(ActKind::kRequest, top.slot, "", Actor::kOpposite);
    case AgendaItem::Type::kBook:
      return DialogueAct::Slot(ActKind::kBook, top.domain, "", Actor::kOpposite);
  }
  return DialogueAct::Control(ActKind::kHello, Actor::kOpposite);
}

DialogueAct AgendaSimulator::Start() {
  if (started_) Fail(ErrorCode::kFailedPrecondition, "simulator already started");
  started_ = true;
  return EmitTop();
}

UserTurn AgendaSimulator::Step(const DialogueAct& system_act) {
  if (!started_) Fail(ErrorCode::kFailedPrecondition, "simulator not started");
  if (finished_) Fail(ErrorCode::kFailedPrecondition, "dialogue already finished");
  ++turns_;
  std::optional<DialogueAct> reply;
  const std::string slot = system_act.args.empty() ? "" : system_act.args.front().slot;
  auto find = [&](AgendaItem::Type type, const std::string& domain, const std::string& s) {
    return std::find_if(agenda_.begin(), agenda_.end(), [&](const AgendaItem& it) {
      return it.type == type && it.domain == domain && it.slot == s;
    });
  };
  switch (system_act.kind) {
    case ActKind::kInform: {
      auto it = find(AgendaItem::Type::kRequest, DomainOf(slot), slot);
      if (it != agenda_.end()) agenda_.erase(it);
      break;
    }
    case ActKind::kRequest: {
      auto it = std::find_if(agenda_.begin(), agenda_.end(), [&](const AgendaItem& a) {
        return a.type == AgendaItem::Type::kInform && a.slot == slot;
      });
      if (it != agenda_.end()) {
        told_[it->slot] = it->value;
        reply = DialogueAct::Slot(ActKind::kInform, it->slot, it->value, Actor::kOpposite);
        agenda_.erase(it);
      }
      break;
    }
    case ActKind::kBook: {
      const std::string domain = DomainOf(slot);
      auto it = find(AgendaItem::Type::kBook, domain, "");
      if (it == agenda_.end()) break;
      bool complete = true;
      for (const DomainGoal& d : goal_.domains) {
        if (d.domain != domain) continue;
        for (const SlotValue& c : d.constraints) {
          auto t = told_.find(c.slot);
          complete = complete && t != told_.end() && t->second == c.value;
        }
      }
      if (complete) agenda_.erase(it);
      break;
    }
    default:
      break;
  }

  UserTurn out;
  if (agenda_.empty()) {
    out.act = DialogueAct::Control(ActKind::kBye, Actor::kOpposite);
    out.done = true;
    out.success = true;
  } else if (reply.has_value()) {
    out.act = *reply;
  } else {
    out.act = EmitTop();
  }
  if (!out.done && turns_ >= patience_) {
    out.act = DialogueAct::Control(ActKind::kBye, Actor::kOpposite);
    out.done = true;
  }
  finished_ = out.done;
  success_ = out.success;
  return out;
}

void TrackUserAct(CoopState& state, const DialogueAct& act) {
  const std::string slot = act.args.empty() ? "" : act.args.front().slot;
  switch (act.kind) {
    case ActKind::kInform:
      state.belief[slot] = act.args.front().value;
      break;
    case ActKind::kRequest:
      state.requested.insert(slot);
      break;
    case ActKind::kBook:
      state.requested.insert(QualifiedSlot(slot, "book"));
      break;
    default:
      break;
  }
}

void TrackSystemAct(CoopState& state, const DialogueAct& act) {
  const std::string slot = act.args.empty() ? "" : act.args.front().slot;
  switch (act.kind) {
    case ActKind::kInform:
      state.informed.insert(slot);
      state.requested.erase(slot);
      break;
    case ActKind::kBook:
      state.booked.insert(slot);
      state.requested.erase(QualifiedSlot(slot, "book"));
      break;
    default:
      break;
  }
  ++state.turn;
}

int ScriptedSystemAction(const CoopState& state, const CoopConfig& config,
                         const dialogue::ActionCatalog& catalog) {
  std::string booking;
  for (const std::string& r : state.requested) {
    if (r.size() > 5 && r.compare(r.size() - 5, 5, ".book") == 0) {
      if (booking.empty()) booking = r;
      continue;
    }
    return catalog.IndexOf(DialogueAct::Slot(ActKind::kInform, r));
  }
  if (!booking.empty()) {
    return catalog.IndexOf(DialogueAct::Slot(ActKind::kBook, DomainOf(booking)));
  }

  const DomainSpec* active = &config.domains.front();
  for (const DomainSpec& d : config.domains) {
    if (state.booked.count(d.name)) continue;
    bool mentioned = false;
    for (const auto& s : d.constraint_slots) {
      mentioned = mentioned || state.belief.count(QualifiedSlot(d.name, s));
    }
    if (mentioned) {
      active = &d;
      break;
    }
  }
  for (const auto& s : active->constraint_slots) {
    const std::string q = QualifiedSlot(active->name, s);
    if (!state.belief.count(q)) return catalog.IndexOf(DialogueAct::Slot(ActKind::kRequest, q));
  }
  return catalog.IndexOf(DialogueAct::Control(ActKind::kHello));
}

}  // namespace oppa::envs
