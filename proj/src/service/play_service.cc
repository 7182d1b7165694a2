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


#include "oppa/service/play_service.h"

#include <fstream>
#include <optional>
#include <random>

#include "httplib.h"

namespace oppa::service {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

dialogue::Scenario DemoScenario() {
  dialogue::Scenario s;
  s.counts = {3, 1, 1};
  s.values_a = {0, 6, 4};
  s.values_b = {1, 4, 3};
  return s;
}

struct PlayService::Checkpoint {
  std::shared_ptr<const harness::LearnedPolicy> policy;
  harness::EnvSpec spec;
  std::shared_ptr<const dialogue::ActionCatalog> catalog;
};

struct PlayService::Session {
  std::mutex mu;
  std::string id;
  std::string checkpoint;
  std::optional<envs::NegotiationGame> game;
  std::unique_ptr<harness::PolicyNegotiationAgent> agent;
  std::chrono::steady_clock::time_point last_used;
  bool dumped = false;
};

namespace {

Reply Error(int status, const std::string& error, const std::string& message) {
  Reply r;
  r.status = status;
  r.body = {{"error", error}, {"message", message}};
  return r;
}

ordered_json Counts(const dialogue::ItemCounts& c) {
  ordered_json j;
  for (int i = 0; i < dialogue::kNumItemTypes; ++i) j[dialogue::kItemNames[i]] = c[i];
  return j;
}

const char* SeatName(int seat) { return seat == kHumanSeat ? "human" : "agent"; }

ordered_json ActJson(const dialogue::DialogueAct& act, int seat) {
  dialogue::DialogueAct a = act;
  a.actor = seat == kAgentSeat ? dialogue::Actor::kTarget : dialogue::Actor::kOpposite;
  return ordered_json::parse(dialogue::ActToJson(a).dump());
}

}  // namespace

PlayService::PlayService(ServiceOptions options)
    : options_(std::move(options)), id_rng_(std::random_device{}()) {}

PlayService::~PlayService() = default;

std::chrono::steady_clock::time_point PlayService::Now() const {
  return options_.clock ? options_.clock() : std::chrono::steady_clock::now();
}

void PlayService::AddCheckpoint(const std::string& id, const std::string& dir) {
  AddPolicy(id, harness::LoadPolicy(dir), harness::LoadEnvSpec(dir));
}

void PlayService::AddPolicy(const std::string& id,
                            std::shared_ptr<const harness::LearnedPolicy> policy,
                            const harness::EnvSpec& spec) {
  if (spec.env != "negotiation") {
    Fail(ErrorCode::kIncompatible, "checkpoint '", id, "' was not trained on negotiation");
  }
  auto cp = std::make_shared<Checkpoint>();
  cp->catalog = std::make_shared<const dialogue::ActionCatalog>(
      dialogue::EnumerateNegotiationActions(spec.negotiation.caps, spec.negotiation.max_actions));
  if (policy->num_actions() != cp->catalog->size() || policy->state_dim() != spec.state_dim) {
    Fail(ErrorCode::kIncompatible, "checkpoint '", id, "' does not match its env.json");
  }
  cp->policy = std::move(policy);
  cp->spec = spec;
  std::lock_guard<std::mutex> lock(mu_);
  checkpoints_[id] = std::move(cp);
}

std::string PlayService::NewId() {
  static const char* kHex = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 2; ++i) {
    uint64_t x = id_rng_();
    for (int k = 0; k < 16; ++k) {
      id += kHex[x & 15];
      x >>= 4;
    }
  }
  return id;
}

int PlayService::ExpireIdle() {
  const auto now = Now();
  std::lock_guard<std::mutex> lock(mu_);
  int dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now - it->second->last_used > options_.idle_timeout) {
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

int PlayService::session_count() {
  std::lock_guard<std::mutex> lock(mu_);
  return static_cast<int>(sessions_.size());
}

std::shared_ptr<PlayService::Session> PlayService::Find(const std::string& id) {
  ExpireIdle();
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

ordered_json PlayService::View(const Session& s) const {
  const envs::NegotiationGame& g = *s.game;
  ordered_json j;
  j["session_id"] = s.id;
  j["checkpoint"] = s.checkpoint;
  j["status"] = envs::GameStatusName(g.status());
  j["whose_turn"] = g.finished() ? "none" : SeatName(g.current_mover());
  j["turn"] = g.turn();
  j["max_turns"] = g.max_turns();
  j["human"] = {{"counts", Counts(g.scenario().counts)},
                {"values", Counts(g.scenario().values(kHumanSeat))}};
  ordered_json transcript = ordered_json::array();
  for (const auto& m : g.moves()) {
    transcript.push_back({{"actor", SeatName(m.agent)}, {"act", ActJson(g.catalog().At(m.act), m.agent)}});
  }
  j["transcript"] = transcript;
  if (g.finished()) {
    j["scores"] = {{"human", envs::NegoScore(g, kHumanSeat)},
                   {"agent", envs::NegoScore(g, kAgentSeat)}};
  } else {
    j["scores"] = nullptr;
  }
  return j;
}

void PlayService::DumpTranscript(const Session& s) {
  if (options_.transcript_path.empty()) return;
  const envs::NegotiationGame& g = *s.game;
  ordered_json line = View(s);
  line["scenario"] = ordered_json::parse(dialogue::ScenarioToJson(g.scenario()).dump());
  line["agent_seat"] = kAgentSeat;
  std::lock_guard<std::mutex> lock(dump_mu_);
  std::ofstream out(options_.transcript_path, std::ios::binary | std::ios::app);
  if (out) out << line.dump() << "\n";
}

Reply PlayService::CreateSession(const json& body) {
  ExpireIdle();
  if (!body.is_object()) return Error(400, "bad_request", "body must be a JSON object");
  std::shared_ptr<Checkpoint> cp;
  std::string cp_id;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (body.contains("checkpoint")) {
      if (!body.at("checkpoint").is_string()) {
        return Error(400, "bad_request", "checkpoint must be a string");
      }
      cp_id = body.at("checkpoint").get<std::string>();
      auto it = checkpoints_.find(cp_id);
      if (it == checkpoints_.end()) {
        return Error(404, "unknown_checkpoint", "no checkpoint '" + cp_id + "'");
      }
      cp = it->second;
    } else if (checkpoints_.size() == 1) {
      cp_id = checkpoints_.begin()->first;
      cp = checkpoints_.begin()->second;
    } else {
      return Error(404, "unknown_checkpoint", "name a checkpoint");
    }
  }

  auto s = std::make_shared<Session>();
  s->checkpoint = cp_id;
  const envs::NegotiationConfig& nc = cp->spec.negotiation;
  try {
    const int sources = body.contains("seed") + body.contains("scenario") +
                        (body.contains("demo") && body.at("demo").get<bool>());
    if (sources != 1) {
      return Error(400, "bad_request", "give exactly one of seed, scenario or demo");
    }
    if (body.contains("seed")) {
      envs::NegotiationConfig drawn = nc;
      drawn.first_mover = -1;
      s->game.emplace(envs::NegotiationGame::New(body.at("seed").get<uint64_t>(), drawn, cp->catalog));
    } else {
      const dialogue::Scenario scenario =
          body.contains("scenario") ? dialogue::ScenarioFromJson(body.at("scenario")) : DemoScenario();
      scenario.Validate();
      for (int i = 0; i < dialogue::kNumItemTypes; ++i) {
        if (scenario.counts[i] > nc.caps[i]) {
          return Error(422, "invalid_scenario",
                       StrCat(scenario.counts[i], " ", dialogue::kItemNames[i],
                              " exceeds the checkpoint cap of ", nc.caps[i]));
        }
      }
      const std::string first = body.value("first_mover", std::string("human"));
      if (first != "human" && first != "agent") {
        return Error(400, "bad_request", "first_mover must be \"human\" or \"agent\"");
      }
      s->game.emplace(scenario, cp->catalog, nc.max_turns,
                      first == "human" ? kHumanSeat : kAgentSeat);
    }
  } catch (const json::exception& ex) {
    return Error(400, "bad_request", ex.what());
  } catch (const OppaError& ex) {
    return Error(400, "bad_request", ex.what());
  }
  s->agent = std::make_unique<harness::PolicyNegotiationAgent>(cp->policy, nc, cp->spec.state_dim);
  if (!s->game->finished() && s->game->current_mover() == kAgentSeat) {
    s->game->StepIndex(kAgentSeat, s->agent->Act(*s->game, kAgentSeat));
  }
  s->last_used = Now();
  {
    std::lock_guard<std::mutex> lock(mu_);
    do {
      s->id = NewId();
    } while (sessions_.count(s->id));
    sessions_[s->id] = s;
  }
  Reply r;
  r.status = 201;
  r.body = View(*s);
  return r;
}

Reply PlayService::PostAct(const std::string& id, const json& body) {
  auto s = Find(id);
  if (!s) return Error(404, "unknown_session", "no session '" + id + "'");
  std::lock_guard<std::mutex> lock(s->mu);
  s->last_used = Now();
  envs::NegotiationGame& g = *s->game;
  if (g.finished()) {
    return Error(409, "finished", StrCat("session is over (", envs::GameStatusName(g.status()), ")"));
  }
  if (g.current_mover() != kHumanSeat) return Error(409, "not_your_turn", "the agent is to move");
  dialogue::DialogueAct act;
  try {
    act = dialogue::ActFromJson(body);
  } catch (const OppaError& ex) {
    return Error(400, "bad_request", ex.what());
  } catch (const json::exception& ex) {
    return Error(400, "bad_request", ex.what());
  }
  act.actor = dialogue::Actor::kOpposite;
  const std::string reason = g.IllegalReason(kHumanSeat, act);
  if (!reason.empty()) {
    Reply r = Error(422, "illegal_act", reason);
    r.body["reason"] = reason;
    return r;
  }
  const envs::NegotiationGame backup = g;
  ordered_json agent_act = nullptr;
  try {
    g.Step(kHumanSeat, act);
    if (!g.finished()) {
      const int idx = s->agent->Act(g, kAgentSeat);
      g.StepIndex(kAgentSeat, idx);
      agent_act = ActJson(g.catalog().At(idx), kAgentSeat);
    }
  } catch (const std::exception& ex) {
    g = backup;
    return Error(500, "internal", ex.what());
  }
  Reply r;
  r.body["human_act"] = ActJson(g.catalog().At(g.moves()[backup.turn()].act), kHumanSeat);
  r.body["agent_act"] = agent_act;
  r.body["status"] = envs::GameStatusName(g.status());
  ordered_json view = View(*s);
  r.body["scores"] = view["scores"];
  r.body["view"] = view;
  if (g.finished() && !s->dumped) {
    s->dumped = true;
    DumpTranscript(*s);
  }
  return r;
}

Reply PlayService::GetState(const std::string& id) {
  auto s = Find(id);
  if (!s) return Error(404, "unknown_session", "no session '" + id + "'");
  std::lock_guard<std::mutex> lock(s->mu);
  s->last_used = Now();
  Reply r;
  r.body = View(*s);
  return r;
}

Reply PlayService::ListActions(const std::string& id) {
  auto s = Find(id);
  if (!s) return Error(404, "unknown_session", "no session '" + id + "'");
  std::lock_guard<std::mutex> lock(s->mu);
  s->last_used = Now();
  const envs::NegotiationGame& g = *s->game;
  ordered_json actions = ordered_json::array();
  if (!g.finished() && g.current_mover() == kHumanSeat) {
    for (int idx : g.LegalActions(kHumanSeat)) {
      actions.push_back({{"index", idx}, {"act", ActJson(g.catalog().At(idx), kHumanSeat)}});
    }
  }
  Reply r;
  r.body = {{"session_id", s->id}, {"actions", actions}};
  return r;
}

Reply PlayService::Health() {
  ExpireIdle();
  std::lock_guard<std::mutex> lock(mu_);
  Reply r;
  ordered_json ids = ordered_json::array();
  for (const auto& [id, cp] : checkpoints_) ids.push_back(id);
  r.body = {{"status", "ok"}, {"sessions", sessions_.size()}, {"checkpoints", ids}};
  return r;
}

void PlayService::Mount(httplib::Server& server) {
  server.set_default_headers({{"Access-Control-Allow-Origin", options_.cors_origin},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto parse = [](const httplib::Request& req, json* out) {
    try {
      *out = req.body.empty() ? json::object() : json::parse(req.body);
      return true;
    } catch (const json::exception&) {
      return false;
    }
  };
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server.Get("/healthz", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, Health());
  });
  server.Post("/sessions", [this, send, parse](const httplib::Request& req,
                                               httplib::Response& res) {
    json body;
    if (!parse(req, &body)) return send(res, Error(400, "bad_request", "body is not JSON"));
    send(res, CreateSession(body));
  });
  server.Post(R"(/sessions/([A-Za-z0-9]+)/acts)",
              [this, send, parse](const httplib::Request& req, httplib::Response& res) {
                json body;
                if (!parse(req, &body)) {
                  return send(res, Error(400, "bad_request", "body is not JSON"));
                }
                send(res, PostAct(req.matches[1], body));
              });
  server.Get(R"(/sessions/([A-Za-z0-9]+)/actions)",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, ListActions(req.matches[1]));
             });
  server.Get(R"(/sessions/([A-Za-z0-9]+))",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, GetState(req.matches[1]));
             });
}

}  // namespace oppa::service
