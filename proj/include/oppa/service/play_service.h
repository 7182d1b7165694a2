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


#ifndef OPPA_SERVICE_PLAY_SERVICE_H_
#define OPPA_SERVICE_PLAY_SERVICE_H_

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "json.hpp"
#include "oppa/envs/negotiation.h"
#include "oppa/harness/policies.h"

namespace httplib {
class Server;
}

namespace oppa::service {

// The agent sits in seat 0 and the human in seat 1, so the human takes the
// opposite-agent role the policy was trained against.
inline constexpr int kAgentSeat = 0;
inline constexpr int kHumanSeat = 1;

// 3 books, 1 hat, 1 ball; the agent values them 0/6/4, the human 1/4/3.
dialogue::Scenario DemoScenario();

struct ServiceOptions {
  std::chrono::seconds idle_timeout{30 * 60};
  std::string cors_origin = "*";
  std::string transcript_path;  // JSONL dump of finished sessions when set
  std::function<std::chrono::steady_clock::time_point()> clock;
};

struct Reply {
  int status = 200;
  nlohmann::ordered_json body;
};

class PlayService {
 public:
  explicit PlayService(ServiceOptions options = {});
  ~PlayService();

  // Registers a checkpoint under `id`. kIncompatible unless it was trained
  // on the negotiation env.
  void AddCheckpoint(const std::string& id, const std::string& dir);
  void AddPolicy(const std::string& id, std::shared_ptr<const harness::LearnedPolicy> policy,
                 const harness::EnvSpec& spec);

  // Body: {"checkpoint"?, "seed"} or {"checkpoint"?, "scenario", "first_mover"?}
  // or {"checkpoint"?, "demo": true}.
  Reply CreateSession(const nlohmann::json& body);
  // Body mirrors DialogueAct: {"kind", "counts"?}.
  Reply PostAct(const std::string& id, const nlohmann::json& body);
  Reply GetState(const std::string& id);
  Reply ListActions(const std::string& id);
  Reply Health();

  // Drops sessions idle for longer than the timeout. Returns how many.
  int ExpireIdle();
  int session_count();

  void Mount(httplib::Server& server);

 private:
  struct Checkpoint;
  struct Session;

  std::shared_ptr<Session> Find(const std::string& id);
  nlohmann::ordered_json View(const Session& s) const;
  std::chrono::steady_clock::time_point Now() const;
  std::string NewId();
  void DumpTranscript(const Session& s);

  ServiceOptions options_;
  std::mutex mu_;  // guards sessions_, checkpoints_ and id_rng_
  std::map<std::string, std::shared_ptr<Checkpoint>> checkpoints_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  Rng id_rng_;
  std::mutex dump_mu_;
};

}  // namespace oppa::service

#endif  // OPPA_SERVICE_PLAY_SERVICE_H_
