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


#include "oppa/harness/policies.h"

#include <filesystem>
#include <fstream>

namespace oppa::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::shared_ptr<envs::NegotiationAgent> MakeOpponent(const std::string& name) {
  return std::shared_ptr<envs::NegotiationAgent>(envs::MakeScriptedAgent(name));
}

std::unique_ptr<envs::DialogueEnv> MakeEnv(const ExperimentConfig& config) {
  if (config.negotiation_env()) {
    return std::make_unique<envs::NegotiationEnv>(config.negotiation, config.state_dim,
                                                  MakeOpponent(config.opponent));
  }
  return std::make_unique<envs::CooperativeEnv>(config.cooperative, config.state_dim);
}

EnvSpec EnvSpec::Of(const ExperimentConfig& config) {
  EnvSpec s;
  s.env = config.env;
  s.state_dim = config.state_dim;
  s.cooperative = config.cooperative;
  s.negotiation = config.negotiation;
  return s;
}

ordered_json EnvSpec::ToJson() const {
  ordered_json j;
  j["env"] = env;
  j["state_dim"] = state_dim;
  if (env == "negotiation") {
    j["negotiation"] = envs::NegotiationConfigToJson(negotiation);
  } else {
    j["cooperative"] = dialogue::CoopConfigToJson(cooperative);
  }
  return j;
}

EnvSpec EnvSpec::FromJson(const json& j) {
  EnvSpec s;
  try {
    s.env = j.at("env").get<std::string>();
    s.state_dim = j.at("state_dim").get<int>();
    if (s.env == "negotiation") {
      s.negotiation = envs::NegotiationConfigFromJson(j.at("negotiation"));
    } else if (s.env == "cooperative") {
      s.cooperative = dialogue::CoopConfigFromJson(j.at("cooperative"));
    } else {
      Fail(ErrorCode::kCorruptManifest, "env.json names unknown env '", s.env, "'");
    }
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kCorruptManifest, "malformed env.json: ", ex.what());
  }
  return s;
}

bool EnvSpec::SameGame(const EnvSpec& other) const {
  if (env != other.env || state_dim != other.state_dim) return false;
  if (env == "negotiation") {
    return negotiation.caps == other.negotiation.caps &&
           negotiation.max_turns == other.negotiation.max_turns &&
           negotiation.max_actions == other.negotiation.max_actions;
  }
  return dialogue::CoopConfigToJson(cooperative) == dialogue::CoopConfigToJson(other.cooperative);
}

int RandomPolicy::Act(const envs::DialogueEnv& env) {
  const std::vector<bool> legal = env.LegalMask();
  std::vector<int> ids;
  for (int i = 0; i < static_cast<int>(legal.size()); ++i) {
    if (legal[i]) ids.push_back(i);
  }
  if (ids.empty()) Fail(ErrorCode::kFailedPrecondition, "no legal action");
  return ids[UniformInt(rng_, static_cast<int>(ids.size()))];
}

void SaveCheckpointDir(const LearnedPolicy& policy, const EnvSpec& spec,
                       const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create ", dir, ": ", ec.message());
  policy.Save(dir);
  const fs::path path = fs::path(dir) / "env.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write ", path.string());
  out << spec.ToJson().dump(2) << "\n";
}

namespace {

json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kNotFound, "missing ", path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kCorruptManifest, "unparsable ", path.string(), ": ", ex.what());
  }
}

}  // namespace

std::shared_ptr<LearnedPolicy> LoadPolicy(const std::string& dir) {
  const json agent = ReadJsonFile(fs::path(dir) / "agent.json");
  const std::string format = agent.value("format", "");
  if (format == "oppa-agent") {
    return std::make_shared<OppaPolicy>(
        std::make_shared<const policy::OppaAgent>(policy::OppaAgent::Load(dir)));
  }
  if (format == "reinforce-agent") {
    return std::make_shared<ReinforcePolicy>(
        std::make_shared<const policy::ReinforceAgent>(policy::ReinforceAgent::Load(dir)));
  }
  Fail(ErrorCode::kCorruptManifest, dir, "/agent.json has unknown format '", format, "'");
}

EnvSpec LoadEnvSpec(const std::string& dir) {
  return EnvSpec::FromJson(ReadJsonFile(fs::path(dir) / "env.json"));
}

void CheckCompatible(const LearnedPolicy& policy, const EnvSpec& trained_on,
                     const EnvSpec& target) {
  if (!trained_on.SameGame(target)) {
    Fail(ErrorCode::kIncompatible, "checkpoint was trained on ", trained_on.ToJson().dump(),
         " but the target env is ", target.ToJson().dump());
  }
  if (policy.state_dim() != target.state_dim) {
    Fail(ErrorCode::kIncompatible, "checkpoint state_dim ", policy.state_dim(),
         " != env state_dim ", target.state_dim);
  }
}

PolicyNegotiationAgent::PolicyNegotiationAgent(std::shared_ptr<const LearnedPolicy> policy,
                                               const envs::NegotiationConfig& config,
                                               int state_dim)
    : policy_(std::move(policy)),
      encoder_(dialogue::EnumerateNegotiationActions(config.caps, config.max_actions),
               config.caps, state_dim) {
  if (policy_->state_dim() != state_dim) {
    Fail(ErrorCode::kIncompatible, "policy state_dim ", policy_->state_dim(), " != ",
         state_dim);
  }
}

int PolicyNegotiationAgent::Act(const envs::NegotiationGame& game, int agent) {
  if (policy_->num_actions() != game.catalog().size()) {
    Fail(ErrorCode::kIncompatible, "policy has ", policy_->num_actions(),
         " actions but the game catalog has ", game.catalog().size());
  }
  return policy_->ActOnState(encoder_.Encode(game.ViewFor(agent)), game.LegalMask(agent));
}

}  // namespace oppa::harness
