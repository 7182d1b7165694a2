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


#ifndef OPPA_HARNESS_CONFIG_H_
#define OPPA_HARNESS_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "oppa/dialogue/state.h"
#include "oppa/envs/negotiation.h"
#include "oppa/policy/config.h"

namespace oppa::harness {

struct ExperimentConfig {
  std::string env = "cooperative";  // or "negotiation"
  int state_dim = 64;
  dialogue::CoopConfig cooperative = dialogue::CoopConfig::DeskScale();
  envs::NegotiationConfig negotiation;
  std::string opponent = "conceding";  // negotiation only

  std::string algorithm = "oppa";  // or "reinforce"
  policy::TrainingConfig training;

  // Scripted-expert corpus for the supervised warm start.
  int corpus_episodes = 200;
  double corpus_noise = 0.1;
  double corpus_holdout = 0.2;

  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  int eval_episodes = 200;
  uint64_t eval_seed = 777;
  int snapshot_every = 50;
  int snapshot_episodes = 100;
  bool log_episodes = true;
  std::string out = "runs";

  void Validate() const;
  bool negotiation_env() const { return env == "negotiation"; }
};

nlohmann::ordered_json ExperimentConfigToJson(const ExperimentConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);
ExperimentConfig LoadExperimentConfig(const std::string& path);

// Markdown table of every key, its default and meaning.
std::string ConfigReference();

}  // namespace oppa::harness

#endif  // OPPA_HARNESS_CONFIG_H_
