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


#ifndef OPPA_HARNESS_RUNS_H_
#define OPPA_HARNESS_RUNS_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "oppa/harness/config.h"
#include "oppa/harness/policies.h"
#include "oppa/harness/reports.h"
#include "oppa/policy/oppa.h"

namespace oppa::harness {

// Episode seeds. Every variant trained with seed s is scored on the same
// evaluation episodes.
uint64_t EvalEpisodeSeed(const ExperimentConfig& config, uint64_t seed, int index);
uint64_t SnapshotEpisodeSeed(const ExperimentConfig& config, uint64_t seed, int index);
uint64_t CorpusSeed(uint64_t seed, bool heldout);

// Greedy rollouts of `policy` in `env`.
std::vector<envs::SessionRecord> Rollouts(Policy& policy, envs::DialogueEnv& env,
                                          const std::vector<uint64_t>& episode_seeds);

struct PretrainResult {
  policy::PretrainReport train;
  int heldout_examples = 0;
  double heldout_action_accuracy = 0.0;
  // Absent for learners without an opposite-action estimator.
  std::optional<double> heldout_estimator_accuracy;

  nlohmann::ordered_json ToJson() const;
};

struct TrainResult {
  uint64_t seed = 0;
  std::shared_ptr<LearnedPolicy> policy;
  EnvSpec spec;
  std::optional<PretrainResult> pretrain;
  std::vector<CurvePoint> curve;
  std::vector<double> betas;  // per episode, after its updates
};

// Collects the expert corpus, warm-starts a learner and writes
// <out>/checkpoint plus <out>/pretrain_report.json. Empty `out` skips files.
PretrainResult RunPretrain(const ExperimentConfig& config, uint64_t seed,
                           const std::string& out,
                           std::shared_ptr<LearnedPolicy>* policy = nullptr);

// Trains one seed. Without `init` the warm start runs inline. Writes
// <out>/checkpoint, curve.csv, train_report.json and episodes.jsonl.
TrainResult RunTrain(const ExperimentConfig& config, uint64_t seed, const std::string& out,
                     const std::string& init = "");

// Scores policies[k] on the evaluation episodes of seeds[k]. A single policy
// is reused for every seed.
EvalReport RunEval(const std::vector<std::shared_ptr<Policy>>& policies,
                   const ExperimentConfig& config, const std::vector<uint64_t>& seeds,
                   const std::string& label);
// Loads a checkpoint, checks it against the config env and scores it.
EvalReport RunEvalCheckpoint(const std::string& checkpoint, const ExperimentConfig& config,
                             const std::string& out);

// Negotiation only. Each scenario is played twice with the seats swapped;
// the seat that opens alternates. a[k] meets b[k] on the scenarios of seeds[k].
CrossplayReport RunCrossplay(const std::vector<std::shared_ptr<LearnedPolicy>>& a,
                             const std::vector<std::shared_ptr<LearnedPolicy>>& b,
                             const std::string& name_a, const std::string& name_b,
                             const ExperimentConfig& config,
                             const std::vector<uint64_t>& seeds);
CrossplayReport RunCrossplayCheckpoints(const std::string& checkpoint_a,
                                        const std::string& checkpoint_b,
                                        const ExperimentConfig& config,
                                        const std::string& out);

struct Variant {
  std::string name;
  std::string slug;
  std::string algorithm;
  bool use_obe = true;
  bool use_action_reg = true;
};
// OPPA, OPPA w/o A, OPPA w/o OBE (DQN), REINFORCE.
const std::vector<Variant>& AblationVariants();
ExperimentConfig ApplyVariant(const ExperimentConfig& config, const Variant& variant);

// Trains and evaluates every variant on every seed. Writes
// <out>/ablation.{json,csv} and per-run directories when `out` is set.
AblationReport RunAblate(const ExperimentConfig& config, const std::string& out,
                         const std::vector<Variant>& variants = AblationVariants());

}  // namespace oppa::harness

#endif  // OPPA_HARNESS_RUNS_H_
