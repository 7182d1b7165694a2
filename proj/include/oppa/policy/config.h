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

#ifndef OPPA_POLICY_CONFIG_H_
#define OPPA_POLICY_CONFIG_H_

#include <cstdint>

#include "json.hpp"

namespace oppa::policy {

struct TrainingConfig {
  // Exploration: linear from start to end over the first decay_fraction of
  // max_episodes, constant afterwards.
  double epsilon_start = 0.2;
  double epsilon_end = 0.01;
  double epsilon_decay_fraction = 0.6;

  double gamma_q = 0.99;
  double beta0 = 1.0;
  double gamma_beta = 0.95;
  int epoch_episodes = 50;
  double w1 = 1.0;
  double w2 = 1.0;
  double tau = 1.0;
  int target_sync = 1;  // C, in iterations
  int batch_size = 32;
  double learning_rate = 1e-3;
  double estimator_learning_rate = 1e-3;
  double grad_clip = 10.0;  // <= 0 disables clipping
  int updates_per_episode = 1;
  int buffer_capacity = 500;
  int max_episodes = 1000;
  uint64_t seed = 0;

  int hidden = 256;
  int estimator_hidden = 256;
  int emb_dim = 16;

  bool use_obe = true;
  bool use_action_reg = true;
  bool soft_opposite = false;
  bool reg_stop_gradient = false;
  bool train_estimator_online = true;

  // Supervised warm start.
  int pretrain_epochs = 0;
  int pretrain_batch = 32;

  // REINFORCE baseline: episodes per policy-gradient step and its SGD rate.
  int reinforce_batch = 8;
  double reinforce_learning_rate = 1e-2;

  void Validate() const;
  double EpsilonAt(int episode) const;
};

nlohmann::json TrainingConfigToJson(const TrainingConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
TrainingConfig TrainingConfigFromJson(const nlohmann::json& j);

}  // namespace oppa::policy

#endif  // OPPA_POLICY_CONFIG_H_
