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

#include "oppa/policy/config.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "oppa/common.h"

namespace oppa::policy {

using nlohmann::json;

void TrainingConfig::Validate() const {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(gamma_q)) Fail(ErrorCode::kInvalidArgument, "gamma_q must lie in [0,1]");
  if (!(gamma_beta > 0.0 && gamma_beta <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "gamma_beta must lie in (0,1]");
  }
  if (!unit(epsilon_start) || !unit(epsilon_end)) {
    Fail(ErrorCode::kInvalidArgument, "epsilon must lie in [0,1]");
  }
  if (!unit(epsilon_decay_fraction)) {
    Fail(ErrorCode::kInvalidArgument, "epsilon_decay_fraction must lie in [0,1]");
  }
  if (target_sync < 1) Fail(ErrorCode::kInvalidArgument, "target_sync must be >= 1");
  if (beta0 < 0.0) Fail(ErrorCode::kInvalidArgument, "beta0 must be >= 0");
  if (!(tau > 0.0)) Fail(ErrorCode::kInvalidArgument, "tau must be > 0");
  if (epoch_episodes < 1) Fail(ErrorCode::kInvalidArgument, "epoch_episodes must be >= 1");
  if (batch_size < 1 || pretrain_batch < 1) {
    Fail(ErrorCode::kInvalidArgument, "batch sizes must be >= 1");
  }
  if (buffer_capacity < 1) Fail(ErrorCode::kInvalidArgument, "buffer_capacity must be >= 1");
  if (hidden < 1 || estimator_hidden < 1 || emb_dim < 1) {
    Fail(ErrorCode::kInvalidArgument, "layer sizes must be >= 1");
  }
  if (max_episodes < 0 || updates_per_episode < 0 || pretrain_epochs < 0) {
    Fail(ErrorCode::kInvalidArgument, "episode and update counts must be >= 0");
  }
  if (reinforce_batch < 1) Fail(ErrorCode::kInvalidArgument, "reinforce_batch must be >= 1");
  if (!(learning_rate > 0.0) || !(estimator_learning_rate > 0.0) ||
      !(reinforce_learning_rate > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "learning rates must be > 0");
  }
}

double TrainingConfig::EpsilonAt(int episode) const {
  const double span = epsilon_decay_fraction * max_episodes;
  if (span <= 0.0) return epsilon_end;
  const double frac = std::min(1.0, episode / span);
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

json TrainingConfigToJson(const TrainingConfig& c) {
  return {{"epsilon_start", c.epsilon_start},
          {"epsilon_end", c.epsilon_end},
          {"epsilon_decay_fraction", c.epsilon_decay_fraction},
          {"gamma_q", c.gamma_q},
          {"beta0", c.beta0},
          {"gamma_beta", c.gamma_beta},
          {"epoch_episodes", c.epoch_episodes},
          {"w1", c.w1},
          {"w2", c.w2},
          {"tau", c.tau},
          {"target_sync", c.target_sync},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"estimator_learning_rate", c.estimator_learning_rate},
          {"grad_clip", c.grad_clip},
          {"updates_per_episode", c.updates_per_episode},
          {"buffer_capacity", c.buffer_capacity},
          {"max_episodes", c.max_episodes},
          {"seed", c.seed},
          {"hidden", c.hidden},
          {"estimator_hidden", c.estimator_hidden},
          {"emb_dim", c.emb_dim},
          {"use_obe", c.use_obe},
          {"use_action_reg", c.use_action_reg},
          {"soft_opposite", c.soft_opposite},
          {"reg_stop_gradient", c.reg_stop_gradient},
          {"train_estimator_online", c.train_estimator_online},
          {"pretrain_epochs", c.pretrain_epochs},
          {"pretrain_batch", c.pretrain_batch},
          {"reinforce_batch", c.reinforce_batch},
          {"reinforce_learning_rate", c.reinforce_learning_rate}};
}

TrainingConfig TrainingConfigFromJson(const json& j) {
  if (!j.is_object()) Fail(ErrorCode::kInvalidArgument, "training config must be an object");
  TrainingConfig c;
  const json defaults = TrainingConfigToJson(c);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) {
      Fail(ErrorCode::kInvalidArgument, "unknown training config key '", key, "'");
    }
  }
  json merged = defaults;
  merged.update(j);
  try {
    c.epsilon_start = merged.at("epsilon_start").get<double>();
    c.epsilon_end = merged.at("epsilon_end").get<double>();
    c.epsilon_decay_fraction = merged.at("epsilon_decay_fraction").get<double>();
    c.gamma_q = merged.at("gamma_q").get<double>();
    c.beta0 = merged.at("beta0").get<double>();
    c.gamma_beta = merged.at("gamma_beta").get<double>();
    c.epoch_episodes = merged.at("epoch_episodes").get<int>();
    c.w1 = merged.at("w1").get<double>();
    c.w2 = merged.at("w2").get<double>();
    c.tau = merged.at("tau").get<double>();
    c.target_sync = merged.at("target_sync").get<int>();
    c.batch_size = merged.at("batch_size").get<int>();
    c.learning_rate = merged.at("learning_rate").get<double>();
    c.estimator_learning_rate = merged.at("estimator_learning_rate").get<double>();
    c.grad_clip = merged.at("grad_clip").get<double>();
    c.updates_per_episode = merged.at("updates_per_episode").get<int>();
    c.buffer_capacity = merged.at("buffer_capacity").get<int>();
    c.max_episodes = merged.at("max_episodes").get<int>();
    c.seed = merged.at("seed").get<uint64_t>();
    c.hidden = merged.at("hidden").get<int>();
    c.estimator_hidden = merged.at("estimator_hidden").get<int>();
    c.emb_dim = merged.at("emb_dim").get<int>();
    c.use_obe = merged.at("use_obe").get<bool>();
    c.use_action_reg = merged.at("use_action_reg").get<bool>();
    c.soft_opposite = merged.at("soft_opposite").get<bool>();
    c.reg_stop_gradient = merged.at("reg_stop_gradient").get<bool>();
    c.train_estimator_online = merged.at("train_estimator_online").get<bool>();
    c.pretrain_epochs = merged.at("pretrain_epochs").get<int>();
    c.pretrain_batch = merged.at("pretrain_batch").get<int>();
    c.reinforce_batch = merged.at("reinforce_batch").get<int>();
    c.reinforce_learning_rate = merged.at("reinforce_learning_rate").get<double>();
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kInvalidArgument, "malformed training config: ", ex.what());
  }
  c.Validate();
  return c;
}

}  // namespace oppa::policy
