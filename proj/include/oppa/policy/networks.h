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

#ifndef OPPA_POLICY_NETWORKS_H_
#define OPPA_POLICY_NETWORKS_H_

#include <vector>

#include "oppa/nn/layers.h"
#include "oppa/nn/param_store.h"
#include "oppa/nn/tape.h"

namespace oppa::policy {

using nn::ParamStore;
using nn::Tape;
using nn::Var;

// pi_o(s, a): [s ; onehot(a)] -> relu hidden -> softmax over opposite acts.
class OppositeEstimator {
 public:
  OppositeEstimator() = default;
  OppositeEstimator(int state_dim, int num_target, int num_opposite, int hidden, Rng& rng);

  // Probability vector on the tape.
  Var Forward(Tape& tape, ParamStore& store, const std::vector<double>& state,
              int target_action) const;
  std::vector<double> Distribution(const std::vector<double>& state, int target_action) const;

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  int state_dim() const { return state_dim_; }
  int num_target() const { return num_target_; }
  int num_opposite() const { return num_opposite_; }

 private:
  int state_dim_ = 0;
  int num_target_ = 0;
  int num_opposite_ = 0;
  ParamStore params_;
  nn::DenseLayer l1_;
  nn::DenseLayer l2_;
};

// Q(s_hat, .) with s_hat = [s ; E w], where w is a one-hot (or soft) weight
// vector over opposite acts. E is stored as (emb_dim, num_opposite) so the
// embedding of act k is its column k. Holds the online parameters and a
// target copy with the same layout.
class QFunction {
 public:
  QFunction() = default;
  QFunction(int state_dim, int num_actions, int num_opposite, int hidden, int emb_dim,
            Rng& rng);

  Var Forward(Tape& tape, ParamStore& store, const std::vector<double>& state,
              const std::vector<double>& opposite_weights) const;
  std::vector<double> Values(const std::vector<double>& state,
                             const std::vector<double>& opposite_weights,
                             bool use_target = false) const;
  // [s ; E w] as plain numbers from the online parameters.
  std::vector<double> Augment(const std::vector<double>& state,
                              const std::vector<double>& opposite_weights) const;

  void SyncTarget() { target_.CopyValuesFrom(params_); }

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  ParamStore& target_params() { return target_; }
  const ParamStore& target_params() const { return target_; }
  int state_dim() const { return state_dim_; }
  int num_actions() const { return num_actions_; }
  int num_opposite() const { return num_opposite_; }
  int emb_dim() const { return emb_dim_; }
  int hidden() const { return hidden_; }

  static constexpr const char* kEmbedding = "q/opposite_embedding";

 private:
  int state_dim_ = 0;
  int num_actions_ = 0;
  int num_opposite_ = 0;
  int hidden_ = 0;
  int emb_dim_ = 0;
  ParamStore params_;
  ParamStore target_;
  nn::DenseLayer l1_;
  nn::DenseLayer l2_;
};

}  // namespace oppa::policy

#endif  // OPPA_POLICY_NETWORKS_H_
