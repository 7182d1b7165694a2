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

#include "oppa/policy/networks.h"

namespace oppa::policy {

using nn::Activation;

namespace {

void CheckLength(const std::vector<double>& v, int expected, const char* what) {
  if (static_cast<int>(v.size()) != expected) {
    Fail(ErrorCode::kDimensionMismatch, what, " has length ", v.size(), ", expected ",
         expected);
  }
}

}  // namespace

OppositeEstimator::OppositeEstimator(int state_dim, int num_target, int num_opposite,
                                     int hidden, Rng& rng)
    : state_dim_(state_dim), num_target_(num_target), num_opposite_(num_opposite) {
  l1_ = nn::DenseLayer::Create(params_, "est/l1", state_dim + num_target, hidden, rng);
  l2_ = nn::DenseLayer::Create(params_, "est/l2", hidden, num_opposite, rng);
}

Var OppositeEstimator::Forward(Tape& tape, ParamStore& store,
                               const std::vector<double>& state, int target_action) const {
  CheckLength(state, state_dim_, "estimator state");
  if (target_action < 0 || target_action >= num_target_) {
    Fail(ErrorCode::kInvalidArgument, "target action ", target_action, " outside [0, ",
         num_target_, ")");
  }
  std::vector<double> input(state);
  input.resize(state_dim_ + num_target_, 0.0);
  input[state_dim_ + target_action] = 1.0;
  Var h = l1_.Forward(tape, store, tape.Constant(std::move(input)), Activation::kRelu);
  return tape.Softmax(l2_.Forward(tape, store, h, Activation::kIdentity));
}

std::vector<double> OppositeEstimator::Distribution(const std::vector<double>& state,
                                                    int target_action) const {
  Tape tape;
  ParamStore& store = const_cast<ParamStore&>(params_);
  return tape.Data(Forward(tape, store, state, target_action));
}

QFunction::QFunction(int state_dim, int num_actions, int num_opposite, int hidden,
                     int emb_dim, Rng& rng)
    : state_dim_(state_dim),
      num_actions_(num_actions),
      num_opposite_(num_opposite),
      hidden_(hidden),
      emb_dim_(emb_dim) {
  params_.AddGlorot(kEmbedding, {emb_dim, num_opposite}, rng);
  l1_ = nn::DenseLayer::Create(params_, "q/l1", state_dim + emb_dim, hidden, rng);
  l2_ = nn::DenseLayer::Create(params_, "q/l2", hidden, num_actions, rng);
  target_ = params_;
}

Var QFunction::Forward(Tape& tape, ParamStore& store, const std::vector<double>& state,
                       const std::vector<double>& opposite_weights) const {
  CheckLength(state, state_dim_, "Q state");
  CheckLength(opposite_weights, num_opposite_, "opposite weights");
  Var emb = tape.MatVec(tape.Param(store, kEmbedding), tape.Constant(opposite_weights));
  Var x = tape.Concat({tape.Constant(state), emb});
  Var h = l1_.Forward(tape, store, x, Activation::kRelu);
  return l2_.Forward(tape, store, h, Activation::kIdentity);
}

std::vector<double> QFunction::Values(const std::vector<double>& state,
                                      const std::vector<double>& opposite_weights,
                                      bool use_target) const {
  Tape tape;
  ParamStore& store = const_cast<ParamStore&>(use_target ? target_ : params_);
  return tape.Data(Forward(tape, store, state, opposite_weights));
}

std::vector<double> QFunction::Augment(const std::vector<double>& state,
                                       const std::vector<double>& opposite_weights) const {
  CheckLength(state, state_dim_, "Q state");
  CheckLength(opposite_weights, num_opposite_, "opposite weights");
  const nn::Tensor& e = params_.at(kEmbedding).value;
  std::vector<double> out(state);
  for (int r = 0; r < emb_dim_; ++r) {
    double acc = 0.0;
    for (int c = 0; c < num_opposite_; ++c) acc += e.data[r * num_opposite_ + c] * opposite_weights[c];
    out.push_back(acc);
  }
  return out;
}

}  // namespace oppa::policy
