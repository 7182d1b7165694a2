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

#ifndef OPPA_NN_LAYERS_H_
#define OPPA_NN_LAYERS_H_

#include <span>
#include <string>
#include <vector>

#include "oppa/nn/param_store.h"
#include "oppa/nn/tape.h"

namespace oppa::nn {

enum class Activation { kIdentity, kTanh, kRelu };

Activation ActivationFromString(const std::string& name);
const char* ActivationName(Activation act);

// y = act(W x + b).
Var DenseForward(Tape& tape, Var x, Var weights, Var bias, Activation act);

struct DenseLayer {
  std::string weight_name;
  std::string bias_name;
  int input_dim = 0;
  int output_dim = 0;

  static DenseLayer Create(ParamStore& store, const std::string& prefix,
                           int input_dim, int output_dim, Rng& rng);
  Var Forward(Tape& tape, ParamStore& store, Var x, Activation act) const;
};

// Weights are (hidden, input + hidden) acting on [x ; h_prev] for the update
// and reset gates and on [x ; r * h_prev] for the candidate.
struct GruCellParams {
  std::string prefix;
  int input_dim = 0;
  int hidden_dim = 0;

  static GruCellParams Create(ParamStore& store, const std::string& prefix,
                              int input_dim, int hidden_dim, Rng& rng);
  std::string name(const char* suffix) const { return prefix + "/" + suffix; }
};

// h = (1 - z) * h_prev + z * candidate.
Var GruStep(Tape& tape, ParamStore& store, const GruCellParams& p, Var h_prev,
            Var x);

// Runs `p` over the whole sequence from a zero state; returns every hidden.
std::vector<Var> GruForward(Tape& tape, ParamStore& store,
                            const GruCellParams& p, std::span<const Var> seq);

// Position-wise [forward hidden ; backward hidden], width 2 * hidden_dim.
std::vector<Var> BiGruForward(Tape& tape, ParamStore& store,
                              std::span<const Var> seq,
                              const GruCellParams& fwd,
                              const GruCellParams& bwd);

struct AttentionParams {
  std::string prefix;
  int hidden_dim = 0;
  int attention_dim = 0;

  static AttentionParams Create(ParamStore& store, const std::string& prefix,
                                int hidden_dim, int attention_dim, Rng& rng);
};

struct AttentionOutput {
  Var weights;
  Var context;
};

// score_j = w . (W_a tanh(W_h h_j)); weights = softmax(score);
// context = sum_j weights_j h_j.
AttentionOutput Attend(Tape& tape, ParamStore& store, const AttentionParams& p,
                       std::span<const Var> hiddens);

// -sum_k target_k log(max(pred_k, 1e-12)).
Var CrossEntropy(Tape& tape, const std::vector<double>& target, Var pred);

// Plain numeric helpers used outside of training graphs.
std::vector<double> Softmax(std::span<const double> logits);
double CrossEntropy(std::span<const double> target, std::span<const double> pred);
std::vector<double> OneHot(int index, int size);

}  // namespace oppa::nn

#endif  // OPPA_NN_LAYERS_H_
