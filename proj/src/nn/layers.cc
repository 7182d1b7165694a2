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

#include "oppa/nn/layers.h"

#include <algorithm>
#include <cmath>

namespace oppa::nn {

Activation ActivationFromString(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  Fail(ErrorCode::kInvalidArgument, "unknown activation '", name, "'");
}

const char* ActivationName(Activation act) {
  switch (act) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
  }
  return "identity";
}

Var DenseForward(Tape& tape, Var x, Var weights, Var bias, Activation act) {
  const Tensor& w = tape.Value(weights);
  const int in = tape.Size(x);
  const int out = tape.Size(bias);
  if (w.shape.size() != 2 || w.shape[0] != out || w.shape[1] != in) {
    Fail(ErrorCode::kDimensionMismatch, "dense: weight shape ",
         ShapeString(w.shape), " does not map input shape ",
         ShapeString(tape.Value(x).shape), " to bias shape ",
         ShapeString(tape.Value(bias).shape));
  }
  Var y = tape.Add(tape.MatVec(weights, x), bias);
  switch (act) {
    case Activation::kIdentity: return y;
    case Activation::kTanh: return tape.Tanh(y);
    case Activation::kRelu: return tape.Relu(y);
  }
  return y;
}

DenseLayer DenseLayer::Create(ParamStore& store, const std::string& prefix,
                              int input_dim, int output_dim, Rng& rng) {
  DenseLayer layer{prefix + "/w", prefix + "/b", input_dim, output_dim};
  store.AddGlorot(layer.weight_name, {output_dim, input_dim}, rng);
  store.Add(layer.bias_name, {output_dim});
  return layer;
}

Var DenseLayer::Forward(Tape& tape, ParamStore& store, Var x,
                        Activation act) const {
  return DenseForward(tape, x, tape.Param(store, weight_name),
                      tape.Param(store, bias_name), act);
}

GruCellParams GruCellParams::Create(ParamStore& store, const std::string& prefix,
                                    int input_dim, int hidden_dim, Rng& rng) {
  GruCellParams p{prefix, input_dim, hidden_dim};
  for (const char* gate : {"z", "r", "h"}) {
    store.AddGlorot(p.name(gate) + "_w", {hidden_dim, input_dim + hidden_dim}, rng);
    store.Add(p.name(gate) + "_b", {hidden_dim});
  }
  return p;
}

Var GruStep(Tape& tape, ParamStore& store, const GruCellParams& p, Var h_prev,
            Var x) {
  if (tape.Size(h_prev) != p.hidden_dim || tape.Size(x) != p.input_dim) {
    Fail(ErrorCode::kDimensionMismatch, "gru '", p.prefix, "': expected h ",
         ShapeString({p.hidden_dim}), " and x ", ShapeString({p.input_dim}),
         ", got ", ShapeString(tape.Value(h_prev).shape), " and ",
         ShapeString(tape.Value(x).shape));
  }
  auto param = [&](const char* gate, const char* kind) {
    return tape.Param(store, p.name(gate) + kind);
  };
  Var xh = tape.Concat({x, h_prev});
  Var z = tape.Sigmoid(tape.Add(tape.MatVec(param("z", "_w"), xh), param("z", "_b")));
  Var r = tape.Sigmoid(tape.Add(tape.MatVec(param("r", "_w"), xh), param("r", "_b")));
  Var xrh = tape.Concat({x, tape.Mul(r, h_prev)});
  Var cand = tape.Tanh(tape.Add(tape.MatVec(param("h", "_w"), xrh), param("h", "_b")));
  return tape.Add(h_prev, tape.Mul(z, tape.Sub(cand, h_prev)));
}

std::vector<Var> GruForward(Tape& tape, ParamStore& store,
                            const GruCellParams& p, std::span<const Var> seq) {
  std::vector<Var> out;
  out.reserve(seq.size());
  Var h = tape.Constant(std::vector<double>(p.hidden_dim, 0.0));
  for (Var x : seq) {
    h = GruStep(tape, store, p, h, x);
    out.push_back(h);
  }
  return out;
}

std::vector<Var> BiGruForward(Tape& tape, ParamStore& store,
                              std::span<const Var> seq,
                              const GruCellParams& fwd,
                              const GruCellParams& bwd) {
  if (seq.empty()) Fail(ErrorCode::kInvalidArgument, "bigru: empty sequence");
  const int in = tape.Size(seq[0]);
  for (Var x : seq) {
    if (tape.Size(x) != in) {
      Fail(ErrorCode::kDimensionMismatch, "bigru: non-uniform input width ",
           tape.Size(x), " vs ", in);
    }
  }
  std::vector<Var> forward = GruForward(tape, store, fwd, seq);
  std::vector<Var> reversed(seq.rbegin(), seq.rend());
  std::vector<Var> backward = GruForward(tape, store, bwd, reversed);
  std::reverse(backward.begin(), backward.end());
  std::vector<Var> out;
  out.reserve(seq.size());
  for (size_t j = 0; j < seq.size(); ++j) {
    out.push_back(tape.Concat({forward[j], backward[j]}));
  }
  return out;
}

AttentionParams AttentionParams::Create(ParamStore& store,
                                        const std::string& prefix,
                                        int hidden_dim, int attention_dim,
                                        Rng& rng) {
  AttentionParams p{prefix, hidden_dim, attention_dim};
  store.AddGlorot(prefix + "/w_h", {attention_dim, hidden_dim}, rng);
  store.AddGlorot(prefix + "/w_a", {attention_dim, attention_dim}, rng);
  // The scoring vector is stored as a 1 x d matrix so it gets a Glorot draw
  // instead of the zero bias initialization.
  store.AddGlorot(prefix + "/w", {1, attention_dim}, rng);
  return p;
}

AttentionOutput Attend(Tape& tape, ParamStore& store, const AttentionParams& p,
                       std::span<const Var> hiddens) {
  if (hiddens.empty()) Fail(ErrorCode::kInvalidArgument, "attention: empty input");
  Var w_h = tape.Param(store, p.prefix + "/w_h");
  Var w_a = tape.Param(store, p.prefix + "/w_a");
  Var w = tape.Param(store, p.prefix + "/w");
  std::vector<Var> scores;
  scores.reserve(hiddens.size());
  for (Var h : hiddens) {
    Var projected = tape.MatVec(w_a, tape.Tanh(tape.MatVec(w_h, h)));
    scores.push_back(tape.MatVec(w, projected));
  }
  Var weights = tape.Softmax(tape.Concat(scores));
  Var context = tape.ScaleBy(hiddens[0], tape.Pick(weights, 0));
  for (size_t j = 1; j < hiddens.size(); ++j) {
    context = tape.Add(context,
                       tape.ScaleBy(hiddens[j], tape.Pick(weights, static_cast<int>(j))));
  }
  return {weights, context};
}

Var CrossEntropy(Tape& tape, const std::vector<double>& target, Var pred) {
  if (static_cast<int>(target.size()) != tape.Size(pred)) {
    Fail(ErrorCode::kDimensionMismatch, "cross entropy: target length ",
         target.size(), " vs prediction length ", tape.Size(pred));
  }
  return tape.Scale(tape.Dot(tape.Constant(target), tape.Log(pred, 1e-12)), -1.0);
}

std::vector<double> Softmax(std::span<const double> logits) {
  if (logits.empty()) Fail(ErrorCode::kInvalidArgument, "softmax of empty vector");
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double CrossEntropy(std::span<const double> target, std::span<const double> pred) {
  if (target.size() != pred.size()) {
    Fail(ErrorCode::kDimensionMismatch, "cross entropy: target length ",
         target.size(), " vs prediction length ", pred.size());
  }
  double target_sum = 0.0, pred_sum = 0.0;
  for (size_t k = 0; k < target.size(); ++k) {
    target_sum += target[k];
    pred_sum += pred[k];
  }
  if (std::abs(target_sum - 1.0) > 1e-6 || std::abs(pred_sum - 1.0) > 1e-6) {
    Fail(ErrorCode::kInvalidArgument,
         "cross entropy: inputs must be distributions (sums ", target_sum,
         " and ", pred_sum, ")");
  }
  double loss = 0.0;
  for (size_t k = 0; k < target.size(); ++k) {
    if (target[k] != 0.0) loss -= target[k] * std::log(std::max(pred[k], 1e-12));
  }
  return loss;
}

std::vector<double> OneHot(int index, int size) {
  if (index < 0 || index >= size) {
    Fail(ErrorCode::kInvalidArgument, "one-hot index ", index,
         " out of range [0, ", size, ")");
  }
  std::vector<double> v(size, 0.0);
  v[index] = 1.0;
  return v;
}

}  // namespace oppa::nn
