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

#ifndef OPPA_NN_TAPE_H_
#define OPPA_NN_TAPE_H_

#include <functional>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "oppa/nn/param_store.h"

namespace oppa::nn {

// Handle to a node recorded on a Tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Tape-based reverse-mode differentiation over a fixed op vocabulary.
//
// Every op evaluates eagerly and records a closure that pushes its output
// gradient to its inputs. Parameter leaves are bound to ParamStore entries
// by index; Backward() accumulates into ParamEntry::grad, so callers must
// ZeroGrad() between optimizer steps. A tape is single-use: build, read
// values, optionally call Backward(), then discard.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(std::vector<double> values);
  Var Constant(Tensor value);
  Var Param(ParamStore& store, std::string_view name);
  Var Param(ParamStore& store, int index);

  const Tensor& Value(Var v) const;
  const std::vector<double>& Data(Var v) const { return Value(v).data; }
  double Scalar(Var v) const;
  int Size(Var v) const { return static_cast<int>(Value(v).data.size()); }
  // Gradient of the last Backward() loss with respect to v.
  const std::vector<double>& Grad(Var v) const;

  // Matrix (rows x cols) times vector (cols).
  Var MatVec(Var w, Var x);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Scale(Var a, double c);
  // Vector times a one-element node.
  Var ScaleBy(Var vec, Var scalar);
  Var Tanh(Var a);
  Var Sigmoid(Var a);
  Var Relu(Var a);
  Var Concat(std::span<const Var> parts);
  Var Concat(std::initializer_list<Var> parts) {
    return Concat(std::span<const Var>(parts.begin(), parts.size()));
  }
  // Masked entries get probability exactly zero and receive no gradient.
  Var Softmax(Var a, const std::vector<bool>* mask = nullptr);
  // log(max(x, floor)); the clamped region has zero gradient.
  Var Log(Var a, double floor = 1e-12);
  Var Sum(Var a);
  Var Pick(Var a, int index);
  // Column `index` of a (rows, cols) matrix; embedding lookup.
  Var Column(Var w, int index);
  Var Dot(Var a, Var b) { return Sum(Mul(a, b)); }

  // Reverse sweep from a scalar node.
  void Backward(Var loss);

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Tensor value;
    ParamStore* store = nullptr;
    int param_index = -1;
    bool requires_grad = false;
    std::vector<int> parents;
    std::function<void(Tape&, int)> backward;
  };

  const Node& node(Var v) const;
  Var Push(Tensor value, std::vector<int> parents,
           std::function<void(Tape&, int)> backward);
  std::vector<double>& GradBuffer(int id) { return grads_[id]; }
  const std::vector<double>& ValueOf(int id) const;

  std::vector<Node> nodes_;
  std::vector<std::vector<double>> grads_;
  bool has_backward_ = false;
};

}  // namespace oppa::nn

#endif  // OPPA_NN_TAPE_H_
