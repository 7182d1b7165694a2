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

#include "oppa/nn/tape.h"

#include <algorithm>
#include <cmath>
#include <utility>

namespace oppa::nn {

namespace {

void CheckSameLength(const Tensor& a, const Tensor& b, const char* op) {
  if (a.data.size() != b.data.size()) {
    Fail(ErrorCode::kDimensionMismatch, op, ": shapes ", ShapeString(a.shape),
         " and ", ShapeString(b.shape), " differ");
  }
}

}  // namespace

const Tape::Node& Tape::node(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
    Fail(ErrorCode::kFailedPrecondition, "variable ", v.id,
         " was not recorded on this tape");
  }
  return nodes_[v.id];
}

const std::vector<double>& Tape::ValueOf(int id) const {
  const Node& n = nodes_[id];
  if (n.store != nullptr) return n.store->at(n.param_index).value.data;
  return n.value.data;
}

const Tensor& Tape::Value(Var v) const {
  const Node& n = node(v);
  if (n.store != nullptr) return n.store->at(n.param_index).value;
  return n.value;
}

double Tape::Scalar(Var v) const {
  const Tensor& t = Value(v);
  if (t.data.size() != 1) {
    Fail(ErrorCode::kDimensionMismatch, "expected a scalar, got shape ",
         ShapeString(t.shape));
  }
  return t.data[0];
}

const std::vector<double>& Tape::Grad(Var v) const {
  node(v);
  if (!has_backward_) {
    Fail(ErrorCode::kFailedPrecondition, "no backward pass has been run");
  }
  return grads_[v.id];
}

Var Tape::Push(Tensor value, std::vector<int> parents,
               std::function<void(Tape&, int)> backward) {
  Node n;
  n.value = std::move(value);
  for (int p : parents) n.requires_grad = n.requires_grad || nodes_[p].requires_grad;
  n.parents = std::move(parents);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::Constant(std::vector<double> values) {
  return Constant(Tensor::Vector(std::move(values)));
}

Var Tape::Constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::Param(ParamStore& store, std::string_view name) {
  return Param(store, store.IndexOf(name));
}

Var Tape::Param(ParamStore& store, int index) {
  store.at(index);  // bounds check
  Node n;
  n.store = &store;
  n.param_index = index;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::MatVec(Var w, Var x) {
  const Tensor& wt = Value(w);
  const Tensor& xt = Value(x);
  if (wt.shape.size() != 2 || wt.shape[1] != static_cast<int>(xt.data.size())) {
    Fail(ErrorCode::kDimensionMismatch, "matvec: weight shape ",
         ShapeString(wt.shape), " incompatible with input shape ",
         ShapeString(xt.shape));
  }
  const int rows = wt.shape[0];
  const int cols = wt.shape[1];
  std::vector<double> out(rows, 0.0);
  const double* wd = wt.data.data();
  const double* xd = xt.data.data();
  for (int r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = wd + static_cast<size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += row[c] * xd[c];
    out[r] = acc;
  }
  const int wi = w.id, xi = x.id;
  return Push(Tensor::Vector(std::move(out)), {wi, xi},
              [wi, xi, rows, cols](Tape& t, int self) {
                const std::vector<double>& g = t.grads_[self];
                const std::vector<double>& wv = t.ValueOf(wi);
                const std::vector<double>& xv = t.ValueOf(xi);
                if (t.nodes_[wi].requires_grad) {
                  std::vector<double>& gw = t.grads_[wi];
                  for (int r = 0; r < rows; ++r) {
                    const double gr = g[r];
                    if (gr == 0.0) continue;
                    double* row = gw.data() + static_cast<size_t>(r) * cols;
                    for (int c = 0; c < cols; ++c) row[c] += gr * xv[c];
                  }
                }
                if (t.nodes_[xi].requires_grad) {
                  std::vector<double>& gx = t.grads_[xi];
                  for (int r = 0; r < rows; ++r) {
                    const double gr = g[r];
                    if (gr == 0.0) continue;
                    const double* row = wv.data() + static_cast<size_t>(r) * cols;
                    for (int c = 0; c < cols; ++c) gx[c] += gr * row[c];
                  }
                }
              });
}

Var Tape::Add(Var a, Var b) {
  const Tensor& at = Value(a);
  const Tensor& bt = Value(b);
  CheckSameLength(at, bt, "add");
  std::vector<double> out(at.data.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = at.data[i] + bt.data[i];
  const int ai = a.id, bi = b.id;
  return Push(Tensor::Vector(std::move(out)), {ai, bi}, [ai, bi](Tape& t, int self) {
    const auto& g = t.grads_[self];
    for (int p : {ai, bi}) {
      if (!t.nodes_[p].requires_grad) continue;
      auto& gp = t.grads_[p];
      for (size_t i = 0; i < g.size(); ++i) gp[i] += g[i];
    }
  });
}

Var Tape::Sub(Var a, Var b) {
  const Tensor& at = Value(a);
  const Tensor& bt = Value(b);
  CheckSameLength(at, bt, "sub");
  std::vector<double> out(at.data.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = at.data[i] - bt.data[i];
  const int ai = a.id, bi = b.id;
  return Push(Tensor::Vector(std::move(out)), {ai, bi}, [ai, bi](Tape& t, int self) {
    const auto& g = t.grads_[self];
    if (t.nodes_[ai].requires_grad) {
      auto& ga = t.grads_[ai];
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.nodes_[bi].requires_grad) {
      auto& gb = t.grads_[bi];
      for (size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Var Tape::Mul(Var a, Var b) {
  const Tensor& at = Value(a);
  const Tensor& bt = Value(b);
  CheckSameLength(at, bt, "mul");
  std::vector<double> out(at.data.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = at.data[i] * bt.data[i];
  const int ai = a.id, bi = b.id;
  return Push(Tensor::Vector(std::move(out)), {ai, bi}, [ai, bi](Tape& t, int self) {
    const auto& g = t.grads_[self];
    const auto& av = t.ValueOf(ai);
    const auto& bv = t.ValueOf(bi);
    if (t.nodes_[ai].requires_grad) {
      auto& ga = t.grads_[ai];
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (t.nodes_[bi].requires_grad) {
      auto& gb = t.grads_[bi];
      for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var Tape::Scale(Var a, double c) {
  const Tensor& at = Value(a);
  std::vector<double> out(at.data.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = at.data[i] * c;
  const int ai = a.id;
  return Push(Tensor(at.shape, std::move(out)), {ai}, [ai, c](Tape& t, int self) {
    const auto& g = t.grads_[self];
    auto& ga = t.grads_[ai];
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * c;
  });
}

Var Tape::ScaleBy(Var vec, Var scalar) {
  const Tensor& vt = Value(vec);
  const double s = Scalar(scalar);
  std::vector<double> out(vt.data.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = vt.data[i] * s;
  const int vi = vec.id, si = scalar.id;
  return Push(Tensor::Vector(std::move(out)), {vi, si}, [vi, si](Tape& t, int self) {
    const auto& g = t.grads_[self];
    const auto& vv = t.ValueOf(vi);
    const double sv = t.ValueOf(si)[0];
    if (t.nodes_[vi].requires_grad) {
      auto& gv = t.grads_[vi];
      for (size_t i = 0; i < g.size(); ++i) gv[i] += g[i] * sv;
    }
    if (t.nodes_[si].requires_grad) {
      double acc = 0.0;
      for (size_t i = 0; i < g.size(); ++i) acc += g[i] * vv[i];
      t.grads_[si][0] += acc;
    }
  });
}

Var Tape::Tanh(Var a) {
  const Tensor& at = Value(a);
  std::vector<double> out(at.data.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(at.data[i]);
  const int ai = a.id;
  Var v = Push(Tensor::Vector(std::move(out)), {ai}, nullptr);
  if (nodes_[v.id].requires_grad) {
    nodes_[v.id].backward = [ai](Tape& t, int self) {
      const auto& g = t.grads_[self];
      const auto& y = t.nodes_[self].value.data;
      auto& ga = t.grads_[ai];
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
    };
  }
  return v;
}

Var Tape::Sigmoid(Var a) {
  const Tensor& at = Value(a);
  std::vector<double> out(at.data.size());
  for (size_t i = 0; i < out.size(); ++i) {
    const double x = at.data[i];
    // Branches keep exp() from overflowing for large |x|.
    out[i] = x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                    : std::exp(x) / (1.0 + std::exp(x));
  }
  const int ai = a.id;
  Var v = Push(Tensor::Vector(std::move(out)), {ai}, nullptr);
  if (nodes_[v.id].requires_grad) {
    nodes_[v.id].backward = [ai](Tape& t, int self) {
      const auto& g = t.grads_[self];
      const auto& y = t.nodes_[self].value.data;
      auto& ga = t.grads_[ai];
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
    };
  }
  return v;
}

Var Tape::Relu(Var a) {
  const Tensor& at = Value(a);
  std::vector<double> out(at.data.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = at.data[i] > 0 ? at.data[i] : 0.0;
  const int ai = a.id;
  return Push(Tensor::Vector(std::move(out)), {ai}, [ai](Tape& t, int self) {
    const auto& g = t.grads_[self];
    const auto& x = t.ValueOf(ai);
    auto& ga = t.grads_[ai];
    for (size_t i = 0; i < g.size(); ++i) {
      if (x[i] > 0) ga[i] += g[i];
    }
  });
}

Var Tape::Concat(std::span<const Var> parts) {
  if (parts.empty()) Fail(ErrorCode::kInvalidArgument, "concat of nothing");
  std::vector<double> out;
  std::vector<int> ids;
  std::vector<int> offsets;
  for (Var p : parts) {
    const Tensor& pt = Value(p);
    offsets.push_back(static_cast<int>(out.size()));
    out.insert(out.end(), pt.data.begin(), pt.data.end());
    ids.push_back(p.id);
  }
  std::vector<int> parents = ids;
  return Push(Tensor::Vector(std::move(out)), std::move(parents),
              [ids, offsets](Tape& t, int self) {
                const auto& g = t.grads_[self];
                for (size_t k = 0; k < ids.size(); ++k) {
                  if (!t.nodes_[ids[k]].requires_grad) continue;
                  auto& gp = t.grads_[ids[k]];
                  for (size_t i = 0; i < gp.size(); ++i) gp[i] += g[offsets[k] + i];
                }
              });
}

Var Tape::Softmax(Var a, const std::vector<bool>* mask) {
  const Tensor& at = Value(a);
  const size_t n = at.data.size();
  if (mask != nullptr && mask->size() != n) {
    Fail(ErrorCode::kDimensionMismatch, "softmax mask length ", mask->size(),
         " vs logits ", n);
  }
  auto on = [mask](size_t i) { return mask == nullptr || (*mask)[i]; };
  double mx = -INFINITY;
  for (size_t i = 0; i < n; ++i) {
    if (on(i)) mx = std::max(mx, at.data[i]);
  }
  if (!std::isfinite(mx)) {
    Fail(ErrorCode::kInvalidArgument, "softmax over an empty or non-finite set");
  }
  std::vector<double> out(n, 0.0);
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (!on(i)) continue;
    out[i] = std::exp(at.data[i] - mx);
    total += out[i];
  }
  for (double& v : out) v /= total;
  const int ai = a.id;
  Var v = Push(Tensor::Vector(std::move(out)), {ai}, nullptr);
  if (nodes_[v.id].requires_grad) {
    nodes_[v.id].backward = [ai](Tape& t, int self) {
      const auto& g = t.grads_[self];
      const auto& p = t.nodes_[self].value.data;
      double dot = 0.0;
      for (size_t i = 0; i < g.size(); ++i) dot += g[i] * p[i];
      auto& ga = t.grads_[ai];
      for (size_t i = 0; i < g.size(); ++i) ga[i] += p[i] * (g[i] - dot);
    };
  }
  return v;
}

Var Tape::Log(Var a, double floor) {
  const Tensor& at = Value(a);
  std::vector<double> out(at.data.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::log(std::max(at.data[i], floor));
  const int ai = a.id;
  return Push(Tensor::Vector(std::move(out)), {ai}, [ai, floor](Tape& t, int self) {
    const auto& g = t.grads_[self];
    const auto& x = t.ValueOf(ai);
    auto& ga = t.grads_[ai];
    for (size_t i = 0; i < g.size(); ++i) {
      if (x[i] > floor) ga[i] += g[i] / x[i];
    }
  });
}

Var Tape::Sum(Var a) {
  const Tensor& at = Value(a);
  double acc = 0.0;
  for (double v : at.data) acc += v;
  const int ai = a.id;
  return Push(Tensor::Vector({acc}), {ai}, [ai](Tape& t, int self) {
    const double g = t.grads_[self][0];
    for (double& v : t.grads_[ai]) v += g;
  });
}

Var Tape::Pick(Var a, int index) {
  const Tensor& at = Value(a);
  if (index < 0 || index >= static_cast<int>(at.data.size())) {
    Fail(ErrorCode::kDimensionMismatch, "pick index ", index,
         " out of range for shape ", ShapeString(at.shape));
  }
  const int ai = a.id;
  return Push(Tensor::Vector({at.data[index]}), {ai}, [ai, index](Tape& t, int self) {
    t.grads_[ai][index] += t.grads_[self][0];
  });
}

Var Tape::Column(Var w, int index) {
  const Tensor& wt = Value(w);
  if (wt.shape.size() != 2 || index < 0 || index >= wt.shape[1]) {
    Fail(ErrorCode::kDimensionMismatch, "column ", index, " out of range for shape ",
         ShapeString(wt.shape));
  }
  const int rows = wt.shape[0];
  const int cols = wt.shape[1];
  std::vector<double> out(rows);
  for (int r = 0; r < rows; ++r) out[r] = wt.data[static_cast<size_t>(r) * cols + index];
  const int wi = w.id;
  return Push(Tensor::Vector(std::move(out)), {wi},
              [wi, index, rows, cols](Tape& t, int self) {
                if (!t.nodes_[wi].requires_grad) return;
                const std::vector<double>& g = t.grads_[self];
                std::vector<double>& gw = t.grads_[wi];
                for (int r = 0; r < rows; ++r) gw[static_cast<size_t>(r) * cols + index] += g[r];
              });
}

void Tape::Backward(Var loss) {
  if (nodes_.empty()) {
    Fail(ErrorCode::kFailedPrecondition,
         "backward called before any forward computation was recorded");
  }
  const Node& root = node(loss);
  if (Value(loss).data.size() != 1) {
    Fail(ErrorCode::kDimensionMismatch, "backward needs a scalar loss, got shape ",
         ShapeString(Value(loss).shape));
  }
  grads_.assign(nodes_.size(), {});
  for (int i = 0; i <= loss.id; ++i) {
    if (nodes_[i].requires_grad) grads_[i].assign(ValueOf(i).size(), 0.0);
  }
  has_backward_ = true;
  if (!root.requires_grad) return;
  grads_[loss.id][0] = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad) continue;
    if (n.store != nullptr) {
      auto& dst = n.store->at(n.param_index).grad.data;
      const auto& g = grads_[i];
      for (size_t k = 0; k < g.size(); ++k) dst[k] += g[k];
    } else if (n.backward) {
      n.backward(*this, i);
    }
  }
}

}  // namespace oppa::nn
