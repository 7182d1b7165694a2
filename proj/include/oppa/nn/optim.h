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

#ifndef OPPA_NN_OPTIM_H_
#define OPPA_NN_OPTIM_H_

#include <functional>

#include "oppa/nn/param_store.h"
#include "oppa/nn/tape.h"

namespace oppa::nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam. Increments step_count; leaves grads in place. If any
// gradient is non-finite the store is left untouched and kNonFinite thrown.
void AdamStep(ParamStore& store, const AdamOptions& options = {});

// Plain gradient descent, value -= lr * grad. Same non-finite guard as Adam.
void SgdStep(ParamStore& store, double learning_rate);

// Optional global-norm clipping applied to grads before a step.
double ClipGradNorm(ParamStore& store, double max_norm);

// Builds a scalar loss on a fresh tape from the current store values.
using LossBuilder = std::function<Var(Tape&, ParamStore&)>;

struct GradCheckOptions {
  double step = 1e-5;
  // Upper bound on checked coordinates per entry; 0 checks every coordinate.
  int max_coords_per_entry = 0;
  uint64_t seed = 0;
};

// Central finite differences against the tape gradient. Returns
// max over coordinates of |a - n| / max(1e-8, |a| + |n|).
double GradCheck(const LossBuilder& build_loss, ParamStore& store,
                 const GradCheckOptions& options = {});

}  // namespace oppa::nn

#endif  // OPPA_NN_OPTIM_H_
