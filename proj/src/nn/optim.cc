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

#include "oppa/nn/optim.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oppa::nn {

void AdamStep(ParamStore& store, const AdamOptions& options) {
  for (int i = 0; i < store.size(); ++i) {
    if (!store.at(i).grad.AllFinite()) {
      Fail(ErrorCode::kNonFinite, "non-finite gradient in '", store.at(i).name,
           "'; update skipped");
    }
  }
  const int64_t t = store.step_count() + 1;
  const double correction1 = 1.0 - std::pow(options.beta1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(options.beta2, static_cast<double>(t));
  for (int i = 0; i < store.size(); ++i) {
    ParamEntry& e = store.at(i);
    for (size_t k = 0; k < e.value.data.size(); ++k) {
      const double g = e.grad.data[k];
      double& m = e.moment1.data[k];
      double& v = e.moment2.data[k];
      m = options.beta1 * m + (1.0 - options.beta1) * g;
      v = options.beta2 * v + (1.0 - options.beta2) * g * g;
      const double m_hat = m / correction1;
      const double v_hat = v / correction2;
      e.value.data[k] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
  store.set_step_count(t);
}

void SgdStep(ParamStore& store, double learning_rate) {
  for (int i = 0; i < store.size(); ++i) {
    if (!store.at(i).grad.AllFinite()) {
      Fail(ErrorCode::kNonFinite, "non-finite gradient in '", store.at(i).name,
           "'; update skipped");
    }
  }
  for (int i = 0; i < store.size(); ++i) {
    ParamEntry& e = store.at(i);
    for (size_t k = 0; k < e.value.data.size(); ++k) {
      e.value.data[k] -= learning_rate * e.grad.data[k];
    }
  }
  store.set_step_count(store.step_count() + 1);
}

double ClipGradNorm(ParamStore& store, double max_norm) {
  double sq = 0.0;
  for (const auto& e : store.entries()) {
    for (double g : e.grad.data) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (int i = 0; i < store.size(); ++i) {
      for (double& g : store.at(i).grad.data) g *= scale;
    }
  }
  return norm;
}

double GradCheck(const LossBuilder& build_loss, ParamStore& store,
                 const GradCheckOptions& options) {
  store.ZeroGrad();
  {
    Tape tape;
    Var loss = build_loss(tape, store);
    tape.Backward(loss);
  }
  auto evaluate = [&]() {
    Tape tape;
    return tape.Scalar(build_loss(tape, store));
  };
  Rng rng(options.seed);
  double worst = 0.0;
  for (int i = 0; i < store.size(); ++i) {
    ParamEntry& e = store.at(i);
    const int n = static_cast<int>(e.value.data.size());
    std::vector<int> coords(n);
    std::iota(coords.begin(), coords.end(), 0);
    if (options.max_coords_per_entry > 0 && n > options.max_coords_per_entry) {
      for (int k = 0; k < options.max_coords_per_entry; ++k) {
        std::swap(coords[k], coords[k + UniformInt(rng, n - k)]);
      }
      coords.resize(options.max_coords_per_entry);
    }
    for (int k : coords) {
      const double saved = e.value.data[k];
      e.value.data[k] = saved + options.step;
      const double plus = evaluate();
      e.value.data[k] = saved - options.step;
      const double minus = evaluate();
      e.value.data[k] = saved;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double analytic = e.grad.data[k];
      const double denom = std::max(1e-8, std::abs(analytic) + std::abs(numeric));
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace oppa::nn
