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


#include "oppa/policy/reinforce.h"

#include <filesystem>
#include <fstream>

#include "oppa/nn/checkpoint.h"
#include "oppa/nn/optim.h"

namespace oppa::policy {

namespace fs = std::filesystem;
using nlohmann::json;
using nn::Activation;

namespace {

const std::vector<bool>* MaskOf(const std::vector<bool>& legal) {
  return legal.empty() ? nullptr : &legal;
}

}  // namespace

PolicyNetwork::PolicyNetwork(int state_dim, int num_actions, int hidden, Rng& rng)
    : state_dim_(state_dim), num_actions_(num_actions) {
  l1_ = nn::DenseLayer::Create(params_, "pg/l1", state_dim, hidden, rng);
  l2_ = nn::DenseLayer::Create(params_, "pg/l2", hidden, num_actions, rng);
}

Var PolicyNetwork::Forward(Tape& tape, ParamStore& store, const std::vector<double>& state,
                           const std::vector<bool>* mask) const {
  if (static_cast<int>(state.size()) != state_dim_) {
    Fail(ErrorCode::kDimensionMismatch, "policy state has length ", state.size(),
         ", expected ", state_dim_);
  }
  Var h = l1_.Forward(tape, store, tape.Constant(state), Activation::kRelu);
  return tape.Softmax(l2_.Forward(tape, store, h, Activation::kIdentity),
                      mask && !mask->empty() ? mask : nullptr);
}

std::vector<double> PolicyNetwork::Distribution(const std::vector<double>& state,
                                                const std::vector<bool>& legal) const {
  Tape tape;
  return tape.Data(Forward(tape, const_cast<ParamStore&>(params_), state, MaskOf(legal)));
}

std::vector<double> DiscountedReturns(const PgEpisode& episode, double gamma) {
  std::vector<double> g(episode.size());
  double acc = 0.0;
  for (int t = static_cast<int>(episode.size()) - 1; t >= 0; --t) {
    acc = episode[t].reward + gamma * acc;
    g[t] = acc;
  }
  return g;
}

Var ReinforceLoss(Tape& tape, const PolicyNetwork& policy, ParamStore& store,
                  std::span<const PgEpisode> episodes, double gamma) {
  if (episodes.empty()) Fail(ErrorCode::kInvalidArgument, "REINFORCE on an empty batch");
  std::vector<std::vector<double>> returns;
  double sum = 0.0;
  int n = 0;
  for (const PgEpisode& ep : episodes) {
    if (ep.empty()) Fail(ErrorCode::kInvalidArgument, "REINFORCE on an empty episode");
    returns.push_back(DiscountedReturns(ep, gamma));
    for (double g : returns.back()) sum += g;
    n += static_cast<int>(ep.size());
  }
  const double baseline = sum / n;
  Var loss;
  for (size_t e = 0; e < episodes.size(); ++e) {
    for (size_t t = 0; t < episodes[e].size(); ++t) {
      const PgStep& step = episodes[e][t];
      Var p = policy.Forward(tape, store, step.state, MaskOf(step.legal));
      Var term = tape.Scale(tape.Log(tape.Pick(p, step.action)),
                            -(returns[e][t] - baseline) / n);
      loss = loss.valid() ? tape.Add(loss, term) : term;
    }
  }
  return loss;
}

double ReinforceUpdate(PolicyNetwork& policy, std::span<const PgEpisode> episodes,
                       double gamma, double learning_rate, double grad_clip) {
  Tape tape;
  policy.params().ZeroGrad();
  Var loss = ReinforceLoss(tape, policy, policy.params(), episodes, gamma);
  tape.Backward(loss);
  if (grad_clip > 0.0) nn::ClipGradNorm(policy.params(), grad_clip);
  nn::SgdStep(policy.params(), learning_rate);
  return tape.Scalar(loss);
}

// ---------------------------------------------------------------------------

namespace {

PolicyNetwork MakePolicy(const TrainingConfig& c, int state_dim, int num_actions) {
  Rng rng(StreamSeed(c.seed, Stream::kPolicyInit));
  return PolicyNetwork(state_dim, num_actions, c.hidden, rng);
}

}  // namespace

ReinforceAgent::ReinforceAgent(const TrainingConfig& config, int state_dim, int num_actions)
    : config_(config), policy_(MakePolicy(config, state_dim, num_actions)) {
  config_.Validate();
}

int ReinforceAgent::Act(const std::vector<double>& state,
                        const std::vector<bool>& legal) const {
  const int a = ArgMax(policy_.Distribution(state, legal), MaskOf(legal));
  if (a < 0) Fail(ErrorCode::kInvalidArgument, "no legal action");
  return a;
}

int ReinforceAgent::Sample(const std::vector<double>& state, const std::vector<bool>& legal,
                           Rng& rng) const {
  const std::vector<double> p = policy_.Distribution(state, legal);
  const double u = UniformUnit(rng);
  double cum = 0.0;
  int chosen = -1;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    chosen = static_cast<int>(i);
    cum += p[i];
    if (u < cum) break;
  }
  if (chosen < 0) Fail(ErrorCode::kInvalidArgument, "no legal action");
  return chosen;
}

void ReinforceAgent::Save(const std::string& dir) const {
  fs::create_directories(dir);
  nn::SaveCheckpoint(policy_.params(), (fs::path(dir) / "policy").string(),
                     nlohmann::ordered_json{{"role", "reinforce-policy"}});
  nlohmann::ordered_json j;
  j["format"] = "reinforce-agent";
  j["version"] = 1;
  j["state_dim"] = policy_.state_dim();
  j["num_actions"] = policy_.num_actions();
  j["config"] = TrainingConfigToJson(config_);
  std::ofstream out(fs::path(dir) / "agent.json", std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write ", (fs::path(dir) / "agent.json").string());
  out << j.dump(2) << "\n";
}

ReinforceAgent ReinforceAgent::Load(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "agent.json", std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "missing ", (fs::path(dir) / "agent.json").string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kCorruptManifest, "unparsable agent.json: ", ex.what());
  }
  if (j.value("format", "") != "reinforce-agent") {
    Fail(ErrorCode::kCorruptManifest, "agent.json is not a reinforce-agent manifest");
  }
  try {
    ReinforceAgent agent(TrainingConfigFromJson(j.at("config")), j.at("state_dim").get<int>(),
                         j.at("num_actions").get<int>());
    nn::LoadCheckpointInto(agent.policy_.params(), (fs::path(dir) / "policy").string());
    return agent;
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kCorruptManifest, "malformed agent.json: ", ex.what());
  }
}

// ---------------------------------------------------------------------------

ReinforceTrainer::ReinforceTrainer(const TrainingConfig& config, envs::DialogueEnv& env)
    : config_(config),
      env_(env),
      agent_(config, env.state_dim(), env.target_catalog().size()),
      rng_(StreamSeed(config.seed, Stream::kTraining)) {}

PretrainReport ReinforceTrainer::Pretrain(const std::vector<PretrainExample>& corpus) {
  if (corpus.empty()) Fail(ErrorCode::kInvalidArgument, "pretraining corpus is empty");
  PretrainReport report;
  report.examples = static_cast<int>(corpus.size());
  PolicyNetwork& pi = agent_.policy();
  std::vector<int> order(corpus.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  nn::AdamOptions opts;
  opts.learning_rate = config_.learning_rate;
  for (int epoch = 0; epoch < config_.pretrain_epochs; ++epoch) {
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
      std::swap(order[i], order[UniformInt(rng_, i + 1)]);
    }
    double total = 0.0;
    for (size_t start = 0; start < order.size(); start += config_.pretrain_batch) {
      const size_t end = std::min(order.size(), start + config_.pretrain_batch);
      Tape tape;
      pi.params().ZeroGrad();
      Var loss;
      for (size_t k = start; k < end; ++k) {
        const PretrainExample& ex = corpus[order[k]];
        Var p = pi.Forward(tape, pi.params(), ex.state, MaskOf(ex.legal));
        Var term = RegLoss(tape, p, ex.target_action, 1.0);
        loss = loss.valid() ? tape.Add(loss, term) : term;
      }
      loss = tape.Scale(loss, 1.0 / static_cast<double>(end - start));
      tape.Backward(loss);
      if (config_.grad_clip > 0.0) nn::ClipGradNorm(pi.params(), config_.grad_clip);
      nn::AdamStep(pi.params(), opts);
      total += tape.Scalar(loss) * (end - start);
    }
    report.q_loss = total / corpus.size();
  }
  int hits = 0;
  for (const auto& ex : corpus) hits += agent_.Act(ex.state, ex.legal) == ex.target_action;
  report.q_accuracy = static_cast<double>(hits) / corpus.size();
  return report;
}

EpisodeStats ReinforceTrainer::TrainIteration() {
  EpisodeStats stats;
  stats.episode = episode_;
  env_.Reset(EpisodeSeed(config_.seed, static_cast<uint64_t>(episode_)));
  PgEpisode ep;
  while (!env_.done()) {
    PgStep step;
    step.state = env_.Observe();
    step.legal = env_.LegalMask();
    step.action = agent_.Sample(step.state, step.legal, rng_);
    step.reward = env_.Step(step.action).reward;
    stats.actions.push_back(step.action);
    stats.reward += step.reward;
    ep.push_back(std::move(step));
  }
  stats.record = env_.record();
  stats.turns = stats.record.turns;
  stats.success = EpisodeSucceeded(stats.record);
  if (!ep.empty()) pending_.push_back(std::move(ep));
  if (static_cast<int>(pending_.size()) >= config_.reinforce_batch) {
    stats.q_loss = ReinforceUpdate(agent_.policy(), pending_, config_.gamma_q,
                                   config_.reinforce_learning_rate, config_.grad_clip);
    stats.updates = 1;
    pending_.clear();
  }
  ++episode_;
  return stats;
}

envs::SessionRecord ReinforceTrainer::Evaluate(uint64_t episode_seed) {
  env_.Reset(episode_seed);
  while (!env_.done()) env_.Step(agent_.Act(env_.Observe(), env_.LegalMask()));
  return env_.record();
}

}  // namespace oppa::policy
