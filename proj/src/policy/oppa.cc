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

#include "oppa/policy/oppa.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "oppa/nn/checkpoint.h"

namespace oppa::policy {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool Legal(const std::vector<bool>* mask, int i) {
  return mask == nullptr || mask->empty() || (*mask)[i];
}

std::vector<double> MaskedSoftmax(const std::vector<double>& logits, double tau,
                                  const std::vector<bool>* mask) {
  double hi = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < logits.size(); ++i) {
    if (Legal(mask, static_cast<int>(i))) hi = std::max(hi, logits[i] / tau);
  }
  if (!std::isfinite(hi)) Fail(ErrorCode::kInvalidArgument, "no legal action to sample");
  std::vector<double> p(logits.size(), 0.0);
  double z = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    if (!Legal(mask, static_cast<int>(i))) continue;
    p[i] = std::exp(logits[i] / tau - hi);
    z += p[i];
  }
  for (double& x : p) x /= z;
  return p;
}

const std::vector<bool>* MaskOrNull(const std::vector<bool>& mask) {
  return mask.empty() ? nullptr : &mask;
}

void Shuffle(std::vector<int>& v, Rng& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    std::swap(v[i], v[UniformInt(rng, i + 1)]);
  }
}

Var MeanOf(Tape& tape, const std::vector<Var>& terms) {
  Var acc = terms.front();
  for (size_t i = 1; i < terms.size(); ++i) acc = tape.Add(acc, terms[i]);
  return tape.Scale(acc, 1.0 / static_cast<double>(terms.size()));
}

}  // namespace

// ---------------------------------------------------------------------------

Candidate SampleCandidate(const std::vector<double>& q_values, double tau, Rng* rng,
                          const std::vector<bool>* mask) {
  if (!(tau > 0.0)) Fail(ErrorCode::kInvalidArgument, "tau must be > 0, got ", tau);
  Candidate out;
  out.dist = MaskedSoftmax(q_values, tau, mask);
  if (rng == nullptr) {
    out.action = ArgMax(out.dist, mask && !mask->empty() ? mask : nullptr);
    return out;
  }
  const double u = UniformUnit(*rng);
  double cum = 0.0;
  for (size_t i = 0; i < out.dist.size(); ++i) {
    if (out.dist[i] <= 0.0) continue;
    out.action = static_cast<int>(i);
    cum += out.dist[i];
    if (u < cum) break;
  }
  return out;
}

Candidate SampleCandidate(const std::vector<double>& state, const QFunction& q,
                          int placeholder, double tau, Rng* rng,
                          const std::vector<bool>* mask) {
  return SampleCandidate(q.Values(state, OneHotWeights(placeholder, q.num_opposite())), tau,
                         rng, mask);
}

OppositeEstimate EstimateOpposite(const std::vector<double>& state, int candidate,
                                  const OppositeEstimator& estimator) {
  OppositeEstimate out;
  out.dist = estimator.Distribution(state, candidate);
  out.action = ArgMax(out.dist);
  return out;
}

std::vector<double> AugmentState(const std::vector<double>& state, int opposite,
                                 const QFunction& q) {
  return q.Augment(state, OneHotWeights(opposite, q.num_opposite()));
}

int SelectAction(const std::vector<double>& q_values, double epsilon, Rng& rng,
                 const std::vector<bool>* mask) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "epsilon must lie in [0,1], got ", epsilon);
  }
  const std::vector<bool>* m = mask && !mask->empty() ? mask : nullptr;
  if (UniformUnit(rng) < epsilon) {
    std::vector<int> legal;
    for (int i = 0; i < static_cast<int>(q_values.size()); ++i) {
      if (Legal(m, i)) legal.push_back(i);
    }
    if (legal.empty()) Fail(ErrorCode::kInvalidArgument, "no legal action to select");
    return legal[UniformInt(rng, static_cast<int>(legal.size()))];
  }
  const int a = ArgMax(q_values, m);
  if (a < 0) Fail(ErrorCode::kInvalidArgument, "no legal action to select");
  return a;
}

double BellmanTarget(double reward, bool done, double max_next_q, double gamma_q) {
  if (!(gamma_q >= 0.0 && gamma_q <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "gamma_q must lie in [0,1], got ", gamma_q);
  }
  return done ? reward : reward + gamma_q * max_next_q;
}

double BellmanTarget(double reward, const std::vector<double>& next_state,
                     const std::vector<double>& next_opposite, bool done, const QFunction& q,
                     double gamma_q, const std::vector<bool>* next_legal) {
  if (done) return BellmanTarget(reward, true, 0.0, gamma_q);
  const std::vector<double> values = q.Values(next_state, next_opposite, true);
  const std::vector<bool>* m = next_legal && !next_legal->empty() ? next_legal : nullptr;
  const int best = ArgMax(values, m);
  if (best < 0) Fail(ErrorCode::kInvalidArgument, "no legal action in the next state");
  return BellmanTarget(reward, false, values[best], gamma_q);
}

double DqnLoss(const std::vector<double>& predicted, const std::vector<double>& targets) {
  if (predicted.empty() || predicted.size() != targets.size()) {
    Fail(ErrorCode::kInvalidArgument, "DQN loss needs equal non-empty batches, got ",
         predicted.size(), " and ", targets.size());
  }
  double acc = 0.0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    const double d = targets[i] - predicted[i];
    acc += d * d;
  }
  return acc / static_cast<double>(predicted.size());
}

Var DqnLoss(Tape& tape, QFunction& q, std::span<const Transition* const> batch,
            double gamma_q) {
  if (batch.empty()) Fail(ErrorCode::kInvalidArgument, "DQN loss on an empty batch");
  std::vector<Var> terms;
  terms.reserve(batch.size());
  for (const Transition* t : batch) {
    const double y = BellmanTarget(t->reward, t->next_state, t->next_opposite, t->done, q,
                                   gamma_q, &t->next_legal);
    Var pred = tape.Pick(q.Forward(tape, q.params(), t->state, t->opposite), t->action);
    Var diff = tape.Sub(pred, tape.Constant(std::vector<double>{y}));
    terms.push_back(tape.Mul(diff, diff));
  }
  return MeanOf(tape, terms);
}

double RegLoss(const std::vector<double>& dist, int executed, double beta) {
  if (beta < 0.0) Fail(ErrorCode::kInvalidArgument, "beta must be >= 0");
  if (executed < 0 || executed >= static_cast<int>(dist.size())) {
    Fail(ErrorCode::kInvalidArgument, "executed action ", executed, " outside distribution");
  }
  if (beta == 0.0) return 0.0;
  return -beta * std::log(std::max(dist[executed], 1e-12));
}

Var RegLoss(Tape& tape, Var dist, int executed, double beta) {
  if (beta < 0.0) Fail(ErrorCode::kInvalidArgument, "beta must be >= 0");
  return tape.Scale(tape.Log(tape.Pick(dist, executed)), -beta);
}

double DecayBeta(double beta, double gamma_beta) {
  if (!(gamma_beta > 0.0 && gamma_beta <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "gamma_beta must lie in (0,1], got ", gamma_beta);
  }
  return beta * gamma_beta;
}

double TotalLoss(double l1, double l2, double w1, double w2) { return w1 * l1 + w2 * l2; }

std::vector<double> OneHotWeights(int index, int size) {
  if (index < 0 || index >= size) {
    Fail(ErrorCode::kInvalidArgument, "opposite act ", index, " outside [0, ", size, ")");
  }
  std::vector<double> w(size, 0.0);
  w[index] = 1.0;
  return w;
}

uint64_t StreamSeed(uint64_t seed, Stream stream) {
  return EpisodeSeed(seed ^ 0x6F707061ULL, static_cast<uint64_t>(stream));
}

// ---------------------------------------------------------------------------

namespace {

QFunction MakeQ(const TrainingConfig& c, int state_dim, int num_actions, int num_opposite) {
  Rng rng(StreamSeed(c.seed, Stream::kQInit));
  return QFunction(state_dim, num_actions, num_opposite, c.hidden, c.emb_dim, rng);
}

OppositeEstimator MakeEstimator(const TrainingConfig& c, int state_dim, int num_actions,
                                int num_opposite) {
  Rng rng(StreamSeed(c.seed, Stream::kEstimatorInit));
  return OppositeEstimator(state_dim, num_actions, num_opposite, c.estimator_hidden, rng);
}

}  // namespace

OppaAgent::OppaAgent(const TrainingConfig& config, int state_dim, int num_actions,
                     int num_opposite, int placeholder)
    : config_(config),
      placeholder_(placeholder),
      beta_(config.beta0),
      q_(MakeQ(config, state_dim, num_actions, num_opposite)),
      estimator_(MakeEstimator(config, state_dim, num_actions, num_opposite)) {
  config_.Validate();
  if (placeholder < 0 || placeholder >= num_opposite) {
    Fail(ErrorCode::kInvalidArgument, "placeholder ", placeholder,
         " outside the opposite catalog of size ", num_opposite);
  }
}

Decision OppaAgent::Decide(const std::vector<double>& state, const std::vector<bool>& legal,
                           double epsilon, Rng* rng) const {
  const std::vector<bool>* mask = MaskOrNull(legal);
  Decision d;
  if (config_.use_obe) {
    const Candidate cand = SampleCandidate(state, q_, placeholder_, config_.tau, rng, mask);
    const OppositeEstimate est = EstimateOpposite(state, cand.action, estimator_);
    d.candidate = cand.action;
    d.opposite_estimate = est.action;
    d.opposite_weights =
        config_.soft_opposite ? est.dist : OneHotWeights(est.action, q_.num_opposite());
  } else {
    d.opposite_weights = OneHotWeights(placeholder_, q_.num_opposite());
  }
  const std::vector<double> values = q_.Values(state, d.opposite_weights);
  if (rng != nullptr) {
    d.action = SelectAction(values, epsilon, *rng, mask);
  } else {
    d.action = ArgMax(values, mask);
    if (d.action < 0) Fail(ErrorCode::kInvalidArgument, "no legal action");
  }
  return d;
}

void OppaAgent::Save(const std::string& dir) const {
  fs::create_directories(dir);
  const nlohmann::ordered_json meta = {{"role", "oppa-agent"}};
  nn::SaveCheckpoint(q_.params(), (fs::path(dir) / "q").string(), meta);
  nn::SaveCheckpoint(q_.target_params(), (fs::path(dir) / "q_target").string(), meta);
  nn::SaveCheckpoint(estimator_.params(), (fs::path(dir) / "estimator").string(), meta);
  nlohmann::ordered_json j;
  j["format"] = "oppa-agent";
  j["version"] = 1;
  j["state_dim"] = q_.state_dim();
  j["num_actions"] = q_.num_actions();
  j["num_opposite"] = q_.num_opposite();
  j["placeholder"] = placeholder_;
  j["beta"] = beta_;
  j["config"] = TrainingConfigToJson(config_);
  std::ofstream out(fs::path(dir) / "agent.json", std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write ", (fs::path(dir) / "agent.json").string());
  out << j.dump(2) << "\n";
}

OppaAgent OppaAgent::Load(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "agent.json", std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "missing ", (fs::path(dir) / "agent.json").string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kCorruptManifest, "unparsable agent.json: ", ex.what());
  }
  if (j.value("format", "") != "oppa-agent") {
    Fail(ErrorCode::kCorruptManifest, "agent.json is not an oppa-agent manifest");
  }
  try {
    OppaAgent agent(TrainingConfigFromJson(j.at("config")), j.at("state_dim").get<int>(),
                    j.at("num_actions").get<int>(), j.at("num_opposite").get<int>(),
                    j.at("placeholder").get<int>());
    agent.beta_ = j.at("beta").get<double>();
    nn::LoadCheckpointInto(agent.q_.params(), (fs::path(dir) / "q").string());
    nn::LoadCheckpointInto(agent.q_.target_params(), (fs::path(dir) / "q_target").string());
    nn::LoadCheckpointInto(agent.estimator_.params(), (fs::path(dir) / "estimator").string());
    return agent;
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kCorruptManifest, "malformed agent.json: ", ex.what());
  }
}

// ---------------------------------------------------------------------------

std::vector<PretrainExample> CollectExpertCorpus(envs::DialogueEnv& env, int episodes,
                                                 uint64_t seed, double noise) {
  std::vector<PretrainExample> corpus;
  Rng rng(seed);
  for (int e = 0; e < episodes; ++e) {
    env.Reset(EpisodeSeed(seed, e));
    while (!env.done()) {
      PretrainExample ex;
      ex.state = env.Observe();
      ex.legal = env.LegalMask();
      int action = env.ExpertAction();
      if (noise > 0.0 && UniformUnit(rng) < noise) {
        std::vector<int> legal;
        for (int i = 0; i < static_cast<int>(ex.legal.size()); ++i) {
          if (ex.legal[i]) legal.push_back(i);
        }
        action = legal[UniformInt(rng, static_cast<int>(legal.size()))];
      }
      ex.target_action = action;
      ex.next_opposite = env.Step(action).opposite_act;
      corpus.push_back(std::move(ex));
    }
  }
  return corpus;
}

double EstimatorAccuracy(const OppositeEstimator& est,
                         const std::vector<PretrainExample>& corpus) {
  int n = 0;
  int hits = 0;
  for (const auto& ex : corpus) {
    if (ex.next_opposite < 0) continue;
    ++n;
    hits += ArgMax(est.Distribution(ex.state, ex.target_action)) == ex.next_opposite;
  }
  return n == 0 ? 0.0 : static_cast<double>(hits) / n;
}

bool EpisodeSucceeded(const envs::SessionRecord& record) {
  if (record.env == dialogue::EnvKind::kCooperative) return record.simulator_success;
  return record.outcome == "agreed";
}

OppaTrainer::OppaTrainer(const TrainingConfig& config, envs::DialogueEnv& env)
    : config_(config),
      env_(env),
      agent_(config, env.state_dim(), env.target_catalog().size(),
             env.opposite_catalog().size(), env.opposite_catalog().placeholder()),
      buffer_(config.buffer_capacity),
      rng_(StreamSeed(config.seed, Stream::kTraining)) {}

void OppaTrainer::StepAdam(ParamStore& store, double lr) {
  if (config_.grad_clip > 0.0) nn::ClipGradNorm(store, config_.grad_clip);
  nn::AdamOptions opts;
  opts.learning_rate = lr;
  nn::AdamStep(store, opts);
}

PretrainReport OppaTrainer::Pretrain(const std::vector<PretrainExample>& corpus) {
  if (corpus.empty()) Fail(ErrorCode::kInvalidArgument, "pretraining corpus is empty");
  PretrainReport report;
  report.examples = static_cast<int>(corpus.size());
  const int batch = config_.pretrain_batch;
  QFunction& q = agent_.q();
  OppositeEstimator& est = agent_.estimator();
  const std::vector<double> placeholder = OneHotWeights(agent_.placeholder(), q.num_opposite());

  std::vector<int> replied;
  for (int i = 0; i < static_cast<int>(corpus.size()); ++i) {
    if (corpus[i].next_opposite >= 0) replied.push_back(i);
  }
  if (config_.use_obe && !replied.empty()) {
    for (int epoch = 0; epoch < config_.pretrain_epochs; ++epoch) {
      Shuffle(replied, rng_);
      double total = 0.0;
      for (size_t start = 0; start < replied.size(); start += batch) {
        Tape tape;
        est.params().ZeroGrad();
        std::vector<Var> terms;
        for (size_t k = start; k < std::min(replied.size(), start + batch); ++k) {
          const PretrainExample& ex = corpus[replied[k]];
          Var dist = est.Forward(tape, est.params(), ex.state, ex.target_action);
          terms.push_back(RegLoss(tape, dist, ex.next_opposite, 1.0));
        }
        Var loss = MeanOf(tape, terms);
        tape.Backward(loss);
        StepAdam(est.params(), config_.estimator_learning_rate);
        total += tape.Scalar(loss) * terms.size();
      }
      report.estimator_loss = total / replied.size();
    }
    report.estimator_accuracy = EstimatorAccuracy(est, corpus);
  }

  std::vector<int> order(corpus.size());
  for (int i = 0; i < static_cast<int>(order.size()); ++i) order[i] = i;
  // Teacher-forced opposite estimates are fixed once pi_o is trained.
  std::vector<std::vector<double>> weights(corpus.size(), placeholder);
  if (config_.use_obe) {
    for (size_t i = 0; i < corpus.size(); ++i) {
      const OppositeEstimate e = EstimateOpposite(corpus[i].state, corpus[i].target_action, est);
      weights[i] = config_.soft_opposite ? e.dist : OneHotWeights(e.action, q.num_opposite());
    }
  }
  const bool reg = config_.use_action_reg && config_.beta0 > 0.0;
  for (int epoch = 0; epoch < config_.pretrain_epochs; ++epoch) {
    Shuffle(order, rng_);
    double total = 0.0;
    for (size_t start = 0; start < order.size(); start += batch) {
      Tape tape;
      q.params().ZeroGrad();
      std::vector<Var> terms;
      for (size_t k = start; k < std::min(order.size(), start + batch); ++k) {
        const PretrainExample& ex = corpus[order[k]];
        const std::vector<bool>* mask = MaskOrNull(ex.legal);
        Var qv = q.Forward(tape, q.params(), ex.state, weights[order[k]]);
        Var dist = tape.Softmax(tape.Scale(qv, 1.0 / config_.tau), mask);
        Var term = RegLoss(tape, dist, ex.target_action, 1.0);
        if (reg && config_.use_obe) {
          Var qp = q.Forward(tape, q.params(), ex.state, placeholder);
          Var pd = tape.Softmax(tape.Scale(qp, 1.0 / config_.tau), mask);
          term = tape.Add(term, RegLoss(tape, pd, ex.target_action, config_.beta0));
        }
        terms.push_back(term);
      }
      Var loss = MeanOf(tape, terms);
      tape.Backward(loss);
      StepAdam(q.params(), config_.learning_rate);
      total += tape.Scalar(loss) * terms.size();
    }
    report.q_loss = total / corpus.size();
  }
  q.SyncTarget();
  int hits = 0;
  for (const auto& ex : corpus) hits += agent_.Act(ex.state, ex.legal) == ex.target_action;
  report.q_accuracy = static_cast<double>(hits) / corpus.size();
  return report;
}

OppaTrainer::UpdateLosses OppaTrainer::UpdateQ() {
  QFunction& q = agent_.q();
  std::vector<const Transition*> batch = buffer_.Sample(config_.batch_size, rng_);
  Tape tape;
  q.params().ZeroGrad();
  Var l1 = DqnLoss(tape, q, batch, config_.gamma_q);
  Var total = tape.Scale(l1, config_.w1);
  UpdateLosses out;
  out.q = tape.Scalar(l1);

  const double beta = agent_.beta();
  if (config_.use_action_reg && beta > 0.0 && config_.w2 != 0.0) {
    const std::vector<double> placeholder =
        OneHotWeights(agent_.placeholder(), q.num_opposite());
    Tape reg_tape;
    Tape& t2 = config_.reg_stop_gradient ? reg_tape : tape;
    std::vector<Var> terms;
    for (const Transition* tr : batch) {
      Var qp = q.Forward(t2, q.params(), tr->state, placeholder);
      Var dist = t2.Softmax(t2.Scale(qp, 1.0 / config_.tau), MaskOrNull(tr->legal));
      terms.push_back(RegLoss(t2, dist, tr->action, beta));
    }
    Var l2 = MeanOf(t2, terms);
    out.reg = t2.Scalar(l2);
    if (!config_.reg_stop_gradient) total = tape.Add(total, tape.Scale(l2, config_.w2));
  }
  tape.Backward(total);
  StepAdam(q.params(), config_.learning_rate);
  return out;
}

double OppaTrainer::UpdateEstimator() {
  OppositeEstimator& est = agent_.estimator();
  std::vector<const Transition*> batch = buffer_.Sample(config_.batch_size, rng_);
  Tape tape;
  est.params().ZeroGrad();
  std::vector<Var> terms;
  for (const Transition* t : batch) {
    if (t->observed_opposite < 0) continue;
    Var dist = est.Forward(tape, est.params(), t->state, t->action);
    terms.push_back(RegLoss(tape, dist, t->observed_opposite, 1.0));
  }
  if (terms.empty()) return 0.0;
  Var loss = MeanOf(tape, terms);
  tape.Backward(loss);
  StepAdam(est.params(), config_.estimator_learning_rate);
  return tape.Scalar(loss);
}

EpisodeStats OppaTrainer::TrainIteration() {
  EpisodeStats stats;
  stats.episode = episode_;
  stats.epsilon = config_.EpsilonAt(episode_);
  stats.beta = agent_.beta();

  env_.Reset(EpisodeSeed(config_.seed, static_cast<uint64_t>(episode_)));
  std::vector<double> state = env_.Observe();
  std::vector<bool> legal = env_.LegalMask();
  Decision decision = agent_.Decide(state, legal, stats.epsilon, &rng_);
  while (!env_.done()) {
    const envs::StepResult step = env_.Step(decision.action);
    stats.actions.push_back(decision.action);
    Transition t;
    t.state = std::move(state);
    t.opposite = decision.opposite_weights;
    t.legal = std::move(legal);
    t.action = decision.action;
    t.reward = step.reward;
    t.done = step.done;
    t.observed_opposite = step.opposite_act;
    t.next_state = env_.Observe();
    t.next_legal = env_.LegalMask();
    if (step.done) {
      t.next_opposite = OneHotWeights(agent_.placeholder(), agent_.q().num_opposite());
    } else {
      decision = agent_.Decide(t.next_state, t.next_legal, stats.epsilon, &rng_);
      t.next_opposite = decision.opposite_weights;
    }
    state = t.next_state;
    legal = t.next_legal;
    stats.reward += t.reward;
    buffer_.Push(std::move(t));
  }
  stats.record = env_.record();
  stats.turns = stats.record.turns;
  stats.success = EpisodeSucceeded(stats.record);

  if (buffer_.size() >= config_.batch_size) {
    for (int u = 0; u < config_.updates_per_episode; ++u) {
      const UpdateLosses losses = UpdateQ();
      stats.q_loss += losses.q;
      stats.reg_loss += losses.reg;
      ++stats.updates;
    }
    if (stats.updates > 0) {
      stats.q_loss /= stats.updates;
      stats.reg_loss /= stats.updates;
    }
    if (config_.use_obe && config_.train_estimator_online) {
      stats.estimator_loss = UpdateEstimator();
    }
    ++iterations_;
    if (iterations_ % config_.target_sync == 0) agent_.q().SyncTarget();
  }
  if ((episode_ + 1) % config_.epoch_episodes == 0) {
    // Closed form so the logged value never drifts from beta0 * gamma^k.
    const int k = (episode_ + 1) / config_.epoch_episodes;
    agent_.set_beta(config_.beta0 * std::pow(config_.gamma_beta, k));
  }
  ++episode_;
  return stats;
}

envs::SessionRecord OppaTrainer::Evaluate(uint64_t episode_seed) {
  env_.Reset(episode_seed);
  while (!env_.done()) env_.Step(agent_.Act(env_.Observe(), env_.LegalMask()));
  return env_.record();
}

}  // namespace oppa::policy
