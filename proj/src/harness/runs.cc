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


#include "oppa/harness/runs.h"

#include <filesystem>
#include <fstream>

#include "oppa/nn/checkpoint.h"
#include "oppa/policy/reinforce.h"

namespace oppa::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

uint64_t EvalEpisodeSeed(const ExperimentConfig& config, uint64_t seed, int index) {
  return EpisodeSeed(EpisodeSeed(config.eval_seed, seed), index);
}

uint64_t SnapshotEpisodeSeed(const ExperimentConfig& config, uint64_t seed, int index) {
  return EpisodeSeed(EpisodeSeed(config.eval_seed ^ 0x736E617073686F74ULL, seed), index);
}

uint64_t CorpusSeed(uint64_t seed, bool heldout) {
  return EpisodeSeed(seed ^ 0x636F72707573ULL, heldout ? 2 : 1);
}

std::vector<envs::SessionRecord> Rollouts(Policy& policy, envs::DialogueEnv& env,
                                          const std::vector<uint64_t>& episode_seeds) {
  std::vector<envs::SessionRecord> out;
  out.reserve(episode_seeds.size());
  for (uint64_t s : episode_seeds) {
    policy.BeginEpisode(s);
    env.Reset(s);
    while (!env.done()) env.Step(policy.Act(env));
    out.push_back(env.record());
  }
  return out;
}

ordered_json PretrainResult::ToJson() const {
  ordered_json j;
  j["examples"] = train.examples;
  j["estimator_loss"] = train.estimator_loss;
  j["estimator_accuracy"] = train.estimator_accuracy;
  j["q_loss"] = train.q_loss;
  j["q_accuracy"] = train.q_accuracy;
  j["heldout_examples"] = heldout_examples;
  j["heldout_action_accuracy"] = heldout_action_accuracy;
  if (heldout_estimator_accuracy) {
    j["heldout_estimator_accuracy"] = *heldout_estimator_accuracy;
  } else {
    j["heldout_estimator_accuracy"] = nullptr;
  }
  return j;
}

namespace {

// Shared pointer that does not own its target.
template <typename T>
std::shared_ptr<const T> Borrow(const T& x) {
  return std::shared_ptr<const T>(std::shared_ptr<const T>(), &x);
}

class Learner {
 public:
  virtual ~Learner() = default;
  virtual policy::PretrainReport Pretrain(const std::vector<policy::PretrainExample>& c) = 0;
  virtual policy::EpisodeStats TrainIteration() = 0;
  // Reads the live parameters.
  virtual std::shared_ptr<LearnedPolicy> View() const = 0;
  virtual std::shared_ptr<LearnedPolicy> Freeze() const = 0;
  virtual std::optional<double> EstimatorAccuracy(
      const std::vector<policy::PretrainExample>& corpus) const = 0;
  virtual void InitFrom(const std::string& dir) = 0;
  virtual double beta() const = 0;
};

class OppaLearner : public Learner {
 public:
  explicit OppaLearner(const ExperimentConfig& config)
      : env_(MakeEnv(config)), trainer_(config.training, *env_) {}
  policy::PretrainReport Pretrain(const std::vector<policy::PretrainExample>& c) override {
    return trainer_.Pretrain(c);
  }
  policy::EpisodeStats TrainIteration() override { return trainer_.TrainIteration(); }
  std::shared_ptr<LearnedPolicy> View() const override {
    return std::make_shared<OppaPolicy>(Borrow(trainer_.agent()));
  }
  std::shared_ptr<LearnedPolicy> Freeze() const override {
    return std::make_shared<OppaPolicy>(
        std::make_shared<const policy::OppaAgent>(trainer_.agent()));
  }
  std::optional<double> EstimatorAccuracy(
      const std::vector<policy::PretrainExample>& corpus) const override {
    return policy::EstimatorAccuracy(trainer_.agent().estimator(), corpus);
  }
  void InitFrom(const std::string& dir) override {
    policy::OppaAgent& agent = trainer_.agent();
    nn::LoadCheckpointInto(agent.q().params(), (fs::path(dir) / "q").string());
    nn::LoadCheckpointInto(agent.q().target_params(), (fs::path(dir) / "q_target").string());
    nn::LoadCheckpointInto(agent.estimator().params(), (fs::path(dir) / "estimator").string());
  }
  double beta() const override { return trainer_.agent().beta(); }

 private:
  std::unique_ptr<envs::DialogueEnv> env_;
  policy::OppaTrainer trainer_;
};

class ReinforceLearner : public Learner {
 public:
  explicit ReinforceLearner(const ExperimentConfig& config)
      : env_(MakeEnv(config)), trainer_(config.training, *env_) {}
  policy::PretrainReport Pretrain(const std::vector<policy::PretrainExample>& c) override {
    return trainer_.Pretrain(c);
  }
  policy::EpisodeStats TrainIteration() override { return trainer_.TrainIteration(); }
  std::shared_ptr<LearnedPolicy> View() const override {
    return std::make_shared<ReinforcePolicy>(Borrow(trainer_.agent()));
  }
  std::shared_ptr<LearnedPolicy> Freeze() const override {
    return std::make_shared<ReinforcePolicy>(
        std::make_shared<const policy::ReinforceAgent>(trainer_.agent()));
  }
  std::optional<double> EstimatorAccuracy(
      const std::vector<policy::PretrainExample>&) const override {
    return std::nullopt;
  }
  void InitFrom(const std::string& dir) override {
    nn::LoadCheckpointInto(trainer_.agent().policy().params(),
                           (fs::path(dir) / "policy").string());
  }
  double beta() const override { return 0.0; }

 private:
  std::unique_ptr<envs::DialogueEnv> env_;
  policy::ReinforceTrainer trainer_;
};

ExperimentConfig Seeded(const ExperimentConfig& config, uint64_t seed) {
  ExperimentConfig c = config;
  c.training.seed = seed;
  return c;
}

std::unique_ptr<Learner> MakeLearner(const ExperimentConfig& config) {
  if (config.algorithm == "reinforce") return std::make_unique<ReinforceLearner>(config);
  return std::make_unique<OppaLearner>(config);
}

PretrainResult WarmStart(Learner& learner, const ExperimentConfig& config, uint64_t seed) {
  const int heldout_eps =
      static_cast<int>(std::lround(config.corpus_episodes * config.corpus_holdout));
  const int train_eps = config.corpus_episodes - heldout_eps;
  auto corpus_env = MakeEnv(config);
  const auto corpus = policy::CollectExpertCorpus(*corpus_env, train_eps, CorpusSeed(seed, false),
                                                  config.corpus_noise);
  const auto heldout = policy::CollectExpertCorpus(*corpus_env, heldout_eps,
                                                   CorpusSeed(seed, true), config.corpus_noise);
  PretrainResult r;
  r.train = learner.Pretrain(corpus);
  r.heldout_examples = static_cast<int>(heldout.size());
  if (!heldout.empty()) {
    const auto view = learner.View();
    int hits = 0;
    for (const auto& ex : heldout) hits += view->ActOnState(ex.state, ex.legal) == ex.target_action;
    r.heldout_action_accuracy = static_cast<double>(hits) / heldout.size();
    r.heldout_estimator_accuracy = learner.EstimatorAccuracy(heldout);
  }
  return r;
}

void MakeDirs(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create ", dir, ": ", ec.message());
}

std::string Join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

double SnapshotValue(Policy& policy, envs::DialogueEnv& env, const ExperimentConfig& config,
                     uint64_t seed) {
  std::vector<uint64_t> seeds;
  for (int i = 0; i < config.snapshot_episodes; ++i) {
    seeds.push_back(SnapshotEpisodeSeed(config, seed, i));
  }
  const auto metrics = SessionMetrics(env.kind(), Rollouts(policy, env, seeds));
  const std::string key = config.negotiation_env() ? "score_all" : "success";
  for (const auto& [name, v] : metrics) {
    if (name == key) return v;
  }
  return 0.0;
}

ordered_json EpisodeLine(const policy::EpisodeStats& s) {
  ordered_json j;
  j["episode"] = s.episode;
  j["reward"] = s.reward;
  j["turns"] = s.turns;
  j["success"] = s.success;
  j["epsilon"] = s.epsilon;
  j["beta"] = s.beta;
  j["q_loss"] = s.q_loss;
  j["reg_loss"] = s.reg_loss;
  j["estimator_loss"] = s.estimator_loss;
  j["updates"] = s.updates;
  j["actions"] = s.actions;
  j["record"] = json::parse(envs::SessionRecordToJson(s.record).dump());
  return j;
}

}  // namespace

PretrainResult RunPretrain(const ExperimentConfig& config, uint64_t seed,
                           const std::string& out, std::shared_ptr<LearnedPolicy>* policy) {
  config.Validate();
  const ExperimentConfig c = Seeded(config, seed);
  auto learner = MakeLearner(c);
  PretrainResult r = WarmStart(*learner, c, seed);
  auto frozen = learner->Freeze();
  if (!out.empty()) {
    MakeDirs(out);
    SaveCheckpointDir(*frozen, EnvSpec::Of(c), Join(out, "checkpoint"));
    ordered_json report;
    report["seed"] = seed;
    report["algorithm"] = c.algorithm;
    report["pretrain"] = r.ToJson();
    WriteTextFile(Join(out, "pretrain_report.json"), report.dump(2) + "\n");
  }
  if (policy != nullptr) *policy = frozen;
  return r;
}

TrainResult RunTrain(const ExperimentConfig& config, uint64_t seed, const std::string& out,
                     const std::string& init) {
  config.Validate();
  const ExperimentConfig c = Seeded(config, seed);
  TrainResult result;
  result.seed = seed;
  result.spec = EnvSpec::Of(c);
  auto learner = MakeLearner(c);
  if (!init.empty()) {
    const auto loaded = LoadPolicy(init);
    CheckCompatible(*loaded, LoadEnvSpec(init), result.spec);
    if (loaded->name() != c.algorithm) {
      Fail(ErrorCode::kIncompatible, "init checkpoint is a ", loaded->name(),
           " agent but the config trains ", c.algorithm);
    }
    learner->InitFrom(init);
  } else if (c.corpus_episodes > 0 && c.training.pretrain_epochs > 0) {
    result.pretrain = WarmStart(*learner, c, seed);
  }

  std::ofstream episodes;
  if (!out.empty()) {
    MakeDirs(out);
    if (c.log_episodes) {
      episodes.open(Join(out, "episodes.jsonl"), std::ios::binary);
      if (!episodes) Fail(ErrorCode::kIo, "cannot write ", Join(out, "episodes.jsonl"));
    }
  }

  auto eval_env = MakeEnv(c);
  const auto view = learner->View();
  result.curve.push_back({0, SnapshotValue(*view, *eval_env, c, seed), 0.0,
                          c.algorithm == "oppa" ? c.training.EpsilonAt(0) : 0.0,
                          learner->beta()});
  double reward_sum = 0.0;
  int window = 0;
  for (int e = 0; e < c.training.max_episodes; ++e) {
    const policy::EpisodeStats stats = learner->TrainIteration();
    reward_sum += stats.reward;
    ++window;
    result.betas.push_back(stats.beta);
    if (episodes.is_open()) episodes << EpisodeLine(stats).dump() << "\n";
    if ((e + 1) % c.snapshot_every == 0) {
      result.curve.push_back({e + 1, SnapshotValue(*view, *eval_env, c, seed),
                              reward_sum / window, stats.epsilon, stats.beta});
      reward_sum = 0.0;
      window = 0;
    }
  }
  result.policy = learner->Freeze();

  if (!out.empty()) {
    SaveCheckpointDir(*result.policy, result.spec, Join(out, "checkpoint"));
    WriteTextFile(Join(out, "curve.csv"),
                  CurveToCsv(c.negotiation_env() ? "score" : "success", result.curve));
    ordered_json report;
    report["seed"] = seed;
    report["config"] = ExperimentConfigToJson(c);
    report["pretrain"] = result.pretrain ? result.pretrain->ToJson() : ordered_json(nullptr);
    report["episodes"] = c.training.max_episodes;
    report["final_snapshot"] = result.curve.back().value;
    WriteTextFile(Join(out, "train_report.json"), report.dump(2) + "\n");
  }
  return result;
}

EvalReport RunEval(const std::vector<std::shared_ptr<Policy>>& policies,
                   const ExperimentConfig& config, const std::vector<uint64_t>& seeds,
                   const std::string& label) {
  config.Validate();
  if (policies.empty()) Fail(ErrorCode::kInvalidArgument, "no policy to evaluate");
  if (policies.size() != 1 && policies.size() != seeds.size()) {
    Fail(ErrorCode::kInvalidArgument, "need one policy or one per seed");
  }
  if (seeds.empty()) Fail(ErrorCode::kInvalidArgument, "no evaluation seeds");
  auto env = MakeEnv(config);
  std::vector<std::vector<std::pair<std::string, double>>> per_seed;
  for (size_t k = 0; k < seeds.size(); ++k) {
    Policy& p = *policies[policies.size() == 1 ? 0 : k];
    std::vector<uint64_t> episode_seeds;
    for (int i = 0; i < config.eval_episodes; ++i) {
      episode_seeds.push_back(EvalEpisodeSeed(config, seeds[k], i));
    }
    per_seed.push_back(SessionMetrics(env->kind(), Rollouts(p, *env, episode_seeds)));
  }
  return EvalReport::Aggregate(config.env, label, config.eval_episodes, seeds, per_seed);
}

EvalReport RunEvalCheckpoint(const std::string& checkpoint, const ExperimentConfig& config,
                             const std::string& out) {
  auto policy = LoadPolicy(checkpoint);
  CheckCompatible(*policy, LoadEnvSpec(checkpoint), EnvSpec::Of(config));
  EvalReport report = RunEval({policy}, config, config.seeds, policy->name());
  if (!out.empty()) {
    MakeDirs(out);
    WriteTextFile(Join(out, "eval_report.json"), report.ToJson().dump(2) + "\n");
    WriteTextFile(Join(out, "eval_report.csv"), report.ToCsv());
  }
  return report;
}

CrossplayReport RunCrossplay(const std::vector<std::shared_ptr<LearnedPolicy>>& a,
                             const std::vector<std::shared_ptr<LearnedPolicy>>& b,
                             const std::string& name_a, const std::string& name_b,
                             const ExperimentConfig& config,
                             const std::vector<uint64_t>& seeds) {
  config.Validate();
  if (!config.negotiation_env()) {
    Fail(ErrorCode::kIncompatible, "crossplay needs the negotiation env");
  }
  auto pick = [&](const std::vector<std::shared_ptr<LearnedPolicy>>& v, size_t k) {
    if (v.size() != 1 && v.size() != seeds.size()) {
      Fail(ErrorCode::kInvalidArgument, "need one policy or one per seed");
    }
    return v[v.size() == 1 ? 0 : k];
  };
  envs::NegotiationConfig game_config = config.negotiation;
  game_config.first_mover = 0;
  auto catalog = std::make_shared<const dialogue::ActionCatalog>(
      dialogue::EnumerateNegotiationActions(game_config.caps, game_config.max_actions));
  CrossplayReport rep;
  rep.a = name_a;
  rep.b = name_b;
  for (size_t k = 0; k < seeds.size(); ++k) {
    PolicyNegotiationAgent agent_a(pick(a, k), config.negotiation, config.state_dim);
    PolicyNegotiationAgent agent_b(pick(b, k), config.negotiation, config.state_dim);
    const uint64_t base = EpisodeSeed(config.eval_seed ^ 0x63726F7373ULL, seeds[k]);
    CrossplayRow row;
    row.seed = seeds[k];
    row.episodes = config.eval_episodes;
    double sum_a = 0, sum_b = 0, agreed_a = 0, agreed_b = 0;
    for (int i = 0; i < config.eval_episodes; ++i) {
      envs::NegotiationGame game =
          envs::NegotiationGame::New(EpisodeSeed(base, i / 2), game_config, catalog);
      const bool a_first = i % 2 == 0;
      const envs::SessionRecord rec = a_first ? envs::PlayNegotiation(game, agent_a, agent_b)
                                              : envs::PlayNegotiation(game, agent_b, agent_a);
      const int score_a = a_first ? rec.score_target : rec.score_opposite;
      const int score_b = a_first ? rec.score_opposite : rec.score_target;
      sum_a += score_a;
      sum_b += score_b;
      if (rec.outcome == "agreed") {
        ++row.agreed;
        agreed_a += score_a;
        agreed_b += score_b;
      }
    }
    row.all_a = sum_a / row.episodes;
    row.all_b = sum_b / row.episodes;
    row.agreed_a = row.agreed ? agreed_a / row.agreed : 0.0;
    row.agreed_b = row.agreed ? agreed_b / row.agreed : 0.0;
    rep.rows.push_back(row);
  }
  return rep;
}

CrossplayReport RunCrossplayCheckpoints(const std::string& checkpoint_a,
                                        const std::string& checkpoint_b,
                                        const ExperimentConfig& config,
                                        const std::string& out) {
  const EnvSpec target = EnvSpec::Of(config);
  auto a = LoadPolicy(checkpoint_a);
  CheckCompatible(*a, LoadEnvSpec(checkpoint_a), target);
  auto b = LoadPolicy(checkpoint_b);
  CheckCompatible(*b, LoadEnvSpec(checkpoint_b), target);
  auto label = [](const std::string& dir) {
    fs::path p = fs::path(dir).lexically_normal();
    if (p.filename().empty()) p = p.parent_path();
    if (p.filename() == "checkpoint" && p.has_parent_path()) p = p.parent_path();
    return p.filename().string();
  };
  CrossplayReport rep = RunCrossplay({a}, {b}, label(checkpoint_a), label(checkpoint_b), config,
                                     config.seeds);
  if (!out.empty()) {
    MakeDirs(out);
    WriteTextFile(Join(out, "crossplay.csv"), rep.ToCsv());
    WriteTextFile(Join(out, "crossplay.json"), rep.ToJson().dump(2) + "\n");
  }
  return rep;
}

const std::vector<Variant>& AblationVariants() {
  static const auto* v = new std::vector<Variant>{
      {"OPPA", "oppa", "oppa", true, true},
      {"OPPA w/o A", "oppa_wo_a", "oppa", true, false},
      {"OPPA w/o OBE (DQN)", "dqn", "oppa", false, false},
      {"REINFORCE", "reinforce", "reinforce", false, false},
  };
  return *v;
}

ExperimentConfig ApplyVariant(const ExperimentConfig& config, const Variant& variant) {
  ExperimentConfig c = config;
  c.algorithm = variant.algorithm;
  c.training.use_obe = variant.use_obe;
  c.training.use_action_reg = variant.use_action_reg;
  return c;
}

AblationReport RunAblate(const ExperimentConfig& config, const std::string& out,
                         const std::vector<Variant>& variants) {
  config.Validate();
  AblationReport rep;
  for (const Variant& v : variants) {
    const ExperimentConfig vc = ApplyVariant(config, v);
    std::vector<std::shared_ptr<Policy>> policies;
    for (uint64_t s : vc.seeds) {
      const std::string dir =
          out.empty() ? "" : Join(Join(out, v.slug), "seed_" + std::to_string(s));
      policies.push_back(RunTrain(vc, s, dir).policy);
    }
    rep.variants.emplace_back(v.name, RunEval(policies, vc, vc.seeds, v.name));
  }
  if (!out.empty()) {
    MakeDirs(out);
    WriteTextFile(Join(out, "ablation.json"), rep.ToJson().dump(2) + "\n");
    WriteTextFile(Join(out, "ablation.csv"), rep.ToCsv());
  }
  return rep;
}

}  // namespace oppa::harness
