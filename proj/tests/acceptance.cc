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

// Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
// if any fails. Criteria can be selected by number on the command line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oppa/envs/agents.h"
#include "oppa/envs/cooperative.h"
#include "oppa/envs/environment.h"
#include "oppa/envs/negotiation.h"
#include "oppa/harness/config.h"
#include "oppa/harness/policies.h"
#include "oppa/harness/reports.h"
#include "oppa/harness/runs.h"
#include "oppa/nn/layers.h"
#include "oppa/nn/optim.h"
#include "oppa/nn/tape.h"
#include "oppa/policy/networks.h"
#include "oppa/policy/oppa.h"
#include "oppa/policy/replay.h"
#include "oppa/reward/reward_model.h"
#include "support/chain_env.h"
#include "support/oracles.h"
#include "support/vanilla_dqn.h"

namespace oppa::testing {
namespace {

namespace fs = std::filesystem;
using harness::ExperimentConfig;
using nn::Activation;
using policy::OppaTrainer;
using policy::Transition;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string Sci(double v) { return Fmt("%.2e", v); }
std::string Fix(double v) { return Fmt("%.1f", v); }
std::string Fix3(double v) { return Fmt("%.3f", v); }

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string ConfigPath(const std::string& name) {
  return (fs::path(OPPA_SOURCE_DIR) / "configs" / name).string();
}

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("oppa_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string TreeBytes(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir));
  }
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) {
    out += f.string() + "\n" + harness::ReadTextFile((dir / f).string());
  }
  return out;
}

std::vector<double> RandomVector(Rng& rng, int n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = (2.0 * UniformUnit(rng) - 1.0) * scale;
  return v;
}

void Randomize(nn::ParamStore& store, Rng& rng, double scale) {
  for (int i = 0; i < store.size(); ++i) {
    for (double& v : store.at(i).value.data) v = (2.0 * UniformUnit(rng) - 1.0) * scale;
  }
}

const Scenario kDemo{{3, 1, 1}, {0, 6, 4}, {1, 4, 3}};

// ---------------------------------------------------------------------------
// 1. Gradient checks.

Outcome GradChecks() {
  const auto t0 = std::chrono::steady_clock::now();
  std::map<std::string, double> err;
  {
    Rng rng(12);
    nn::ParamStore store;
    auto l1 = nn::DenseLayer::Create(store, "l1", 5, 7, rng);
    auto l2 = nn::DenseLayer::Create(store, "l2", 7, 4, rng);
    Randomize(store, rng, 0.8);
    const auto x = RandomVector(rng, 5);
    const auto target = nn::Softmax(RandomVector(rng, 4));
    err["dense"] = nn::GradCheck(
        [&](Tape& t, ParamStore& s) {
          Var h = l1.Forward(t, s, t.Constant(x), Activation::kTanh);
          return nn::CrossEntropy(t, target, t.Softmax(l2.Forward(t, s, h, Activation::kIdentity)));
        },
        store);
  }
  {
    Rng rng(13);
    nn::ParamStore store;
    auto p = nn::GruCellParams::Create(store, "g", 3, 4, rng);
    Randomize(store, rng, 0.7);
    std::vector<std::vector<double>> xs = {RandomVector(rng, 3), RandomVector(rng, 3),
                                           RandomVector(rng, 3)};
    const auto y = RandomVector(rng, 4);
    err["gru"] = nn::GradCheck(
        [&](Tape& t, ParamStore& s) {
          std::vector<Var> seq;
          for (const auto& x : xs) seq.push_back(t.Constant(x));
          Var d = t.Sub(nn::GruForward(t, s, p, seq).back(), t.Constant(y));
          return t.Dot(d, d);
        },
        store);
  }
  {
    Rng rng(14);
    nn::ParamStore store;
    auto f = nn::GruCellParams::Create(store, "f", 3, 4, rng);
    auto b = nn::GruCellParams::Create(store, "b", 3, 4, rng);
    auto att = nn::AttentionParams::Create(store, "att", 8, 5, rng);
    auto head = nn::DenseLayer::Create(store, "head", 8, 3, rng);
    Randomize(store, rng, 0.6);
    std::vector<std::vector<double>> xs;
    for (int j = 0; j < 4; ++j) xs.push_back(RandomVector(rng, 3));
    err["bigru_attention"] = nn::GradCheck(
        [&](Tape& t, ParamStore& s) {
          std::vector<Var> seq;
          for (const auto& x : xs) seq.push_back(t.Constant(x));
          auto out = nn::Attend(t, s, att, nn::BiGruForward(t, s, seq, f, b));
          Var p = t.Softmax(head.Forward(t, s, out.context, Activation::kIdentity));
          return nn::CrossEntropy(t, {0, 1, 0}, p);
        },
        store);
  }
  {
    Rng rng(18);
    policy::QFunction q(6, 5, 4, 12, 3, rng);
    std::vector<Transition> items;
    for (int i = 0; i < 4; ++i) {
      Transition t;
      t.state = RandomVector(rng, 6);
      t.opposite = OneHot(i, 4);
      t.action = (i * 2) % 5;
      t.reward = 0.5 * i;
      t.next_state = RandomVector(rng, 6);
      t.next_opposite = OneHot(3 - i, 4);
      t.done = i == 3;
      items.push_back(t);
    }
    std::vector<const Transition*> batch;
    for (const auto& t : items) batch.push_back(&t);
    const auto placeholder = OneHot(0, 4);
    err["q_network"] = nn::GradCheck(
        [&](Tape& t, ParamStore& s) {
          Var l1 = policy::DqnLoss(t, q, batch, 0.9);
          Var qp = q.Forward(t, s, items[0].state, placeholder);
          Var dist = t.Softmax(t.Scale(qp, 1.0 / 0.7));
          return t.Add(l1, policy::RegLoss(t, dist, items[0].action, 0.8));
        },
        q.params());
  }
  {
    Rng rng(19);
    policy::OppositeEstimator est(6, 5, 7, 10, rng);
    const auto s = RandomVector(rng, 6);
    err["estimator"] = nn::GradCheck(
        [&](Tape& t, ParamStore& store) {
          return policy::RegLoss(t, est.Forward(t, store, s, 3), 4, 1.0);
        },
        est.params());
  }
  {
    reward::RewardModelConfig c;
    c.embed_dim = 3;
    c.word_hidden = 3;
    c.session_hidden = 3;
    c.goal_hidden = 2;
    c.attention_dim = 3;
    c.output_dim = 4;
    c.caps = {2, 2, 2};
    reward::SessionTokens s{{"<them>", "propose", "b=1", "<you>", "agree"}, {"book", "n=2", "v=3"}};
    reward::RewardModel m(c, reward::Vocabulary::Build({s}));
    nn::GradCheckOptions opts;
    opts.step = 1e-6;
    err["reward_model"] = nn::GradCheck(
        [&](Tape& t, ParamStore& store) { return m.Loss(t, store, s, {2, 1, 2}, {1, 0, 2}); },
        m.params(), opts);
  }
  const double secs = Seconds(t0);
  double worst = 0.0;
  std::string detail;
  for (const auto& [name, e] : err) {
    worst = std::max(worst, e);
    detail += name + "=" + Sci(e) + " ";
  }
  detail += "time=" + Fix(secs) + "s";
  return {worst < 1e-4 && secs < 30.0, detail};
}

// ---------------------------------------------------------------------------
// 2. Loss fixtures.

Outcome LossFixtures() {
  int exact_bad = 0;
  double worst = 0.0;
  auto exact = [&](double got, double want) { exact_bad += got != want; };
  auto near = [&](double got, double want) { worst = std::max(worst, std::fabs(got - want)); };

  exact(policy::BellmanTarget(5.0, true, 100.0, 0.99), 5.0);
  near(policy::BellmanTarget(1.0, false, 2.0, 0.9), 2.8);
  exact(policy::BellmanTarget(3.0, false, 1e6, 0.0), 3.0);
  exact(policy::BellmanTarget(-2.0, false, 4.0, 0.5), 0.0);
  exact(policy::DqnLoss({1.0, 2.0, -3.0}, {1.0, 2.0, -3.0}), 0.0);
  exact(policy::DqnLoss({1.0}, {3.0}), 4.0);
  exact(policy::DqnLoss({0.0, 1.0}, {2.0, 4.0}), 6.5);
  exact(policy::RegLoss({0.0, 1.0}, 1, 1.0), 0.0);
  near(policy::RegLoss({0.5, 0.5}, 0, 1.0), 0.69314718055994531);
  near(policy::RegLoss({0.25, 0.75}, 0, 2.0), 2.7725887222397811);
  exact(policy::RegLoss({0.5, 0.5}, 0, 0.0), 0.0);
  exact(policy::TotalLoss(2.0, 0.5, 1.0, 1.0), 2.5);
  exact(policy::TotalLoss(2.0, 7.0, 1.0, 0.0), 2.0);
  exact(policy::TotalLoss(3.0, 2.0, 2.0, 0.5), 7.0);
  near(policy::TotalLoss(0.1, 0.2, 1.0, 0.3), 0.16);

  return {exact_bad == 0 && worst <= 1e-12,
          "integer_mismatches=" + std::to_string(exact_bad) + " max_abs_err=" + Sci(worst)};
}

// ---------------------------------------------------------------------------
// 3. Chain MDP.

Outcome Chain() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<int> optimal = ChainOptimalPolicy(0.5);
  std::string detail;
  bool ok = true;
  for (bool obe : {false, true}) {
    int solved = 0;
    for (uint64_t seed = 0; seed < 5; ++seed) {
      ChainEnv env;
      TrainingConfig c = ChainConfig(seed);
      c.use_obe = obe;
      OppaTrainer trainer(c, env);
      for (int e = 0; e < c.max_episodes; ++e) trainer.TrainIteration();
      solved += GreedyChainPolicy(trainer.agent()) == optimal;
    }
    ok = ok && solved == 5;
    detail += std::string(obe ? "obe" : "dqn") + "=" + std::to_string(solved) + "/5 ";
  }
  const double secs = Seconds(t0);
  detail += "episodes=2000 time=" + Fix(secs) + "s";
  return {ok && secs < 60.0, detail};
}

// ---------------------------------------------------------------------------
// 4. Pareto and cooperative metrics against brute force.

Outcome Oracles() {
  Rng rng(404);
  int pareto_checked = 0, pareto_bad = 0;
  for (int n = 0; n < 1000; ++n) {
    const Scenario s = envs::SampleScenario(rng, {4, 4, 4});
    for (int b = 0; b <= s.counts[0]; ++b) {
      for (int h = 0; h <= s.counts[1]; ++h) {
        for (int l = 0; l <= s.counts[2]; ++l) {
          const int a = dialogue::TotalValue({b, h, l}, s.values_a);
          const int o = dialogue::TotalValue(
              {s.counts[0] - b, s.counts[1] - h, s.counts[2] - l}, s.values_b);
          ++pareto_checked;
          pareto_bad += envs::ParetoOptimal(s, a, o) != ReverseParetoOracle(s, a, o);
        }
      }
    }
    const int a = UniformInt(rng, 12), o = UniformInt(rng, 12);
    ++pareto_checked;
    pareto_bad += envs::ParetoOptimal(s, a, o) != ReverseParetoOracle(s, a, o);
  }
  int metric_bad = 0;
  const auto config = dialogue::CoopConfig::DeskScale();
  for (int n = 0; n < 100; ++n) {
    const SessionRecord r = RandomCoopRecord(rng, config);
    const BruteMetrics b = BruteForce(r);
    metric_bad += envs::InformF1(r) != b.f1 || envs::MatchRate(r) != b.match ||
                  envs::TaskSuccess(r) != b.success;
  }
  return {pareto_bad == 0 && metric_bad == 0,
          "pareto_mismatches=" + std::to_string(pareto_bad) + "/" +
              std::to_string(pareto_checked) + " metric_mismatches=" +
              std::to_string(metric_bad) + "/100"};
}

// ---------------------------------------------------------------------------
// 5. Worked negotiation example.

Outcome DemoScenario() {
  auto catalog = std::make_shared<const dialogue::ActionCatalog>(
      dialogue::EnumerateNegotiationActions({4, 4, 4}));
  envs::NegotiationGame game(kDemo, catalog, 20, 1);
  game.Step(1, DialogueAct::Propose({3, 0, 0}));
  game.Step(0, DialogueAct::Control(ActKind::kAgree));
  SessionRecord r;
  envs::FillNegotiationOutcome(game, 0, r);
  const bool pareto = envs::ParetoOptimal(kDemo, r.score_target, r.score_opposite);
  const bool oracle = ReverseParetoOracle(kDemo, r.score_target, r.score_opposite);
  return {r.outcome == "agreed" && r.score_target == 10 && r.score_opposite == 3 && pareto &&
              oracle,
          "scores=" + std::to_string(r.score_target) + "," + std::to_string(r.score_opposite) +
              " pareto=" + (pareto ? "true" : "false")};
}

// ---------------------------------------------------------------------------
// 6. Replay buffer.

Outcome Replay() {
  policy::ReplayBuffer buf(500);
  for (int i = 0; i < 730; ++i) {
    Transition t;
    t.action = i;
    buf.Push(t);
  }
  bool fifo = buf.size() == 500 && buf.capacity() == 500;
  for (int i = 0; i < buf.size(); ++i) fifo = fifo && buf.at(i).action == 230 + i;
  Rng rng(25);
  std::vector<int> counts(500, 0);
  for (int i = 0; i < 100; ++i) {
    for (int idx : buf.SampleIndices(1000, rng)) ++counts[idx];
  }
  const double chi = ChiSquareUniform(counts);
  return {fifo && chi < kChi2Df499,
          std::string("fifo=") + (fifo ? "ok" : "broken") + " draws=100000 chi2=" + Fix(chi) +
              " critical_p0.01=" + Fix(kChi2Df499)};
}

// ---------------------------------------------------------------------------
// 7. Cooperative ablation.

Outcome CooperativeAblation() {
  const ExperimentConfig c = harness::LoadExperimentConfig(ConfigPath("desk_cooperative.json"));
  std::map<std::string, double> success;
  double slowest = 0.0;
  for (const char* slug : {"oppa", "oppa_wo_a", "dqn"}) {
    const auto& all = harness::AblationVariants();
    const auto v = *std::find_if(all.begin(), all.end(),
                                 [&](const harness::Variant& x) { return x.slug == slug; });
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = harness::RunAblate(c, "", {v});
    slowest = std::max(slowest, Seconds(t0));
    success[slug] = rep.variant(v.name).metric("success").mean;
  }
  const bool margin = success["oppa"] >= success["dqn"] + 5.0;
  const bool reg = success["oppa"] >= success["oppa_wo_a"];
  return {margin && reg && slowest <= 600.0 && c.seeds.size() >= 5,
          "success oppa=" + Fix(success["oppa"]) + " oppa_wo_a=" + Fix(success["oppa_wo_a"]) +
              " dqn=" + Fix(success["dqn"]) + " seeds=" + std::to_string(c.seeds.size()) +
              " margin_ok=" + (margin ? "yes" : "no") + " wo_a_ok=" + (reg ? "yes" : "no") +
              " slowest_variant=" + Fix(slowest) + "s"};
}

// ---------------------------------------------------------------------------
// 8. Negotiation crossplay.

Outcome NegotiationCrossplay() {
  const ExperimentConfig c = harness::LoadExperimentConfig(ConfigPath("desk_negotiation.json"));
  const auto& all = harness::AblationVariants();
  auto find = [&](const std::string& slug) {
    return *std::find_if(all.begin(), all.end(),
                         [&](const harness::Variant& x) { return x.slug == slug; });
  };
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::shared_ptr<harness::LearnedPolicy>> a, b;
  for (uint64_t s : c.seeds) {
    a.push_back(harness::RunTrain(harness::ApplyVariant(c, find("oppa")), s, "").policy);
    b.push_back(harness::RunTrain(harness::ApplyVariant(c, find("dqn")), s, "").policy);
  }
  const auto rep = harness::RunCrossplay(a, b, "oppa", "dqn", c, c.seeds);
  const bool wins = rep.MeanAllA() > rep.MeanAllB();
  const bool agreed = rep.MeanAgreedA() >= rep.MeanAllA() && rep.MeanAgreedB() >= rep.MeanAllB();
  return {wins && agreed && c.seeds.size() >= 5,
          "all " + rep.AllText() + " agreed " + rep.AgreedText() + " seeds=" +
              std::to_string(c.seeds.size()) + " oppa_wins=" + (wins ? "yes" : "no") +
              " agreed_ge_all=" + (agreed ? "yes" : "no") + " time=" + Fix(Seconds(t0)) + "s"};
}

// ---------------------------------------------------------------------------
// 9. Switches off equal vanilla DQN.

bool MatchesVanilla(DialogueEnv& env_a, DialogueEnv& env_b, TrainingConfig c, int episodes) {
  c.use_obe = false;
  c.use_action_reg = false;
  OppaTrainer trainer(c, env_a);
  VanillaDqn reference(c, env_b);
  int updates = 0;
  for (int e = 0; e < episodes; ++e) {
    const auto s = trainer.TrainIteration();
    updates += s.updates;
    if (s.actions != reference.Episode()) return false;
  }
  return updates > 0 && trainer.agent().q().params().ValuesEqual(reference.net());
}

TrainingConfig SmallTraining() {
  TrainingConfig c;
  c.hidden = 16;
  c.estimator_hidden = 16;
  c.emb_dim = 4;
  c.batch_size = 8;
  c.max_episodes = 100;
  c.epoch_episodes = 5;
  return c;
}

Outcome AblationIdentity() {
  envs::CooperativeEnv ca(dialogue::CoopConfig::DeskScale(), 32);
  envs::CooperativeEnv cb(dialogue::CoopConfig::DeskScale(), 32);
  TrainingConfig c = SmallTraining();
  c.seed = 5;
  c.buffer_capacity = 60;
  c.updates_per_episode = 2;
  const bool coop = MatchesVanilla(ca, cb, c, 60);

  envs::NegotiationConfig nc;
  nc.caps = {2, 2, 2};
  envs::NegotiationEnv na(nc, 64, envs::MakeScriptedAgent("conceding"));
  envs::NegotiationEnv nb(nc, 64, envs::MakeScriptedAgent("conceding"));
  TrainingConfig n = SmallTraining();
  n.seed = 6;
  n.target_sync = 3;
  const bool nego = MatchesVanilla(na, nb, n, 60);
  return {coop && nego, std::string("cooperative=") + (coop ? "identical" : "differs") +
                            " negotiation=" + (nego ? "identical" : "differs")};
}

// ---------------------------------------------------------------------------
// 10. Beta schedule.

Outcome BetaSchedule() {
  envs::CooperativeEnv env(dialogue::CoopConfig::DeskScale(), 32);
  TrainingConfig c = SmallTraining();
  c.epoch_episodes = 3;
  c.gamma_beta = 0.9;
  c.beta0 = 0.8;
  OppaTrainer trainer(c, env);
  int bad = 0, checked = 0;
  for (int e = 0; e < 40; ++e) {
    bad += trainer.TrainIteration().beta != c.beta0 * std::pow(c.gamma_beta, e / 3);
    ++checked;
  }
  // The per-episode log written by the harness.
  ExperimentConfig x;
  x.env = "cooperative";
  x.state_dim = 32;
  x.corpus_episodes = 0;
  x.snapshot_every = 10;
  x.snapshot_episodes = 5;
  x.training = SmallTraining();
  x.training.max_episodes = 40;
  x.training.epoch_episodes = 10;
  const fs::path dir = Scratch("beta");
  harness::RunTrain(x, 3, dir.string());
  std::ifstream in(dir / "episodes.jsonl");
  std::string line;
  int e = 0;
  while (std::getline(in, line)) {
    const double logged = nlohmann::json::parse(line).at("beta").get<double>();
    bad += logged != x.training.beta0 * std::pow(x.training.gamma_beta, e / 10);
    ++checked;
    ++e;
  }
  fs::remove_all(dir);
  return {bad == 0 && e == 40,
          "mismatches=" + std::to_string(bad) + "/" + std::to_string(checked)};
}

// ---------------------------------------------------------------------------
// 11. Reward model.

Outcome RewardModel() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr uint64_t kSeed = 2026;
  const dialogue::ItemCounts caps{4, 4, 4};
  const auto corpus = reward::GenerateSyntheticCorpus(1000, kSeed, caps);

  // Replay the same sessions for their game scores.
  static const char* kAgents[] = {"conceding", "agreeable", "random"};
  auto catalog = std::make_shared<const dialogue::ActionCatalog>(
      dialogue::EnumerateNegotiationActions(caps));
  int reward_bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const uint64_t s = EpisodeSeed(kSeed, static_cast<uint64_t>(k));
    Rng rng(s);
    const Scenario scenario = envs::SampleScenario(rng, caps);
    auto a0 = envs::MakeScriptedAgent(kAgents[UniformInt(rng, 3)]);
    auto a1 = envs::MakeScriptedAgent(kAgents[UniformInt(rng, 3)]);
    const int first = UniformInt(rng, 2);
    a0->BeginEpisode(EpisodeSeed(s, 1));
    a1->BeginEpisode(EpisodeSeed(s, 2));
    envs::NegotiationGame game(scenario, catalog, 20, first);
    const SessionRecord r = envs::PlayNegotiation(game, *a0, *a1);
    const auto& ex = corpus[k];
    reward_bad += !(reward::ExampleFromRecord(r) == ex) ||
                  reward::TaskReward(ex.outcome, ex.values, ex.counts) != r.score_target;
  }

  const auto config = reward::RewardModelConfigFromJson(
      nlohmann::json::parse(harness::ReadTextFile(ConfigPath("reward_model.json"))));
  const std::vector<reward::RewardExample> train(corpus.begin(), corpus.begin() + 700);
  const std::vector<reward::RewardExample> val(corpus.begin() + 700, corpus.begin() + 800);
  const std::vector<reward::RewardExample> test(corpus.begin() + 800, corpus.end());
  std::vector<reward::SessionTokens> sessions;
  for (const auto& ex : train) sessions.push_back(ex.session);
  reward::RewardModel model(config, reward::Vocabulary::Build(sessions));
  reward::TrainRewardModel(model, train, val);
  const auto held = reward::EvaluateRewardModel(model, test);
  const double secs = Seconds(t0);
  const double worst = *std::min_element(held.issue_accuracy.begin(), held.issue_accuracy.end());
  return {worst >= 0.95 && reward_bad == 0 && secs <= 120.0,
          "heldout_accuracy=" + Fix3(held.issue_accuracy[0]) + "/" +
              Fix3(held.issue_accuracy[1]) + "/" + Fix3(held.issue_accuracy[2]) +
              " task_reward_mismatches=" + std::to_string(reward_bad) + "/1000 time=" +
              Fix(secs) + "s"};
}

// ---------------------------------------------------------------------------
// 12. Determinism.

Outcome Determinism() {
  ExperimentConfig c;
  c.env = "negotiation";
  c.state_dim = 48;
  c.negotiation.caps = {2, 2, 2};
  c.negotiation.first_mover = -1;
  c.seeds = {1, 2};
  c.eval_episodes = 20;
  c.snapshot_every = 10;
  c.snapshot_episodes = 5;
  c.corpus_episodes = 20;
  c.training = SmallTraining();
  c.training.max_episodes = 30;
  c.training.epoch_episodes = 10;
  c.training.pretrain_epochs = 2;

  int reports_bad = 0, ckpt_bad = 0;
  for (const char* algorithm : {"oppa", "reinforce"}) {
    c.algorithm = algorithm;
    const fs::path a = Scratch(std::string("det_a_") + algorithm);
    const fs::path b = Scratch(std::string("det_b_") + algorithm);
    harness::RunTrain(c, 4, a.string());
    harness::RunTrain(c, 4, b.string());
    harness::RunEvalCheckpoint((a / "checkpoint").string(), c, (a / "eval").string());
    harness::RunEvalCheckpoint((b / "checkpoint").string(), c, (b / "eval").string());
    reports_bad += TreeBytes(a) != TreeBytes(b);

    const auto loaded = harness::LoadPolicy((a / "checkpoint").string());
    const fs::path again = Scratch(std::string("det_resave_") + algorithm);
    harness::SaveCheckpointDir(*loaded, harness::LoadEnvSpec((a / "checkpoint").string()),
                               again.string());
    ckpt_bad += TreeBytes(a / "checkpoint") != TreeBytes(again);
    for (const auto& p : {a, b, again}) fs::remove_all(p);
  }
  return {reports_bad == 0 && ckpt_bad == 0,
          "report_trees_differing=" + std::to_string(reports_bad) +
              "/2 checkpoint_resave_differing=" + std::to_string(ckpt_bad) + "/2"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

int Main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "gradient checks", GradChecks},
      {2, "loss fixtures", LossFixtures},
      {3, "chain mdp", Chain},
      {4, "pareto and metric oracles", Oracles},
      {5, "worked negotiation example", DemoScenario},
      {6, "replay buffer", Replay},
      {7, "cooperative ablation", CooperativeAblation},
      {8, "negotiation crossplay", NegotiationCrossplay},
      {9, "switches off equal vanilla dqn", AblationIdentity},
      {10, "beta schedule", BetaSchedule},
      {11, "reward model", RewardModel},
      {12, "determinism", Determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace oppa::testing

int main(int argc, char** argv) { return oppa::testing::Main(argc, argv); }
