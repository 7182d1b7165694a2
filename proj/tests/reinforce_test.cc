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


#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "oppa/envs/environment.h"
#include "oppa/nn/optim.h"
#include "oppa/policy/reinforce.h"

namespace oppa::policy {
namespace {

namespace fs = std::filesystem;

template <typename F>
void ExpectCode(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "no exception";
  } catch (const OppaError& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

std::vector<double> RandomVector(Rng& rng, int n) {
  std::vector<double> v(n);
  for (double& x : v) x = 2.0 * UniformUnit(rng) - 1.0;
  return v;
}

std::string TreeBytes(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir));
  }
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) {
    std::ifstream in(dir / f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out += f.string() + "\n" + ss.str();
  }
  return out;
}

TEST(ReturnsTest, DiscountedBackwards) {
  PgEpisode ep(3);
  ep[0].reward = 1.0;
  ep[1].reward = 0.0;
  ep[2].reward = 2.0;
  EXPECT_EQ(DiscountedReturns(ep, 0.5), (std::vector<double>{1.5, 1.0, 2.0}));
  EXPECT_EQ(DiscountedReturns(ep, 0.0), (std::vector<double>{1.0, 0.0, 2.0}));
}

TEST(PolicyNetworkTest, MaskedDistribution) {
  Rng rng(1);
  PolicyNetwork pi(4, 5, 8, rng);
  const std::vector<bool> legal = {true, false, true, false, true};
  const std::vector<double> p = pi.Distribution({0.1, 0.2, 0.3, 0.4}, legal);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    if (!legal[i]) EXPECT_EQ(p[i], 0.0);
    sum += p[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  ExpectCode(ErrorCode::kDimensionMismatch, [&] { pi.Distribution({1.0}, {}); });
}

std::vector<PgEpisode> RandomBatch(Rng& rng, int state_dim, int num_actions) {
  std::vector<PgEpisode> batch;
  for (int e = 0; e < 3; ++e) {
    PgEpisode ep;
    for (int t = 0; t < 2 + e; ++t) {
      PgStep s;
      s.state = RandomVector(rng, state_dim);
      s.action = UniformInt(rng, num_actions);
      s.reward = 2.0 * UniformUnit(rng) - 0.5;
      ep.push_back(s);
    }
    batch.push_back(ep);
  }
  return batch;
}

TEST(ReinforceLossTest, GradientMatchesFiniteDifferences) {
  Rng rng(2);
  PolicyNetwork pi(5, 4, 9, rng);
  const std::vector<PgEpisode> batch = RandomBatch(rng, 5, 4);
  auto build = [&](Tape& t, ParamStore& s) { return ReinforceLoss(t, pi, s, batch, 0.9); };
  EXPECT_LT(nn::GradCheck(build, pi.params()), 1e-4);
}

TEST(ReinforceLossTest, ZeroRewardsLeaveParametersUnchanged) {
  Rng rng(3);
  PolicyNetwork pi(5, 4, 9, rng);
  std::vector<PgEpisode> batch = RandomBatch(rng, 5, 4);
  for (auto& ep : batch) {
    for (auto& s : ep) s.reward = 0.0;
  }
  const ParamStore before = pi.params();
  ReinforceUpdate(pi, batch, 0.9, 0.5);
  EXPECT_TRUE(pi.params().ValuesEqual(before));
}

TEST(ReinforceLossTest, ConstantReturnsLeaveParametersUnchanged) {
  Rng rng(4);
  PolicyNetwork pi(2, 3, 4, rng);
  std::vector<PgEpisode> batch(4, PgEpisode(1));
  for (int e = 0; e < 4; ++e) {
    batch[e][0].state = {1.0, 0.0};
    batch[e][0].action = e % 3;
    batch[e][0].reward = 3.0;
  }
  const ParamStore before = pi.params();
  ReinforceUpdate(pi, batch, 0.9, 0.5);
  EXPECT_TRUE(pi.params().ValuesEqual(before));
}

TEST(ReinforceLossTest, EmptyInputsRejected) {
  Rng rng(5);
  PolicyNetwork pi(2, 2, 3, rng);
  ExpectCode(ErrorCode::kInvalidArgument,
             [&] { ReinforceUpdate(pi, std::vector<PgEpisode>{}, 0.9, 0.1); });
  ExpectCode(ErrorCode::kInvalidArgument,
             [&] { ReinforceUpdate(pi, std::vector<PgEpisode>{PgEpisode{}}, 0.9, 0.1); });
}

TEST(ReinforceLossTest, BanditProbabilityRisesMonotonically) {
  Rng rng(6);
  PolicyNetwork pi(1, 2, 4, rng);
  const std::vector<double> s = {1.0};
  double previous = pi.Distribution(s, {})[0];
  const double start = previous;
  for (int update = 0; update < 300; ++update) {
    std::vector<PgEpisode> batch;
    for (int e = 0; e < 8; ++e) {
      const double p0 = pi.Distribution(s, {})[0];
      PgStep step;
      step.state = s;
      step.action = UniformUnit(rng) < p0 ? 0 : 1;
      step.reward = step.action == 0 ? 1.0 : 0.0;
      batch.push_back({step});
    }
    ReinforceUpdate(pi, batch, 1.0, 0.2);
    const double now = pi.Distribution(s, {})[0];
    ASSERT_GE(now, previous) << "update " << update;
    previous = now;
  }
  EXPECT_GT(previous, start);
  EXPECT_GT(previous, 0.95);
}

TEST(ReinforceTrainerTest, SameSeedSameRun) {
  envs::CooperativeEnv env_a(dialogue::CoopConfig::DeskScale(), 32);
  envs::CooperativeEnv env_b(dialogue::CoopConfig::DeskScale(), 32);
  TrainingConfig c;
  c.hidden = 16;
  c.reinforce_batch = 4;
  ReinforceTrainer a(c, env_a), b(c, env_b);
  int updates = 0;
  for (int e = 0; e < 20; ++e) {
    const EpisodeStats sa = a.TrainIteration();
    const EpisodeStats sb = b.TrainIteration();
    ASSERT_EQ(sa.actions, sb.actions);
    updates += sa.updates;
  }
  EXPECT_EQ(updates, 5);
  EXPECT_TRUE(a.agent().policy().params() == b.agent().policy().params());
}

TEST(ReinforceTrainerTest, SaveLoadSaveIsByteIdentical) {
  envs::CooperativeEnv env(dialogue::CoopConfig::DeskScale(), 32);
  TrainingConfig c;
  c.hidden = 16;
  c.reinforce_batch = 2;
  ReinforceTrainer trainer(c, env);
  for (int e = 0; e < 6; ++e) trainer.TrainIteration();
  const fs::path a = fs::temp_directory_path() / "oppa_reinforce_a";
  const fs::path b = fs::temp_directory_path() / "oppa_reinforce_b";
  fs::remove_all(a);
  fs::remove_all(b);
  trainer.agent().Save(a.string());
  ReinforceAgent::Load(a.string()).Save(b.string());
  EXPECT_EQ(TreeBytes(a), TreeBytes(b));
  ExpectCode(ErrorCode::kCorruptManifest, [&] {
    std::ofstream(a / "agent.json") << "{\"format\": \"oppa-agent\"}";
    ReinforceAgent::Load(a.string());
  });
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(ReinforceTrainerTest, ImitationReproducesExpertTrace) {
  envs::CooperativeEnv env(dialogue::CoopConfig::DeskScale(), 32);
  const std::vector<PretrainExample> corpus = CollectExpertCorpus(env, 40, 9);
  TrainingConfig c;
  c.hidden = 64;
  c.pretrain_epochs = 60;
  ReinforceTrainer trainer(c, env);
  const PretrainReport report = trainer.Pretrain(corpus);
  EXPECT_GT(report.q_accuracy, 0.95);
  int agree = 0;
  for (int e = 0; e < 40; ++e) {
    env.Reset(EpisodeSeed(9, e));
    bool same = true;
    while (!env.done()) {
      const int a = trainer.agent().Act(env.Observe(), env.LegalMask());
      same = same && a == env.ExpertAction();
      env.Step(a);
    }
    agree += same;
  }
  EXPECT_GE(agree, 36);
}

}  // namespace
}  // namespace oppa::policy
