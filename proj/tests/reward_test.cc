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
#include "oppa/envs/agents.h"
#include "oppa/envs/environment.h"
#include "oppa/nn/optim.h"
#include "oppa/reward/reward_model.h"

namespace oppa::reward {
namespace {

namespace fs = std::filesystem;
using dialogue::Scenario;

template <typename F>
void ExpectCode(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "no exception";
  } catch (const OppaError& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

const Scenario kDemo{{3, 1, 1}, {0, 6, 4}, {1, 4, 3}};

std::shared_ptr<const dialogue::ActionCatalog> Catalog() {
  return std::make_shared<const dialogue::ActionCatalog>(
      dialogue::EnumerateNegotiationActions({4, 4, 4}));
}

// Agent 1 claims the books, agent 0 accepts.
envs::SessionRecord DemoRecord() {
  envs::NegotiationGame game(kDemo, Catalog(), 20, 1);
  game.Step(1, dialogue::DialogueAct::Propose({3, 0, 0}));
  game.Step(0, dialogue::DialogueAct::Control(dialogue::ActKind::kAgree));
  envs::SessionRecord r;
  envs::FillNegotiationOutcome(game, 0, r);
  return r;
}

RewardModelConfig TinyConfig() {
  RewardModelConfig c;
  c.embed_dim = 3;
  c.word_hidden = 3;
  c.session_hidden = 3;
  c.goal_hidden = 2;
  c.attention_dim = 3;
  c.output_dim = 4;
  c.caps = {4, 4, 4};
  c.epochs = 3;
  c.batch_size = 8;
  c.learning_rate = 1e-2;
  return c;
}

RewardModel TinyModel(const std::vector<RewardExample>& corpus, RewardModelConfig c = TinyConfig()) {
  std::vector<SessionTokens> sessions;
  for (const auto& ex : corpus) sessions.push_back(ex.session);
  return RewardModel(c, Vocabulary::Build(sessions));
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

TEST(TokenizeTest, DemoSession) {
  const SessionTokens t = TokenizeSession(DemoRecord());
  EXPECT_EQ(t.tokens, (std::vector<std::string>{"<them>", "propose", "b=3", "h=0", "l=0", "<you>",
                                                "agree"}));
  EXPECT_EQ(t.goal_tokens, (std::vector<std::string>{"book", "n=3", "v=0", "hat", "n=1", "v=6",
                                                     "ball", "n=1", "v=4"}));
}

TEST(TokenizeTest, CooperativeSessionRejected) {
  envs::SessionRecord r;
  r.env = dialogue::EnvKind::kCooperative;
  ExpectCode(ErrorCode::kInvalidArgument, [&] { TokenizeSession(r); });
}

TEST(VocabularyTest, UnknownIsZeroAndRoundTrips) {
  const Vocabulary v = Vocabulary::Build({TokenizeSession(DemoRecord())});
  EXPECT_EQ(v.words()[0], "<unk>");
  EXPECT_EQ(v.Lookup("never-seen"), 0);
  EXPECT_GT(v.Lookup("agree"), 0);
  EXPECT_TRUE(std::is_sorted(v.words().begin() + 1, v.words().end()));
  const Vocabulary back = Vocabulary::FromJson(v.ToJson());
  EXPECT_EQ(back.words(), v.words());
  ExpectCode(ErrorCode::kCorruptManifest, [] { Vocabulary::FromJson(nlohmann::json{"a"}); });
  ExpectCode(ErrorCode::kCorruptManifest,
             [] { Vocabulary::FromJson(nlohmann::json{"<unk>", "a", "a"}); });
}

TEST(TaskRewardTest, DemoScores) {
  EXPECT_EQ(TaskReward({0, 1, 1}, kDemo.values_a, kDemo.counts), 10);
  EXPECT_EQ(TaskReward({3, 0, 0}, kDemo.values_b, kDemo.counts), 3);
  EXPECT_EQ(TaskReward({0, 0, 0}, kDemo.values_a, kDemo.counts), 0);
  EXPECT_EQ(TaskReward(kDemo.counts, kDemo.values_a, kDemo.counts), 10);
  ExpectCode(ErrorCode::kInvalidArgument, [] { TaskReward({4, 0, 0}, kDemo.values_a, kDemo.counts); });
  ExpectCode(ErrorCode::kInvalidArgument, [] { TaskReward({-1, 0, 0}, kDemo.values_a, kDemo.counts); });
}

TEST(TaskRewardTest, LinearInValues) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Scenario s = envs::SampleScenario(rng, {4, 4, 4});
    ItemCounts o{};
    for (int i = 0; i < 3; ++i) o[i] = UniformInt(rng, s.counts[i] + 1);
    const int c = 1 + UniformInt(rng, 5);
    ItemCounts scaled = s.values_a;
    for (int& v : scaled) v *= c;
    EXPECT_EQ(TaskReward(o, scaled, s.counts), c * TaskReward(o, s.values_a, s.counts));
    EXPECT_EQ(TaskReward(s.counts, s.values_a, s.counts), 10);
  }
}

TEST(TaskRewardTest, TrueOutcomeMatchesGameScore) {
  static const char* kAgents[] = {"conceding", "agreeable", "random"};
  auto catalog = Catalog();
  Rng rng(2);
  int agreed = 0;
  for (int k = 0; k < 300; ++k) {
    const Scenario s = envs::SampleScenario(rng, {4, 4, 4});
    auto a0 = envs::MakeScriptedAgent(kAgents[k % 3]);
    auto a1 = envs::MakeScriptedAgent(kAgents[(k / 3) % 3]);
    a0->BeginEpisode(k);
    a1->BeginEpisode(k + 1000);
    envs::NegotiationGame game(s, catalog, 20, k % 2);
    const envs::SessionRecord r = envs::PlayNegotiation(game, *a0, *a1);
    const RewardExample ex = ExampleFromRecord(r);
    EXPECT_EQ(TaskReward(ex.outcome, ex.values, ex.counts), r.score_target);
    agreed += r.outcome == "agreed";
  }
  EXPECT_GT(agreed, 100);
}

TEST(DecodeTest, ArgmaxWithLowestTie) {
  EXPECT_EQ(DecodeOutput({{0.1, 0.7, 0.2}, {0.5, 0.5}, {0.2, 0.2, 0.2, 0.2, 0.2}}),
            (ItemCounts{1, 0, 0}));
  ExpectCode(ErrorCode::kInvalidArgument, [] { DecodeOutput({{1.0}}); });
}

TEST(DecodeTest, AgreesWithExhaustiveScan) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::vector<double>> d(3);
    ItemCounts expected{};
    for (int i = 0; i < 3; ++i) {
      const int n = 1 + UniformInt(rng, 5);
      for (int k = 0; k < n; ++k) d[i].push_back(UniformInt(rng, 4) / 4.0);
      int best = 0;
      for (int k = 1; k < n; ++k) {
        if (d[i][k] > d[i][best]) best = k;
      }
      expected[i] = best;
    }
    EXPECT_EQ(DecodeOutput(d), expected);
  }
}

TEST(RewardModelTest, AttentionIsSimplexAndSingleTokenIsOne) {
  const auto corpus = GenerateSyntheticCorpus(20, 4, {4, 4, 4});
  const RewardModel m = TinyModel(corpus);
  for (const auto& ex : corpus) {
    double sum = 0.0;
    for (double a : m.AttentionWeights(ex.session)) sum += a;
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
  SessionTokens one{{"agree"}, {"book"}};
  EXPECT_EQ(m.AttentionWeights(one), std::vector<double>{1.0});
}

TEST(RewardModelTest, DistributionsAreMaskedSimplices) {
  const auto corpus = GenerateSyntheticCorpus(10, 5, {4, 4, 4});
  const RewardModel m = TinyModel(corpus);
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> h(m.config().output_dim);
    for (double& x : h) x = 200.0 * (UniformUnit(rng) - 0.5);
    const ItemCounts counts{UniformInt(rng, 5), UniformInt(rng, 5), UniformInt(rng, 5)};
    Tape tape;
    const auto dists = m.PredictIssues(tape, const_cast<ParamStore&>(m.params()),
                                       tape.Constant(h), counts);
    for (int i = 0; i < 3; ++i) {
      const auto& p = tape.Data(dists[i]);
      ASSERT_EQ(p.size(), 5u);
      double sum = 0.0;
      for (int k = 0; k < 5; ++k) {
        EXPECT_TRUE(std::isfinite(p[k]));
        if (k > counts[i]) EXPECT_EQ(p[k], 0.0);
        sum += p[k];
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(RewardModelTest, ZeroClassifierIsUniform) {
  const auto corpus = GenerateSyntheticCorpus(5, 7, {4, 4, 4});
  RewardModel m = TinyModel(corpus);
  for (int i = 0; i < 3; ++i) {
    for (const char* part : {"w", "b"}) {
      auto& data = m.params().at(StrCat("rm/issue", i, "/", part)).value.data;
      data.assign(data.size(), 0.0);
    }
  }
  const auto dists = m.Predict(corpus[0].session, {3, 1, 2});
  EXPECT_EQ(dists[0], (std::vector<double>{0.25, 0.25, 0.25, 0.25, 0.0}));
  EXPECT_EQ(dists[1], (std::vector<double>{0.5, 0.5, 0.0, 0.0, 0.0}));
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(dists[2][k], 1.0 / 3.0, 1e-15);
}

TEST(RewardModelTest, CountBeyondCapRejected) {
  const auto corpus = GenerateSyntheticCorpus(5, 8, {4, 4, 4});
  RewardModelConfig c = TinyConfig();
  c.caps = {2, 2, 2};
  const RewardModel m = TinyModel(corpus, c);
  ExpectCode(ErrorCode::kInvalidArgument, [&] { m.Predict(corpus[0].session, {3, 0, 0}); });
  ExpectCode(ErrorCode::kInvalidArgument, [&] { m.Predict({{}, {"book"}}, {1, 1, 1}); });
  ExpectCode(ErrorCode::kInvalidArgument, [&] { m.Predict({{"agree"}, {}}, {1, 1, 1}); });
}

TEST(RewardModelTest, SingleClassIssuesHaveZeroLoss) {
  const auto corpus = GenerateSyntheticCorpus(5, 9, {4, 4, 4});
  RewardModel m = TinyModel(corpus);
  Tape tape;
  EXPECT_EQ(tape.Scalar(m.Loss(tape, m.params(), corpus[0].session, {0, 0, 0}, {0, 0, 0})), 0.0);
}

TEST(RewardModelTest, GradientThroughFullStack) {
  RewardModelConfig c = TinyConfig();
  c.caps = {2, 2, 2};
  SessionTokens s{{"<them>", "propose", "b=1", "<you>", "agree"}, {"book", "n=2", "v=3"}};
  RewardModel m(c, Vocabulary::Build({s}));
  auto build = [&](Tape& t, ParamStore& store) {
    return m.Loss(t, store, s, {2, 1, 2}, {1, 0, 2});
  };
  nn::GradCheckOptions opts;
  opts.step = 1e-6;
  EXPECT_LT(nn::GradCheck(build, m.params(), opts), 1e-4);
}

TEST(RewardModelTest, TrainingIsDeterministicAndReducesLoss) {
  const auto corpus = GenerateSyntheticCorpus(40, 10, {4, 4, 4});
  RewardModel a = TinyModel(corpus);
  RewardModel b = TinyModel(corpus);
  const double before = EvaluateRewardModel(a, corpus).mean_loss;
  const RewardReport ra = TrainRewardModel(a, corpus);
  TrainRewardModel(b, corpus);
  EXPECT_TRUE(a.params() == b.params());
  EXPECT_LT(ra.mean_loss, before);
  EXPECT_EQ(ra.examples, 40);
  ExpectCode(ErrorCode::kInvalidArgument, [&] { TrainRewardModel(a, {}); });
}

TEST(RewardModelTest, ValidationKeepsBestEpoch) {
  const auto corpus = GenerateSyntheticCorpus(60, 11, {4, 4, 4});
  const std::vector<RewardExample> train(corpus.begin(), corpus.begin() + 40);
  const std::vector<RewardExample> val(corpus.begin() + 40, corpus.end());
  RewardModelConfig c = TinyConfig();
  double best = std::numeric_limits<double>::infinity();
  for (int epochs = 1; epochs <= 3; ++epochs) {
    c.epochs = epochs;
    RewardModel m = TinyModel(corpus, c);
    TrainRewardModel(m, train);
    best = std::min(best, EvaluateRewardModel(m, val).mean_loss);
  }
  RewardModel m = TinyModel(corpus, c);
  TrainRewardModel(m, train, val);
  EXPECT_EQ(EvaluateRewardModel(m, val).mean_loss, best);
}

TEST(CorpusTest, GenerationIsDeterministic) {
  EXPECT_EQ(GenerateSyntheticCorpus(30, 12, {4, 4, 4}), GenerateSyntheticCorpus(30, 12, {4, 4, 4}));
  EXPECT_NE(GenerateSyntheticCorpus(30, 12, {4, 4, 4}), GenerateSyntheticCorpus(30, 13, {4, 4, 4}));
}

TEST(CorpusTest, JsonlRoundTrip) {
  const auto corpus = GenerateSyntheticCorpus(25, 14, {4, 4, 4});
  const fs::path p = fs::temp_directory_path() / "oppa_reward_corpus.jsonl";
  WriteCorpusJsonl(corpus, p.string());
  EXPECT_EQ(ReadCorpusJsonl(p.string()), corpus);
  std::ofstream(p) << "{\"tokens\": 3}\n";
  ExpectCode(ErrorCode::kInvalidArgument, [&] { ReadCorpusJsonl(p.string()); });
  fs::remove(p);
  ExpectCode(ErrorCode::kIo, [&] { ReadCorpusJsonl(p.string()); });
}

TEST(CheckpointTest, SaveLoadSaveIsByteIdentical) {
  const auto corpus = GenerateSyntheticCorpus(20, 15, {4, 4, 4});
  RewardModel m = TinyModel(corpus);
  TrainRewardModel(m, corpus);
  const fs::path a = fs::temp_directory_path() / "oppa_rm_a";
  const fs::path b = fs::temp_directory_path() / "oppa_rm_b";
  fs::remove_all(a);
  fs::remove_all(b);
  m.Save(a.string());
  const RewardModel loaded = RewardModel::Load(a.string());
  loaded.Save(b.string());
  EXPECT_EQ(TreeBytes(a), TreeBytes(b));
  EXPECT_EQ(loaded.Predict(corpus[3].session, corpus[3].counts),
            m.Predict(corpus[3].session, corpus[3].counts));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(ConfigTest, JsonRoundTripAndUnknownKeys) {
  RewardModelConfig c = TinyConfig();
  c.seed = 99;
  const RewardModelConfig back = RewardModelConfigFromJson(RewardModelConfigToJson(c));
  EXPECT_EQ(RewardModelConfigToJson(back), RewardModelConfigToJson(c));
  ExpectCode(ErrorCode::kInvalidArgument,
             [] { RewardModelConfigFromJson(nlohmann::json{{"hidden", 3}}); });
  ExpectCode(ErrorCode::kInvalidArgument,
             [] { RewardModelConfigFromJson(nlohmann::json{{"embed_dim", 0}}); });
}

TEST(ConfigTest, DefaultsFollowPublishedSizes) {
  const RewardModelConfig c;
  EXPECT_EQ(c.word_hidden, 128);
  EXPECT_EQ(c.session_hidden, 256);
  EXPECT_EQ(c.goal_hidden, 64);
  EXPECT_EQ(c.output_dim, 256);
}

}  // namespace
}  // namespace oppa::reward
