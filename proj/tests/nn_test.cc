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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "gtest/gtest.h"
#include "oppa/nn/checkpoint.h"
#include "oppa/nn/layers.h"
#include "oppa/nn/optim.h"
#include "oppa/nn/tape.h"

namespace oppa::nn {
namespace {

// Frozen from 30-digit mpmath evaluations.
constexpr double kTanh1p1 = 0.800499021760629706;
constexpr double kHalfTanh1 = 0.380797077977882444;
constexpr double kSoftmax123[] = {0.0900305731703804580, 0.244728471054797652,
                                  0.665240955774821890};
constexpr double kLn2 = 0.693147180559945309;

std::vector<double> RandomVector(Rng& rng, int n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = (2.0 * UniformUnit(rng) - 1.0) * scale;
  return v;
}

void Randomize(ParamStore& store, Rng& rng, double scale) {
  for (int i = 0; i < store.size(); ++i) {
    for (double& v : store.at(i).value.data) v = (2.0 * UniformUnit(rng) - 1.0) * scale;
  }
}

TEST(DenseForwardTest, IdentityWeights) {
  Tape t;
  Var y = DenseForward(t, t.Constant({1, 0}), t.Constant(Tensor({2, 2}, {1, 0, 0, 1})),
                       t.Constant({0, 0}), Activation::kIdentity);
  EXPECT_EQ(t.Data(y), (std::vector<double>{1, 0}));
}

TEST(DenseForwardTest, ZeroPreActivationTanh) {
  Tape t;
  Var y = DenseForward(t, t.Constant({1, 2}), t.Constant(Tensor({1, 2}, {1, 1})),
                       t.Constant({-3}), Activation::kTanh);
  EXPECT_EQ(t.Scalar(y), 0.0);
}

TEST(DenseForwardTest, ScalarTanh) {
  Tape t;
  Var y = DenseForward(t, t.Constant({0.5}), t.Constant(Tensor({1, 1}, {2})),
                       t.Constant({0.1}), Activation::kTanh);
  EXPECT_NEAR(t.Scalar(y), kTanh1p1, 1e-15);
}

TEST(DenseForwardTest, MismatchNamesBothShapes) {
  Tape t;
  try {
    DenseForward(t, t.Constant({1, 2, 3}), t.Constant(Tensor({2, 2}, {1, 0, 0, 1})),
                 t.Constant({0, 0}), Activation::kIdentity);
    FAIL() << "expected dimension mismatch";
  } catch (const OppaError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
    EXPECT_NE(std::string(e.what()).find("[2,2]"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("[3]"), std::string::npos);
  }
}

TEST(GruTest, ZeroParamsZeroState) {
  ParamStore store;
  Rng rng(1);
  GruCellParams p = GruCellParams::Create(store, "g", 3, 4, rng);
  for (int i = 0; i < store.size(); ++i) {
    std::fill(store.at(i).value.data.begin(), store.at(i).value.data.end(), 0.0);
  }
  Tape t;
  Var h = GruStep(t, store, p, t.Constant(std::vector<double>(4, 0.0)),
                  t.Constant({0.3, -1.0, 2.0}));
  for (double v : t.Data(h)) EXPECT_EQ(v, 0.0);
}

TEST(GruTest, HandSetScalarCell) {
  ParamStore store;
  Rng rng(1);
  GruCellParams p = GruCellParams::Create(store, "g", 1, 1, rng);
  for (int i = 0; i < store.size(); ++i) {
    std::fill(store.at(i).value.data.begin(), store.at(i).value.data.end(), 0.0);
  }
  // z = sigmoid(0) = 0.5; candidate = tanh(1 * x) with x = 1.
  store.at("g/h_w").value.data = {1.0, 0.0};
  Tape t;
  Var h = GruStep(t, store, p, t.Constant({0.0}), t.Constant({1.0}));
  EXPECT_NEAR(t.Scalar(h), kHalfTanh1, 1e-15);
}

TEST(GruTest, BoundedOutputProperty) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int in = 1 + UniformInt(rng, 6);
    const int hid = 1 + UniformInt(rng, 6);
    ParamStore store;
    GruCellParams p = GruCellParams::Create(store, "g", in, hid, rng);
    Randomize(store, rng, 5.0);
    Tape t;
    Var h = GruStep(t, store, p, t.Constant(RandomVector(rng, hid)),
                    t.Constant(RandomVector(rng, in, 10.0)));
    for (double v : t.Data(h)) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(GruTest, DimensionMismatch) {
  ParamStore store;
  Rng rng(1);
  GruCellParams p = GruCellParams::Create(store, "g", 2, 3, rng);
  Tape t;
  EXPECT_THROW(GruStep(t, store, p, t.Constant({0, 0}), t.Constant({1, 1})),
               OppaError);
}

class BiGruTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(3);
    fwd_ = GruCellParams::Create(store_, "f", 2, 3, rng);
    bwd_ = GruCellParams::Create(store_, "b", 2, 3, rng);
  }
  ParamStore store_;
  GruCellParams fwd_, bwd_;
};

TEST_F(BiGruTest, SingleStepIsBothDirections) {
  Tape t;
  Var x = t.Constant({0.4, -0.2});
  std::vector<Var> seq = {x};
  std::vector<Var> out = BiGruForward(t, store_, seq, fwd_, bwd_);
  ASSERT_EQ(out.size(), 1u);
  Var zero = t.Constant({0, 0, 0});
  std::vector<double> expect = t.Data(GruStep(t, store_, fwd_, zero, x));
  const auto& b = t.Data(GruStep(t, store_, bwd_, zero, x));
  expect.insert(expect.end(), b.begin(), b.end());
  EXPECT_EQ(t.Data(out[0]), expect);
}

TEST_F(BiGruTest, ReversalSwapsHalves) {
  Rng rng(11);
  std::vector<std::vector<double>> xs;
  for (int j = 0; j < 5; ++j) xs.push_back(RandomVector(rng, 2));
  Tape t;
  std::vector<Var> seq, rev;
  for (const auto& x : xs) seq.push_back(t.Constant(x));
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) rev.push_back(t.Constant(*it));
  // Running reversed input through swapped cells mirrors the original run.
  auto a = BiGruForward(t, store_, seq, fwd_, bwd_);
  auto b = BiGruForward(t, store_, rev, bwd_, fwd_);
  ASSERT_EQ(a.size(), seq.size());
  for (size_t j = 0; j < a.size(); ++j) {
    const auto& u = t.Data(a[j]);
    const auto& v = t.Data(b[a.size() - 1 - j]);
    for (int k = 0; k < 3; ++k) {
      EXPECT_DOUBLE_EQ(u[k], v[3 + k]);
      EXPECT_DOUBLE_EQ(u[3 + k], v[k]);
    }
  }
}

TEST_F(BiGruTest, EmptySequenceRejected) {
  Tape t;
  std::vector<Var> empty;
  EXPECT_THROW(BiGruForward(t, store_, empty, fwd_, bwd_), OppaError);
}

TEST(AttentionTest, SingleHidden) {
  ParamStore store;
  Rng rng(5);
  AttentionParams p = AttentionParams::Create(store, "att", 4, 3, rng);
  Tape t;
  std::vector<Var> hs = {t.Constant({1, 2, 3, 4})};
  AttentionOutput out = Attend(t, store, p, hs);
  EXPECT_EQ(t.Data(out.weights), std::vector<double>{1.0});
  EXPECT_EQ(t.Data(out.context), (std::vector<double>{1, 2, 3, 4}));
}

TEST(AttentionTest, IdenticalHiddensUniform) {
  ParamStore store;
  Rng rng(5);
  AttentionParams p = AttentionParams::Create(store, "att", 4, 3, rng);
  Tape t;
  std::vector<Var> hs(6, t.Constant({0.1, -2, 0.3, 4}));
  AttentionOutput out = Attend(t, store, p, hs);
  for (double w : t.Data(out.weights)) EXPECT_NEAR(w, 1.0 / 6, 1e-15);
}

TEST(AttentionTest, WeightsNormalizedProperty) {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    ParamStore store;
    const int d = 1 + UniformInt(rng, 8);
    AttentionParams p = AttentionParams::Create(store, "att", d, 1 + UniformInt(rng, 5), rng);
    Tape t;
    std::vector<Var> hs;
    const int n = 1 + UniformInt(rng, 10);
    for (int j = 0; j < n; ++j) hs.push_back(t.Constant(RandomVector(rng, d, 3.0)));
    AttentionOutput out = Attend(t, store, p, hs);
    double total = 0;
    for (double w : t.Data(out.weights)) total += w;
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(AttentionTest, EmptyRejected) {
  ParamStore store;
  Rng rng(5);
  AttentionParams p = AttentionParams::Create(store, "att", 4, 3, rng);
  Tape t;
  std::vector<Var> none;
  EXPECT_THROW(Attend(t, store, p, none), OppaError);
}

TEST(SoftmaxTest, Examples) {
  std::vector<double> a = Softmax(std::vector<double>{0, 0});
  EXPECT_EQ(a, (std::vector<double>{0.5, 0.5}));
  std::vector<double> b = Softmax(std::vector<double>{1000, 1000, 1000});
  for (double v : b) EXPECT_NEAR(v, 1.0 / 3, 1e-15);
  std::vector<double> c = Softmax(std::vector<double>{1, 2, 3});
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(c[k], kSoftmax123[k], 1e-15);
}

TEST(SoftmaxTest, SimplexAndShiftInvarianceProperty) {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> z = RandomVector(rng, 1 + UniformInt(rng, 20), 30.0);
    std::vector<double> p = Softmax(z);
    const double shift = (2.0 * UniformUnit(rng) - 1.0) * 100.0;
    std::vector<double> zs = z;
    for (double& v : zs) v += shift;
    std::vector<double> q = Softmax(zs);
    double total = 0;
    for (size_t k = 0; k < p.size(); ++k) {
      EXPECT_GT(p[k], 0.0);
      EXPECT_LE(p[k], 1.0);
      EXPECT_NEAR(p[k], q[k], 1e-9);
      total += p[k];
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(SoftmaxTest, TapeMatchesPlainAndMaskZeroes) {
  Tape t;
  std::vector<bool> mask = {true, false, true};
  Var p = t.Softmax(t.Constant({1, 50, 3}), &mask);
  const auto& v = t.Data(p);
  EXPECT_EQ(v[1], 0.0);
  std::vector<double> ref = Softmax(std::vector<double>{1, 3});
  EXPECT_NEAR(v[0], ref[0], 1e-15);
  EXPECT_NEAR(v[2], ref[1], 1e-15);
}

TEST(CrossEntropyTest, Examples) {
  EXPECT_EQ(CrossEntropy(std::vector<double>{0, 1, 0}, std::vector<double>{0, 1, 0}), 0.0);
  EXPECT_NEAR(CrossEntropy(std::vector<double>{1, 0}, std::vector<double>{0.5, 0.5}),
              kLn2, 1e-15);
  EXPECT_THROW(CrossEntropy(std::vector<double>{1, 0}, std::vector<double>{1}),
               OppaError);
}

TEST(CrossEntropyTest, ClampAvoidsInfinity) {
  const double ce = CrossEntropy(std::vector<double>{1, 0}, std::vector<double>{0, 1});
  EXPECT_NEAR(ce, -std::log(1e-12), 1e-9);
}

TEST(CrossEntropyTest, GibbsInequalityProperty) {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + UniformInt(rng, 10);
    std::vector<double> p = Softmax(RandomVector(rng, n, 4.0));
    std::vector<double> q = Softmax(RandomVector(rng, n, 4.0));
    EXPECT_GE(CrossEntropy(p, q), CrossEntropy(p, p) - 1e-12);
  }
}

TEST(BackwardTest, QuadraticAtMinimumHasZeroGrad) {
  ParamStore store;
  store.Add("w", {2, 2});
  store.at("w").value.data = {1, 0, 0, 1};
  Tape t;
  Var x = t.Constant({0.7, -1.3});
  Var diff = t.Sub(t.MatVec(t.Param(store, "w"), x), t.Constant({0.7, -1.3}));
  Var loss = t.Scale(t.Dot(diff, diff), 0.5);
  t.Backward(loss);
  for (double g : store.at("w").grad.data) EXPECT_EQ(g, 0.0);
}

TEST(BackwardTest, LinearCase) {
  ParamStore store;
  store.Add("w", {1, 2});
  Tape t;
  Var loss = t.Sum(t.MatVec(t.Param(store, "w"), t.Constant({2, 3})));
  t.Backward(loss);
  EXPECT_EQ(store.at("w").grad.data, (std::vector<double>{2, 3}));
}

TEST(BackwardTest, UnusedParamsStayZeroAndCallsAccumulate) {
  ParamStore store;
  store.Add("w", {1, 2});
  store.Add("unused", {3});
  for (int k = 0; k < 2; ++k) {
    Tape t;
    t.Backward(t.Sum(t.MatVec(t.Param(store, "w"), t.Constant({2, 3}))));
  }
  EXPECT_EQ(store.at("w").grad.data, (std::vector<double>{4, 6}));
  EXPECT_EQ(store.at("unused").grad.data, (std::vector<double>{0, 0, 0}));
}

TEST(BackwardTest, WithoutForwardIsError) {
  Tape t;
  try {
    t.Backward(Var{0});
    FAIL();
  } catch (const OppaError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFailedPrecondition);
  }
}

TEST(AdamTest, ZeroGradFixedPoint) {
  ParamStore store;
  Rng rng(1);
  store.AddGlorot("w", {3, 3}, rng);
  const Tensor before = store.at("w").value;
  AdamStep(store);
  EXPECT_EQ(store.at("w").value, before);
  EXPECT_EQ(store.step_count(), 1);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  ParamStore store;
  store.Add("x", {1});
  store.at("x").value.data = {0.25};
  store.at("x").grad.data = {1.0};
  AdamStep(store);
  // Bias-corrected moments are both exactly 1, so the step is lr / (1 + eps).
  EXPECT_NEAR(store.at("x").value.data[0], 0.25 - 1e-3, 1e-3 * 1e-7);
  EXPECT_EQ(store.at("x").grad.data[0], 1.0);
}

TEST(AdamTest, ConstantGradientDescends) {
  ParamStore store;
  store.Add("x", {1});
  store.at("x").grad.data = {-2.0};
  AdamStep(store);
  const double first = store.at("x").value.data[0];
  AdamStep(store);
  EXPECT_GT(first, 0.0);
  EXPECT_GT(store.at("x").value.data[0], first);
}

TEST(AdamTest, NonFiniteGradRejectedWithoutUpdate) {
  ParamStore store;
  store.Add("a", {2});
  store.Add("b", {1});
  store.at("a").grad.data = {1.0, 1.0};
  store.at("b").grad.data = {NAN};
  ParamStore snapshot = store;
  EXPECT_THROW(AdamStep(store), OppaError);
  EXPECT_TRUE(store.ValuesEqual(snapshot));
  EXPECT_EQ(store.at("a").moment1, snapshot.at("a").moment1);
  EXPECT_EQ(store.step_count(), 0);
}

TEST(GradCheckTest, DenseTanhCrossEntropyStack) {
  Rng rng(12);
  ParamStore store;
  DenseLayer l1 = DenseLayer::Create(store, "l1", 5, 7, rng);
  DenseLayer l2 = DenseLayer::Create(store, "l2", 7, 4, rng);
  Randomize(store, rng, 0.8);
  const std::vector<double> x = RandomVector(rng, 5);
  const std::vector<double> target = Softmax(RandomVector(rng, 4));
  auto build = [&](Tape& t, ParamStore& s) {
    Var h = l1.Forward(t, s, t.Constant(x), Activation::kTanh);
    Var p = t.Softmax(l2.Forward(t, s, h, Activation::kIdentity));
    return CrossEntropy(t, target, p);
  };
  EXPECT_LT(GradCheck(build, store), 1e-4);
}

TEST(GradCheckTest, GruUnrolledThreeSteps) {
  Rng rng(13);
  ParamStore store;
  GruCellParams p = GruCellParams::Create(store, "g", 3, 4, rng);
  Randomize(store, rng, 0.7);
  std::vector<std::vector<double>> xs = {RandomVector(rng, 3), RandomVector(rng, 3),
                                         RandomVector(rng, 3)};
  const std::vector<double> y = RandomVector(rng, 4);
  auto build = [&](Tape& t, ParamStore& s) {
    std::vector<Var> seq;
    for (const auto& x : xs) seq.push_back(t.Constant(x));
    Var h = GruForward(t, s, p, seq).back();
    Var d = t.Sub(h, t.Constant(y));
    return t.Dot(d, d);
  };
  EXPECT_LT(GradCheck(build, store), 1e-4);
}

TEST(GradCheckTest, BiGruAttentionSoftmaxHead) {
  Rng rng(14);
  ParamStore store;
  GruCellParams f = GruCellParams::Create(store, "f", 3, 4, rng);
  GruCellParams b = GruCellParams::Create(store, "b", 3, 4, rng);
  AttentionParams att = AttentionParams::Create(store, "att", 8, 5, rng);
  DenseLayer head = DenseLayer::Create(store, "head", 8, 3, rng);
  Randomize(store, rng, 0.6);
  std::vector<std::vector<double>> xs;
  for (int j = 0; j < 4; ++j) xs.push_back(RandomVector(rng, 3));
  auto build = [&](Tape& t, ParamStore& s) {
    std::vector<Var> seq;
    for (const auto& x : xs) seq.push_back(t.Constant(x));
    std::vector<Var> hs = BiGruForward(t, s, seq, f, b);
    AttentionOutput out = Attend(t, s, att, hs);
    Var p = t.Softmax(head.Forward(t, s, out.context, Activation::kIdentity));
    return CrossEntropy(t, {0, 1, 0}, p);
  };
  EXPECT_LT(GradCheck(build, store), 1e-4);
}

TEST(DeterminismTest, SameSeedSameForwardAndBackward) {
  auto run = [](uint64_t seed) {
    Rng rng(seed);
    ParamStore store;
    DenseLayer l = DenseLayer::Create(store, "l", 4, 3, rng);
    Tape t;
    Var p = t.Softmax(l.Forward(t, store, t.Constant(RandomVector(rng, 4)),
                                Activation::kRelu));
    t.Backward(CrossEntropy(t, {1, 0, 0}, p));
    return store;
  };
  EXPECT_TRUE(run(99) == run(99));
}

class CheckpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("oppa_ckpt_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(dir_);
    Rng rng(31);
    DenseLayer::Create(store_, "a", 3, 2, rng);
    GruCellParams::Create(store_, "g", 2, 2, rng);
    for (int i = 0; i < store_.size(); ++i) {
      for (double& g : store_.at(i).grad.data) g = UniformUnit(rng) - 0.5;
    }
    AdamStep(store_);
    AdamStep(store_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  static std::string Slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  }

  std::filesystem::path dir_;
  ParamStore store_;
};

TEST_F(CheckpointTest, SaveLoadSaveIsByteIdentical) {
  SaveCheckpoint(store_, (dir_ / "one").string(), {{"kind", "test"}});
  nlohmann::ordered_json meta;
  ParamStore loaded = LoadCheckpoint((dir_ / "one").string(), &meta);
  EXPECT_TRUE(loaded == store_);
  EXPECT_EQ(loaded.step_count(), 2);
  EXPECT_EQ(meta["kind"], "test");
  SaveCheckpoint(loaded, (dir_ / "two").string(), meta);
  EXPECT_EQ(Slurp(dir_ / "one" / kManifestFile), Slurp(dir_ / "two" / kManifestFile));
  EXPECT_EQ(Slurp(dir_ / "one" / kBlobFile), Slurp(dir_ / "two" / kBlobFile));
}

TEST_F(CheckpointTest, TruncatedBlob) {
  SaveCheckpoint(store_, dir_.string());
  std::filesystem::resize_file(dir_ / kBlobFile,
                               std::filesystem::file_size(dir_ / kBlobFile) - 8);
  try {
    LoadCheckpoint(dir_.string());
    FAIL();
  } catch (const OppaError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTruncatedBlob);
  }
}

TEST_F(CheckpointTest, EditedShapeNamesEntry) {
  SaveCheckpoint(store_, dir_.string());
  auto manifest = nlohmann::ordered_json::parse(Slurp(dir_ / kManifestFile));
  manifest["tensors"]["g/r_w"]["shape"] = {2, 3};
  std::ofstream(dir_ / kManifestFile) << manifest.dump(2);
  try {
    LoadCheckpoint(dir_.string());
    FAIL();
  } catch (const OppaError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
    EXPECT_NE(std::string(e.what()).find("g/r_w"), std::string::npos);
  }
}

TEST_F(CheckpointTest, CorruptManifest) {
  SaveCheckpoint(store_, dir_.string());
  std::ofstream(dir_ / kManifestFile) << "{\"format\": ";
  try {
    LoadCheckpoint(dir_.string());
    FAIL();
  } catch (const OppaError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorruptManifest);
  }
}

TEST_F(CheckpointTest, LoadIntoMismatchedModel) {
  SaveCheckpoint(store_, dir_.string());
  ParamStore other;
  Rng rng(1);
  DenseLayer::Create(other, "a", 3, 3, rng);
  GruCellParams::Create(other, "g", 2, 2, rng);
  EXPECT_THROW(LoadCheckpointInto(other, dir_.string()), OppaError);
}

}  // namespace
}  // namespace oppa::nn
