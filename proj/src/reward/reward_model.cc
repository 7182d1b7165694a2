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


#include "oppa/reward/reward_model.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "oppa/envs/agents.h"
#include "oppa/envs/environment.h"
#include "oppa/nn/checkpoint.h"
#include "oppa/nn/optim.h"

namespace oppa::reward {

namespace fs = std::filesystem;
using dialogue::Actor;
using nlohmann::json;
using nn::Activation;

SessionTokens TokenizeSession(const envs::SessionRecord& record) {
  if (record.env != dialogue::EnvKind::kNegotiation) {
    Fail(ErrorCode::kInvalidArgument, "reward model tokens need a negotiation session");
  }
  SessionTokens out;
  for (const auto& act : record.acts) {
    out.tokens.push_back(act.actor == Actor::kTarget ? "<you>" : "<them>");
    std::istringstream words(dialogue::RenderAct(act));
    std::string w;
    while (words >> w) out.tokens.push_back(w);
  }
  const ItemCounts& values = record.scenario.values(record.target_agent);
  for (int i = 0; i < kNumItemTypes; ++i) {
    out.goal_tokens.push_back(dialogue::kItemNames[i]);
    out.goal_tokens.push_back("n=" + std::to_string(record.scenario.counts[i]));
    out.goal_tokens.push_back("v=" + std::to_string(values[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary() { Add(kUnknown); }

void Vocabulary::Add(const std::string& word) {
  if (index_.emplace(word, size()).second) words_.push_back(word);
}

Vocabulary Vocabulary::Build(const std::vector<SessionTokens>& sessions) {
  std::vector<std::string> all;
  for (const auto& s : sessions) {
    all.insert(all.end(), s.tokens.begin(), s.tokens.end());
    all.insert(all.end(), s.goal_tokens.begin(), s.goal_tokens.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  Vocabulary v;
  for (const auto& w : all) v.Add(w);
  return v;
}

int Vocabulary::Lookup(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? 0 : it->second;
}

std::vector<int> Vocabulary::Encode(const std::vector<std::string>& words) const {
  std::vector<int> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(Lookup(w));
  return out;
}

json Vocabulary::ToJson() const { return words_; }

Vocabulary Vocabulary::FromJson(const json& j) {
  Vocabulary v;
  const auto words = j.get<std::vector<std::string>>();
  if (words.empty() || words[0] != kUnknown) {
    Fail(ErrorCode::kCorruptManifest, "vocabulary must start with ", kUnknown);
  }
  for (const auto& w : words) v.Add(w);
  if (v.size() != static_cast<int>(words.size())) {
    Fail(ErrorCode::kCorruptManifest, "vocabulary has duplicate words");
  }
  return v;
}

// ---------------------------------------------------------------------------

void RewardModelConfig::Validate() const {
  if (embed_dim < 1 || word_hidden < 1 || session_hidden < 1 || goal_hidden < 1 ||
      attention_dim < 1 || output_dim < 1) {
    Fail(ErrorCode::kInvalidArgument, "reward model sizes must be >= 1");
  }
  for (int c : caps) {
    if (c < 1) Fail(ErrorCode::kInvalidArgument, "reward model caps must be >= 1");
  }
  if (epochs < 0 || batch_size < 1 || !(learning_rate > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "bad reward model training settings");
  }
}

json RewardModelConfigToJson(const RewardModelConfig& c) {
  return {{"embed_dim", c.embed_dim},         {"word_hidden", c.word_hidden},
          {"session_hidden", c.session_hidden}, {"goal_hidden", c.goal_hidden},
          {"attention_dim", c.attention_dim}, {"output_dim", c.output_dim},
          {"caps", c.caps},                   {"epochs", c.epochs},
          {"batch_size", c.batch_size},       {"learning_rate", c.learning_rate},
          {"grad_clip", c.grad_clip},         {"seed", c.seed}};
}

RewardModelConfig RewardModelConfigFromJson(const json& j) {
  if (!j.is_object()) Fail(ErrorCode::kInvalidArgument, "reward model config must be an object");
  RewardModelConfig c;
  const json defaults = RewardModelConfigToJson(c);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) {
      Fail(ErrorCode::kInvalidArgument, "unknown reward model config key '", key, "'");
    }
  }
  json m = defaults;
  m.update(j);
  try {
    c.embed_dim = m.at("embed_dim").get<int>();
    c.word_hidden = m.at("word_hidden").get<int>();
    c.session_hidden = m.at("session_hidden").get<int>();
    c.goal_hidden = m.at("goal_hidden").get<int>();
    c.attention_dim = m.at("attention_dim").get<int>();
    c.output_dim = m.at("output_dim").get<int>();
    c.caps = m.at("caps").get<ItemCounts>();
    c.epochs = m.at("epochs").get<int>();
    c.batch_size = m.at("batch_size").get<int>();
    c.learning_rate = m.at("learning_rate").get<double>();
    c.grad_clip = m.at("grad_clip").get<double>();
    c.seed = m.at("seed").get<uint64_t>();
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kInvalidArgument, "malformed reward model config: ", ex.what());
  }
  c.Validate();
  return c;
}

// ---------------------------------------------------------------------------

RewardModel::RewardModel(const RewardModelConfig& config, Vocabulary vocab)
    : config_(config), vocab_(std::move(vocab)) {
  config_.Validate();
  const RewardModelConfig& c = config_;
  Rng rng(EpisodeSeed(c.seed, 0x726577617264ULL));
  params_.AddGlorot("rm/embedding", {c.embed_dim, vocab_.size()}, rng);
  word_ = nn::GruCellParams::Create(params_, "rm/word", c.embed_dim, c.word_hidden, rng);
  fwd_ = nn::GruCellParams::Create(params_, "rm/fwd", c.embed_dim + c.word_hidden,
                                   c.session_hidden, rng);
  bwd_ = nn::GruCellParams::Create(params_, "rm/bwd", c.embed_dim + c.word_hidden,
                                   c.session_hidden, rng);
  attention_ =
      nn::AttentionParams::Create(params_, "rm/attention", 2 * c.session_hidden,
                                  c.attention_dim, rng);
  goal_ = nn::GruCellParams::Create(params_, "rm/goal", c.embed_dim, c.goal_hidden, rng);
  ws_ = nn::DenseLayer::Create(params_, "rm/ws", c.goal_hidden + 2 * c.session_hidden,
                               c.output_dim, rng);
  for (int i = 0; i < kNumItemTypes; ++i) {
    issues_[i] = nn::DenseLayer::Create(params_, StrCat("rm/issue", i), c.output_dim,
                                        c.caps[i] + 1, rng);
  }
}

EncodedSession RewardModel::Encode(Tape& tape, ParamStore& store,
                                   const std::vector<int>& tokens,
                                   const std::vector<int>& goal) const {
  if (tokens.empty()) Fail(ErrorCode::kInvalidArgument, "empty session");
  if (goal.empty()) Fail(ErrorCode::kInvalidArgument, "empty goal");
  Var table = tape.Param(store, "rm/embedding");
  std::vector<Var> emb;
  for (int t : tokens) emb.push_back(tape.Column(table, t));
  const std::vector<Var> word = nn::GruForward(tape, store, word_, emb);
  std::vector<Var> inputs;
  for (size_t j = 0; j < emb.size(); ++j) inputs.push_back(tape.Concat({emb[j], word[j]}));
  const std::vector<Var> hidden = nn::BiGruForward(tape, store, inputs, fwd_, bwd_);
  const nn::AttentionOutput att = nn::Attend(tape, store, attention_, hidden);
  std::vector<Var> goal_emb;
  for (int t : goal) goal_emb.push_back(tape.Column(table, t));
  Var h_g = nn::GruForward(tape, store, goal_, goal_emb).back();
  EncodedSession out;
  out.h_s = ws_.Forward(tape, store, tape.Concat({h_g, att.context}), Activation::kTanh);
  out.attention = att.weights;
  return out;
}

std::vector<Var> RewardModel::PredictIssues(Tape& tape, ParamStore& store, Var h_s,
                                            const ItemCounts& counts) const {
  std::vector<Var> out;
  for (int i = 0; i < kNumItemTypes; ++i) {
    if (counts[i] < 0 || counts[i] > config_.caps[i]) {
      Fail(ErrorCode::kInvalidArgument, "issue ", i, " count ", counts[i],
           " outside the classifier range [0, ", config_.caps[i], "]");
    }
    std::vector<bool> mask(config_.caps[i] + 1, false);
    for (int k = 0; k <= counts[i]; ++k) mask[k] = true;
    Var logits = issues_[i].Forward(tape, store, h_s, Activation::kIdentity);
    out.push_back(tape.Softmax(logits, &mask));
  }
  return out;
}

Var RewardModel::Loss(Tape& tape, ParamStore& store, const SessionTokens& session,
                      const ItemCounts& counts, const ItemCounts& outcome) const {
  const EncodedSession enc =
      Encode(tape, store, vocab_.Encode(session.tokens), vocab_.Encode(session.goal_tokens));
  const std::vector<Var> dists = PredictIssues(tape, store, enc.h_s, counts);
  Var loss;
  for (int i = 0; i < kNumItemTypes; ++i) {
    if (outcome[i] < 0 || outcome[i] > counts[i]) {
      Fail(ErrorCode::kInvalidArgument, "outcome ", outcome[i], " infeasible for issue ", i);
    }
    Var term = tape.Scale(tape.Log(tape.Pick(dists[i], outcome[i])), -1.0);
    loss = loss.valid() ? tape.Add(loss, term) : term;
  }
  return loss;
}

std::vector<std::vector<double>> RewardModel::Predict(const SessionTokens& session,
                                                      const ItemCounts& counts) const {
  Tape tape;
  ParamStore& store = const_cast<ParamStore&>(params_);
  const EncodedSession enc =
      Encode(tape, store, vocab_.Encode(session.tokens), vocab_.Encode(session.goal_tokens));
  std::vector<std::vector<double>> out;
  for (Var d : PredictIssues(tape, store, enc.h_s, counts)) out.push_back(tape.Data(d));
  return out;
}

std::vector<double> RewardModel::AttentionWeights(const SessionTokens& session) const {
  Tape tape;
  const EncodedSession enc = Encode(tape, const_cast<ParamStore&>(params_),
                                    vocab_.Encode(session.tokens),
                                    vocab_.Encode(session.goal_tokens));
  return tape.Data(enc.attention);
}

void RewardModel::Save(const std::string& dir) const {
  nlohmann::ordered_json meta;
  meta["role"] = "reward-model";
  meta["config"] = RewardModelConfigToJson(config_);
  meta["vocabulary"] = vocab_.ToJson();
  nn::SaveCheckpoint(params_, dir, meta);
}

RewardModel RewardModel::Load(const std::string& dir) {
  nlohmann::ordered_json meta;
  ParamStore loaded = nn::LoadCheckpoint(dir, &meta);
  if (!meta.contains("role") || meta["role"] != "reward-model") {
    Fail(ErrorCode::kCorruptManifest, dir, " is not a reward model checkpoint");
  }
  try {
    RewardModel model(RewardModelConfigFromJson(json::parse(meta.at("config").dump())),
                      Vocabulary::FromJson(json::parse(meta.at("vocabulary").dump())));
    nn::LoadCheckpointInto(model.params_, dir);
    return model;
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kCorruptManifest, "malformed reward model meta: ", ex.what());
  }
}

// ---------------------------------------------------------------------------

ItemCounts DecodeOutput(const std::vector<std::vector<double>>& distributions) {
  if (distributions.size() != kNumItemTypes) {
    Fail(ErrorCode::kInvalidArgument, "expected ", kNumItemTypes, " issue distributions, got ",
         distributions.size());
  }
  ItemCounts out{};
  for (int i = 0; i < kNumItemTypes; ++i) out[i] = ArgMax(distributions[i]);
  return out;
}

int TaskReward(const ItemCounts& outcome, const ItemCounts& values, const ItemCounts& counts) {
  int total = 0;
  for (int i = 0; i < kNumItemTypes; ++i) {
    if (outcome[i] < 0 || outcome[i] > counts[i]) {
      Fail(ErrorCode::kInvalidArgument, "outcome ", outcome[i], " for ",
           dialogue::kItemNames[i], " is infeasible with ", counts[i], " items");
    }
    total += outcome[i] * values[i];
  }
  return total;
}

RewardExample ExampleFromRecord(const envs::SessionRecord& record) {
  RewardExample ex;
  ex.session = TokenizeSession(record);
  ex.counts = record.scenario.counts;
  ex.values = record.scenario.values(record.target_agent);
  ex.outcome = record.allocation_target;
  return ex;
}

std::vector<RewardExample> GenerateSyntheticCorpus(int sessions, uint64_t seed,
                                                   const ItemCounts& caps) {
  static const char* kAgents[] = {"conceding", "agreeable", "random"};
  auto catalog = std::make_shared<const dialogue::ActionCatalog>(
      dialogue::EnumerateNegotiationActions(caps));
  std::vector<RewardExample> out;
  for (int k = 0; k < sessions; ++k) {
    const uint64_t s = EpisodeSeed(seed, static_cast<uint64_t>(k));
    Rng rng(s);
    const dialogue::Scenario scenario = envs::SampleScenario(rng, caps);
    auto a0 = envs::MakeScriptedAgent(kAgents[UniformInt(rng, 3)]);
    auto a1 = envs::MakeScriptedAgent(kAgents[UniformInt(rng, 3)]);
    const int first = UniformInt(rng, 2);
    a0->BeginEpisode(EpisodeSeed(s, 1));
    a1->BeginEpisode(EpisodeSeed(s, 2));
    envs::NegotiationGame game(scenario, catalog, 20, first);
    out.push_back(ExampleFromRecord(envs::PlayNegotiation(game, *a0, *a1)));
  }
  return out;
}

namespace {

json ExampleToJson(const RewardExample& ex) {
  return {{"tokens", ex.session.tokens},
          {"goal_tokens", ex.session.goal_tokens},
          {"counts", ex.counts},
          {"values", ex.values},
          {"outcome", ex.outcome}};
}

RewardExample ExampleFromJson(const json& j) {
  RewardExample ex;
  ex.session.tokens = j.at("tokens").get<std::vector<std::string>>();
  ex.session.goal_tokens = j.at("goal_tokens").get<std::vector<std::string>>();
  ex.counts = j.at("counts").get<ItemCounts>();
  ex.values = j.at("values").get<ItemCounts>();
  ex.outcome = j.at("outcome").get<ItemCounts>();
  return ex;
}

}  // namespace

void WriteCorpusJsonl(const std::vector<RewardExample>& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write ", path);
  for (const auto& ex : corpus) out << ExampleToJson(ex).dump() << "\n";
}

std::vector<RewardExample> ReadCorpusJsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot read ", path);
  std::vector<RewardExample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(ExampleFromJson(json::parse(line)));
    } catch (const json::exception& ex) {
      Fail(ErrorCode::kInvalidArgument, path, ":", lineno, ": ", ex.what());
    }
  }
  return out;
}

nlohmann::ordered_json RewardReport::ToJson() const {
  nlohmann::ordered_json j;
  j["examples"] = examples;
  j["issue_accuracy"] = issue_accuracy;
  j["exact_match"] = exact_match;
  j["mean_loss"] = mean_loss;
  return j;
}

RewardReport TrainRewardModel(RewardModel& model, const std::vector<RewardExample>& train,
                              const std::vector<RewardExample>& validation) {
  if (train.empty()) Fail(ErrorCode::kInvalidArgument, "reward model corpus is empty");
  const RewardModelConfig& c = model.config();
  Rng rng(c.seed);
  std::vector<int> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  nn::AdamOptions opts;
  opts.learning_rate = c.learning_rate;
  ParamStore best;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch < c.epochs; ++epoch) {
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
      std::swap(order[i], order[UniformInt(rng, i + 1)]);
    }
    for (size_t start = 0; start < order.size(); start += c.batch_size) {
      const size_t end = std::min(order.size(), start + c.batch_size);
      Tape tape;
      model.params().ZeroGrad();
      Var loss;
      for (size_t k = start; k < end; ++k) {
        const RewardExample& ex = train[order[k]];
        Var term = model.Loss(tape, model.params(), ex.session, ex.counts, ex.outcome);
        loss = loss.valid() ? tape.Add(loss, term) : term;
      }
      loss = tape.Scale(loss, 1.0 / static_cast<double>(end - start));
      tape.Backward(loss);
      if (c.grad_clip > 0.0) nn::ClipGradNorm(model.params(), c.grad_clip);
      nn::AdamStep(model.params(), opts);
    }
    if (!validation.empty()) {
      const double loss = EvaluateRewardModel(model, validation).mean_loss;
      if (loss < best_loss) {
        best_loss = loss;
        best = model.params();
      }
    }
  }
  if (best.size() > 0) model.params().CopyValuesFrom(best);
  return EvaluateRewardModel(model, train);
}

RewardReport EvaluateRewardModel(const RewardModel& model,
                                 const std::vector<RewardExample>& examples) {
  RewardReport r;
  r.examples = static_cast<int>(examples.size());
  if (examples.empty()) return r;
  std::array<int, kNumItemTypes> hits{};
  int exact = 0;
  double loss = 0.0;
  for (const auto& ex : examples) {
    const auto dists = model.Predict(ex.session, ex.counts);
    const ItemCounts pred = DecodeOutput(dists);
    bool all = true;
    for (int i = 0; i < kNumItemTypes; ++i) {
      hits[i] += pred[i] == ex.outcome[i];
      all = all && pred[i] == ex.outcome[i];
      loss -= std::log(std::max(dists[i][ex.outcome[i]], 1e-12));
    }
    exact += all;
  }
  for (int i = 0; i < kNumItemTypes; ++i) r.issue_accuracy[i] = double(hits[i]) / r.examples;
  r.exact_match = static_cast<double>(exact) / r.examples;
  r.mean_loss = loss / r.examples;
  return r;
}

}  // namespace oppa::reward
