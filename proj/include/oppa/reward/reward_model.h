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


#ifndef OPPA_REWARD_REWARD_MODEL_H_
#define OPPA_REWARD_REWARD_MODEL_H_

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "oppa/envs/session.h"
#include "oppa/nn/layers.h"
#include "oppa/nn/param_store.h"
#include "oppa/nn/tape.h"

namespace oppa::reward {

using dialogue::ItemCounts;
using dialogue::kNumItemTypes;
using nn::ParamStore;
using nn::Tape;
using nn::Var;

// Session text as canonical act tokens plus the target's own goal tokens.
struct SessionTokens {
  std::vector<std::string> tokens;
  std::vector<std::string> goal_tokens;
  bool operator==(const SessionTokens&) const = default;
};

// "<you>"/"<them>" before each rendered act, split on spaces. Goal tokens are
// "book n=3 v=0 hat n=1 v=6 ..." from the target's side. Negotiation only.
SessionTokens TokenizeSession(const envs::SessionRecord& record);

class Vocabulary {
 public:
  static constexpr const char* kUnknown = "<unk>";

  Vocabulary();
  static Vocabulary Build(const std::vector<SessionTokens>& sessions);

  int size() const { return static_cast<int>(words_.size()); }
  // Unknown words map to 0.
  int Lookup(const std::string& word) const;
  std::vector<int> Encode(const std::vector<std::string>& words) const;
  const std::vector<std::string>& words() const { return words_; }

  nlohmann::json ToJson() const;
  static Vocabulary FromJson(const nlohmann::json& j);

 private:
  void Add(const std::string& word);

  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

struct RewardModelConfig {
  int embed_dim = 64;
  int word_hidden = 128;     // GRU_w
  int session_hidden = 256;  // GRU_o, per direction
  int goal_hidden = 64;      // GRU_g
  int attention_dim = 128;
  int output_dim = 256;      // h^s
  ItemCounts caps{4, 4, 4};  // classes per issue are cap + 1

  int epochs = 10;
  int batch_size = 16;
  double learning_rate = 1e-3;
  double grad_clip = 5.0;
  uint64_t seed = 0;

  void Validate() const;
};

nlohmann::json RewardModelConfigToJson(const RewardModelConfig& c);
RewardModelConfig RewardModelConfigFromJson(const nlohmann::json& j);

struct EncodedSession {
  Var h_s;
  Var attention;  // weights over positions
};

class RewardModel {
 public:
  RewardModel(const RewardModelConfig& config, Vocabulary vocab);

  // kInvalidArgument for an empty session or empty goal.
  EncodedSession Encode(Tape& tape, ParamStore& store, const std::vector<int>& tokens,
                        const std::vector<int>& goal) const;
  // One distribution per issue; classes above counts[i] are masked out.
  // kInvalidArgument when a count exceeds its cap.
  std::vector<Var> PredictIssues(Tape& tape, ParamStore& store, Var h_s,
                                 const ItemCounts& counts) const;
  // Sum of per-issue cross-entropies against `outcome`.
  Var Loss(Tape& tape, ParamStore& store, const SessionTokens& session,
           const ItemCounts& counts, const ItemCounts& outcome) const;

  std::vector<std::vector<double>> Predict(const SessionTokens& session,
                                           const ItemCounts& counts) const;
  std::vector<double> AttentionWeights(const SessionTokens& session) const;

  const RewardModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  void Save(const std::string& dir) const;
  static RewardModel Load(const std::string& dir);

 private:
  RewardModelConfig config_;
  Vocabulary vocab_;
  ParamStore params_;
  nn::GruCellParams word_;
  nn::GruCellParams fwd_;
  nn::GruCellParams bwd_;
  nn::GruCellParams goal_;
  nn::AttentionParams attention_;
  nn::DenseLayer ws_;
  std::array<nn::DenseLayer, kNumItemTypes> issues_;
};

// Per-issue argmax, ties to the lowest class.
ItemCounts DecodeOutput(const std::vector<std::vector<double>>& distributions);

// sum_i outcome_i * values_i. kInvalidArgument when an outcome entry is
// negative or exceeds counts.
int TaskReward(const ItemCounts& outcome, const ItemCounts& values, const ItemCounts& counts);

struct RewardExample {
  SessionTokens session;
  ItemCounts counts{};
  ItemCounts values{};   // target's values
  ItemCounts outcome{};  // items the target ends up with; zeros without a deal
  bool operator==(const RewardExample&) const = default;
};

RewardExample ExampleFromRecord(const envs::SessionRecord& record);

// Negotiation self-play between scripted agents. The outcome is a
// deterministic function of the final agreed proposal in the transcript.
std::vector<RewardExample> GenerateSyntheticCorpus(int sessions, uint64_t seed,
                                                   const ItemCounts& caps);

void WriteCorpusJsonl(const std::vector<RewardExample>& corpus, const std::string& path);
std::vector<RewardExample> ReadCorpusJsonl(const std::string& path);

struct RewardReport {
  int examples = 0;
  std::array<double, kNumItemTypes> issue_accuracy{};
  double exact_match = 0.0;
  double mean_loss = 0.0;
  nlohmann::ordered_json ToJson() const;
};

// Adam on the summed cross-entropies; returns the training-set report. With a
// validation set the parameters of the epoch with the lowest validation loss
// are kept.
RewardReport TrainRewardModel(RewardModel& model, const std::vector<RewardExample>& train,
                              const std::vector<RewardExample>& validation = {});
RewardReport EvaluateRewardModel(const RewardModel& model,
                                 const std::vector<RewardExample>& examples);

}  // namespace oppa::reward

#endif  // OPPA_REWARD_REWARD_MODEL_H_
