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


#include "oppa/harness/config.h"

#include <fstream>
#include <sstream>
#include <utility>

namespace oppa::harness {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

void RejectUnknownKeys(const json& j, const json& known, const std::string& where) {
  if (!j.is_object()) Fail(ErrorCode::kInvalidArgument, where, " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      Fail(ErrorCode::kInvalidArgument, "unknown ", where, " key '", key, "'");
    }
  }
}

// Top-level keys in output order, with their reference text.
const std::vector<std::pair<std::string, std::string>>& TopLevelDocs() {
  static const auto* docs = new std::vector<std::pair<std::string, std::string>>{
      {"env", "Environment family: \"cooperative\" or \"negotiation\"."},
      {"state_dim", "Width of the encoded state vector (zero padded)."},
      {"cooperative", "Cooperative task: domains, patience, goal sampling, catalog cap."},
      {"negotiation", "Negotiation game: item caps, turn limit, catalog cap, first mover."},
      {"opponent", "Scripted negotiation opponent: conceding, agreeable or random."},
      {"algorithm", "Learner: \"oppa\" (Q-learning with the ablation flags) or \"reinforce\"."},
      {"training", "Learner settings, see the training table."},
      {"corpus_episodes", "Scripted-expert episodes collected for the warm start."},
      {"corpus_noise", "Probability of replacing an expert action with a random legal one."},
      {"corpus_holdout", "Fraction of corpus episodes held out to score the estimator."},
      {"seeds", "Training seeds; reports aggregate mean and std over them."},
      {"eval_episodes", "Greedy evaluation episodes per seed."},
      {"eval_seed", "Base seed of the evaluation episodes (shared by every variant)."},
      {"snapshot_every", "Learning-curve snapshot period in training episodes."},
      {"snapshot_episodes", "Greedy episodes per learning-curve snapshot."},
      {"log_episodes", "Write one JSON line per training episode."},
      {"out", "Output directory."},
  };
  return *docs;
}

const std::vector<std::pair<std::string, std::string>>& TrainingDocs() {
  static const auto* docs = new std::vector<std::pair<std::string, std::string>>{
      {"epsilon_start", "Exploration rate at episode 0."},
      {"epsilon_end", "Exploration rate after the decay window."},
      {"epsilon_decay_fraction", "Fraction of max_episodes over which epsilon decays linearly."},
      {"gamma_q", "Discount of the Bellman target."},
      {"beta0", "Initial weight of the action regularizer."},
      {"gamma_beta", "Per-epoch decay of beta."},
      {"epoch_episodes", "Episodes per beta epoch."},
      {"w1", "Weight of the TD loss."},
      {"w2", "Weight of the action regularizer."},
      {"tau", "Temperature of the candidate softmax."},
      {"target_sync", "Iterations between target-network copies."},
      {"batch_size", "Replay minibatch size."},
      {"learning_rate", "Adam step size of the Q-network."},
      {"estimator_learning_rate", "Adam step size of the opposite-action estimator."},
      {"grad_clip", "Global gradient-norm clip; <= 0 disables it."},
      {"updates_per_episode", "Q updates after each episode."},
      {"buffer_capacity", "Replay capacity (FIFO)."},
      {"max_episodes", "Training episodes."},
      {"seed", "Learner seed; replaced by each entry of seeds."},
      {"hidden", "Q-network hidden width."},
      {"estimator_hidden", "Estimator hidden width."},
      {"emb_dim", "Width of the opposite-action embedding."},
      {"use_obe", "Condition Q on the estimated opposite action."},
      {"use_action_reg", "Add the cross-entropy action regularizer."},
      {"soft_opposite", "Feed the estimator distribution instead of its argmax."},
      {"reg_stop_gradient", "Keep the regularizer out of the placeholder path gradient."},
      {"train_estimator_online", "Keep fitting the estimator on observed replies."},
      {"pretrain_epochs", "Supervised warm-start epochs."},
      {"pretrain_batch", "Supervised warm-start minibatch."},
      {"reinforce_batch", "Episodes per policy-gradient step (reinforce)."},
      {"reinforce_learning_rate", "SGD step size (reinforce)."},
  };
  return *docs;
}

std::string DefaultText(const json& v) {
  if (v.is_string()) return "`\"" + v.get<std::string>() + "\"`";
  return "`" + v.dump() + "`";
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (env != "cooperative" && env != "negotiation") {
    Fail(ErrorCode::kInvalidArgument, "env must be \"cooperative\" or \"negotiation\", got '",
         env, "'");
  }
  if (algorithm != "oppa" && algorithm != "reinforce") {
    Fail(ErrorCode::kInvalidArgument, "algorithm must be \"oppa\" or \"reinforce\", got '",
         algorithm, "'");
  }
  if (opponent != "conceding" && opponent != "agreeable" && opponent != "random") {
    Fail(ErrorCode::kInvalidArgument, "unknown opponent '", opponent, "'");
  }
  if (state_dim < 1) Fail(ErrorCode::kInvalidArgument, "state_dim must be >= 1");
  if (corpus_episodes < 0) Fail(ErrorCode::kInvalidArgument, "corpus_episodes must be >= 0");
  if (!(corpus_noise >= 0.0 && corpus_noise <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "corpus_noise must lie in [0,1]");
  }
  if (!(corpus_holdout >= 0.0 && corpus_holdout < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "corpus_holdout must lie in [0,1)");
  }
  if (seeds.empty()) Fail(ErrorCode::kInvalidArgument, "seeds must not be empty");
  if (eval_episodes < 1) Fail(ErrorCode::kInvalidArgument, "eval_episodes must be >= 1");
  if (snapshot_every < 1) Fail(ErrorCode::kInvalidArgument, "snapshot_every must be >= 1");
  if (snapshot_episodes < 1) Fail(ErrorCode::kInvalidArgument, "snapshot_episodes must be >= 1");
  cooperative.Validate();
  training.Validate();
}

ordered_json ExperimentConfigToJson(const ExperimentConfig& c) {
  ordered_json j;
  j["env"] = c.env;
  j["state_dim"] = c.state_dim;
  j["cooperative"] = dialogue::CoopConfigToJson(c.cooperative);
  j["negotiation"] = envs::NegotiationConfigToJson(c.negotiation);
  j["opponent"] = c.opponent;
  j["algorithm"] = c.algorithm;
  j["training"] = policy::TrainingConfigToJson(c.training);
  j["corpus_episodes"] = c.corpus_episodes;
  j["corpus_noise"] = c.corpus_noise;
  j["corpus_holdout"] = c.corpus_holdout;
  j["seeds"] = c.seeds;
  j["eval_episodes"] = c.eval_episodes;
  j["eval_seed"] = c.eval_seed;
  j["snapshot_every"] = c.snapshot_every;
  j["snapshot_episodes"] = c.snapshot_episodes;
  j["log_episodes"] = c.log_episodes;
  j["out"] = c.out;
  return j;
}

ExperimentConfig ExperimentConfigFromJson(const json& j) {
  ExperimentConfig c;
  const json known = json::parse(ExperimentConfigToJson(c).dump());
  RejectUnknownKeys(j, known, "experiment config");
  try {
    c.env = j.value("env", c.env);
    c.state_dim = j.value("state_dim", c.state_dim);
    if (j.contains("cooperative")) {
      RejectUnknownKeys(j.at("cooperative"), known.at("cooperative"), "cooperative");
      c.cooperative = dialogue::CoopConfigFromJson(j.at("cooperative"));
    }
    if (j.contains("negotiation")) {
      RejectUnknownKeys(j.at("negotiation"), known.at("negotiation"), "negotiation");
      c.negotiation = envs::NegotiationConfigFromJson(j.at("negotiation"));
    }
    c.opponent = j.value("opponent", c.opponent);
    c.algorithm = j.value("algorithm", c.algorithm);
    if (j.contains("training")) c.training = policy::TrainingConfigFromJson(j.at("training"));
    c.corpus_episodes = j.value("corpus_episodes", c.corpus_episodes);
    c.corpus_noise = j.value("corpus_noise", c.corpus_noise);
    c.corpus_holdout = j.value("corpus_holdout", c.corpus_holdout);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
    c.eval_seed = j.value("eval_seed", c.eval_seed);
    c.snapshot_every = j.value("snapshot_every", c.snapshot_every);
    c.snapshot_episodes = j.value("snapshot_episodes", c.snapshot_episodes);
    c.log_episodes = j.value("log_episodes", c.log_episodes);
    c.out = j.value("out", c.out);
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kInvalidArgument, "malformed experiment config: ", ex.what());
  }
  c.Validate();
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot read config ", path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kInvalidArgument, "config ", path, " is not valid JSON: ", ex.what());
  }
  return ExperimentConfigFromJson(j);
}

std::string ConfigReference() {
  const ExperimentConfig c;
  const ordered_json defaults = ExperimentConfigToJson(c);
  std::ostringstream out;
  out << "# Experiment config reference\n\n"
      << "Generated by `oppa config-reference`. Every key is optional; omitted keys take the\n"
      << "default shown. Unknown keys are rejected.\n\n"
      << "## Top level\n\n| key | default | meaning |\n|---|---|---|\n";
  for (const auto& [key, text] : TopLevelDocs()) {
    const auto& v = defaults.at(key);
    const std::string shown = v.is_object() ? "see below" : DefaultText(json::parse(v.dump()));
    out << "| `" << key << "` | " << shown << " | " << text << " |\n";
  }
  out << "\n## training\n\n| key | default | meaning |\n|---|---|---|\n";
  for (const auto& [key, text] : TrainingDocs()) {
    out << "| `" << key << "` | " << DefaultText(json::parse(defaults.at("training").at(key).dump()))
        << " | " << text << " |\n";
  }
  out << "\n## negotiation\n\n| key | default |\n|---|---|\n";
  for (const auto& [key, v] : defaults.at("negotiation").items()) {
    out << "| `" << key << "` | " << DefaultText(json::parse(v.dump())) << " |\n";
  }
  out << "\n`first_mover` is 0 (learner), 1 (opponent) or -1 (drawn per game).\n";
  out << "\n## cooperative\n\n| key | default |\n|---|---|\n";
  for (const auto& [key, v] : defaults.at("cooperative").items()) {
    if (key == "domains") continue;
    out << "| `" << key << "` | " << DefaultText(json::parse(v.dump())) << " |\n";
  }
  out << "\nDefault `domains`:\n\n";
  for (const auto& d : c.cooperative.domains) {
    out << "- " << d.name << ": constraints";
    for (size_t i = 0; i < d.constraint_slots.size(); ++i) {
      out << (i ? ", " : " ") << d.constraint_slots[i] << " {";
      for (size_t k = 0; k < d.constraint_values[i].size(); ++k) {
        out << (k ? ", " : "") << d.constraint_values[i][k];
      }
      out << "}";
    }
    out << "; requests";
    for (size_t i = 0; i < d.request_slots.size(); ++i) {
      out << (i ? ", " : " ") << d.request_slots[i];
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace oppa::harness
