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


// Command-line front end: pretrain, train, eval, crossplay, ablate,
// play-serve and config-reference.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "oppa/harness/config.h"
#include "oppa/harness/runs.h"
#include "oppa/service/play_service.h"

namespace {

namespace fs = std::filesystem;
using oppa::harness::ExperimentConfig;

int ReportError(const std::string& code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["message"] = message;
  std::cerr << j.dump() << std::endl;
  return code == "usage" ? 64 : 1;
}

std::string SeedDir(const std::string& out, uint64_t seed) {
  return (fs::path(out) / ("seed_" + std::to_string(seed))).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OPPA dialogue policy learning"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--seed", seed, "run this seed only");
  app.add_option("--out", out, "output directory (default: config out)");

  auto* pretrain = app.add_subcommand("pretrain", "supervised warm start from the scripted expert");
  auto* train = app.add_subcommand("train", "train every seed, then evaluate");
  std::string init;
  train->add_option("--init", init, "checkpoint to start from instead of the warm start");
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string checkpoint;
  eval->add_option("--checkpoint", checkpoint, "checkpoint directory")->required();
  auto* crossplay = app.add_subcommand("crossplay", "play two checkpoints against each other");
  std::string checkpoint_a, checkpoint_b;
  crossplay->add_option("--a", checkpoint_a, "first checkpoint")->required();
  crossplay->add_option("--b", checkpoint_b, "second checkpoint")->required();
  auto* ablate = app.add_subcommand("ablate", "train and compare all variants");
  auto* serve = app.add_subcommand("play-serve", "serve human-vs-agent negotiation sessions");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string serve_checkpoint;
  std::string cors = "*";
  std::string transcripts;
  serve->add_option("--checkpoint", serve_checkpoint, "negotiation checkpoint")->required();
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port");
  serve->add_option("--cors-origin", cors, "allowed CORS origin");
  serve->add_option("--transcripts", transcripts, "append finished sessions to this JSONL file");
  auto* reference = app.add_subcommand("config-reference", "print the config key reference");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError("usage", e.what());
  }

  try {
    if (reference->parsed()) {
      std::cout << oppa::harness::ConfigReference();
      return 0;
    }
    ExperimentConfig config;
    if (!config_path.empty()) config = oppa::harness::LoadExperimentConfig(config_path);
    if (seed) config.seeds = {*seed};
    if (out.empty()) out = config.out;
    config.out = out;
    config.Validate();

    if (pretrain->parsed()) {
      for (uint64_t s : config.seeds) {
        const auto r = oppa::harness::RunPretrain(config, s, SeedDir(out, s));
        std::cout << "seed " << s << ": " << r.ToJson().dump() << "\n";
      }
    } else if (train->parsed()) {
      std::vector<std::shared_ptr<oppa::harness::Policy>> policies;
      for (uint64_t s : config.seeds) {
        auto r = oppa::harness::RunTrain(config, s, SeedDir(out, s), init);
        std::cout << "seed " << s << ": final snapshot " << r.curve.back().value << "\n";
        policies.push_back(r.policy);
      }
      const auto report = oppa::harness::RunEval(policies, config, config.seeds, config.algorithm);
      oppa::harness::WriteTextFile((fs::path(out) / "eval_report.json").string(),
                                   report.ToJson().dump(2) + "\n");
      oppa::harness::WriteTextFile((fs::path(out) / "eval_report.csv").string(), report.ToCsv());
      std::cout << report.ToCsv();
    } else if (eval->parsed()) {
      std::cout << oppa::harness::RunEvalCheckpoint(checkpoint, config, out).ToCsv();
    } else if (crossplay->parsed()) {
      const auto rep = oppa::harness::RunCrossplayCheckpoints(checkpoint_a, checkpoint_b, config, out);
      std::cout << "All: " << rep.AllText() << "\nAgreed: " << rep.AgreedText() << "\n";
    } else if (ablate->parsed()) {
      std::cout << oppa::harness::RunAblate(config, out).ToCsv();
    } else if (serve->parsed()) {
      oppa::service::ServiceOptions options;
      options.cors_origin = cors;
      options.transcript_path = transcripts;
      oppa::service::PlayService service(options);
      service.AddCheckpoint("default", serve_checkpoint);
      httplib::Server server;
      service.Mount(server);
      std::cerr << "listening on " << host << ":" << port << std::endl;
      if (!server.listen(host, port)) {
        return ReportError("io", "cannot listen on " + host + ":" + std::to_string(port));
      }
    }
  } catch (const oppa::OppaError& e) {
    return ReportError(oppa::ErrorCodeName(e.code()), e.what());
  } catch (const std::exception& e) {
    return ReportError("internal", e.what());
  }
  return 0;
}
