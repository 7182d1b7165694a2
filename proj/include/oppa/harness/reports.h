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


#ifndef OPPA_HARNESS_REPORTS_H_
#define OPPA_HARNESS_REPORTS_H_

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "oppa/envs/session.h"

namespace oppa::harness {

// Shortest text that parses back to the same double.
std::string FormatNumber(double v);
double ParseNumber(const std::string& s);

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double std = 0.0;  // sample std over seeds, 0 for one seed
  std::vector<double> per_seed;
};

// Cooperative: turns, inform_f1, match, success. Negotiation: score_all,
// score_agreed, agreed_pct, pareto_pct. Rates are percentages.
std::vector<std::pair<std::string, double>> SessionMetrics(
    dialogue::EnvKind env, const std::vector<envs::SessionRecord>& records);

struct EvalReport {
  std::string env;
  std::string label;
  int episodes = 0;  // per seed
  std::vector<uint64_t> seeds;
  std::vector<MetricSummary> metrics;

  // Per-seed SessionMetrics, one entry per seed.
  static EvalReport Aggregate(
      std::string env, std::string label, int episodes, std::vector<uint64_t> seeds,
      const std::vector<std::vector<std::pair<std::string, double>>>& per_seed);

  const MetricSummary& metric(const std::string& name) const;
  nlohmann::ordered_json ToJson() const;
  std::string ToCsv() const;  // metric,mean,std
};

struct CurvePoint {
  int episode = 0;
  double value = 0.0;   // success % or mean score over the snapshot episodes
  double reward = 0.0;  // mean training return since the previous point
  double epsilon = 0.0;
  double beta = 0.0;
};

std::string CurveToCsv(const std::string& value_name, const std::vector<CurvePoint>& curve);

struct CrossplayRow {
  uint64_t seed = 0;
  int episodes = 0;
  int agreed = 0;
  double all_a = 0.0;
  double all_b = 0.0;
  double agreed_a = 0.0;  // 0 when no game was agreed
  double agreed_b = 0.0;
  bool operator==(const CrossplayRow&) const = default;
};

struct CrossplayReport {
  std::string a;
  std::string b;
  std::vector<CrossplayRow> rows;  // one per seed

  double MeanAllA() const;
  double MeanAllB() const;
  double MeanAgreedA() const;
  double MeanAgreedB() const;
  std::string AllText() const;     // "x vs y"
  std::string AgreedText() const;  // "x vs y"
  nlohmann::ordered_json ToJson() const;
  std::string ToCsv() const;
  static CrossplayReport FromCsv(const std::string& csv);
  bool operator==(const CrossplayReport&) const = default;
};

struct AblationReport {
  std::vector<std::pair<std::string, EvalReport>> variants;  // fixed order

  const EvalReport& variant(const std::string& name) const;
  nlohmann::ordered_json ToJson() const;
  std::string ToCsv() const;  // variant,metric,mean,std
};

void WriteTextFile(const std::string& path, const std::string& text);
std::string ReadTextFile(const std::string& path);

}  // namespace oppa::harness

#endif  // OPPA_HARNESS_REPORTS_H_
