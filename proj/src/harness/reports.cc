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


#include "oppa/harness/reports.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "oppa/envs/negotiation.h"

namespace oppa::harness {

using ordered_json = nlohmann::ordered_json;

std::string FormatNumber(double v) {
  if (!std::isfinite(v)) Fail(ErrorCode::kNonFinite, "cannot format non-finite value");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseNumber(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    Fail(ErrorCode::kInvalidArgument, "not a number: '", s, "'");
  }
  return v;
}

namespace {

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double SampleStd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, double>> SessionMetrics(
    dialogue::EnvKind env, const std::vector<envs::SessionRecord>& records) {
  if (records.empty()) Fail(ErrorCode::kInvalidArgument, "no sessions to summarize");
  const double n = static_cast<double>(records.size());
  if (env == dialogue::EnvKind::kCooperative) {
    double turns = 0, f1 = 0, match = 0, success = 0;
    for (const auto& r : records) {
      turns += r.turns;
      f1 += envs::InformF1(r);
      match += envs::MatchRate(r);
      success += envs::TaskSuccess(r) ? 1.0 : 0.0;
    }
    return {{"turns", turns / n},
            {"inform_f1", 100.0 * f1 / n},
            {"match", 100.0 * match / n},
            {"success", 100.0 * success / n}};
  }
  double all = 0, agreed_sum = 0;
  int agreed = 0, pareto = 0;
  for (const auto& r : records) {
    all += r.score_target;
    if (r.outcome != "agreed") continue;
    ++agreed;
    agreed_sum += r.score_target;
    const int s0 = r.target_agent == 0 ? r.score_target : r.score_opposite;
    const int s1 = r.target_agent == 0 ? r.score_opposite : r.score_target;
    if (envs::ParetoOptimal(r.scenario, s0, s1)) ++pareto;
  }
  return {{"score_all", all / n},
          {"score_agreed", agreed ? agreed_sum / agreed : 0.0},
          {"agreed_pct", 100.0 * agreed / n},
          {"pareto_pct", agreed ? 100.0 * pareto / agreed : 0.0}};
}

EvalReport EvalReport::Aggregate(
    std::string env, std::string label, int episodes, std::vector<uint64_t> seeds,
    const std::vector<std::vector<std::pair<std::string, double>>>& per_seed) {
  if (per_seed.empty() || per_seed.size() != seeds.size()) {
    Fail(ErrorCode::kInvalidArgument, "need one metric set per seed");
  }
  EvalReport r;
  r.env = std::move(env);
  r.label = std::move(label);
  r.episodes = episodes;
  r.seeds = std::move(seeds);
  for (size_t m = 0; m < per_seed[0].size(); ++m) {
    MetricSummary s;
    s.name = per_seed[0][m].first;
    for (const auto& row : per_seed) {
      if (row.size() != per_seed[0].size() || row[m].first != s.name) {
        Fail(ErrorCode::kInvalidArgument, "metric sets differ between seeds");
      }
      s.per_seed.push_back(row[m].second);
    }
    s.mean = Mean(s.per_seed);
    s.std = SampleStd(s.per_seed);
    r.metrics.push_back(std::move(s));
  }
  return r;
}

const MetricSummary& EvalReport::metric(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return m;
  }
  Fail(ErrorCode::kNotFound, "report has no metric '", name, "'");
}

ordered_json EvalReport::ToJson() const {
  ordered_json j;
  j["env"] = env;
  j["label"] = label;
  j["episodes"] = episodes;
  j["seeds"] = seeds;
  ordered_json ms = ordered_json::object();
  for (const auto& m : metrics) {
    ms[m.name] = {{"mean", m.mean}, {"std", m.std}, {"per_seed", m.per_seed}};
  }
  j["metrics"] = ms;
  return j;
}

std::string EvalReport::ToCsv() const {
  std::ostringstream out;
  out << "metric,mean,std\n";
  for (const auto& m : metrics) {
    out << m.name << "," << FormatNumber(m.mean) << "," << FormatNumber(m.std) << "\n";
  }
  return out.str();
}

std::string CurveToCsv(const std::string& value_name, const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "episode," << value_name << ",reward,epsilon,beta\n";
  for (const auto& p : curve) {
    out << p.episode << "," << FormatNumber(p.value) << "," << FormatNumber(p.reward) << ","
        << FormatNumber(p.epsilon) << "," << FormatNumber(p.beta) << "\n";
  }
  return out.str();
}

double CrossplayReport::MeanAllA() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.all_a);
  return Mean(v);
}
double CrossplayReport::MeanAllB() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.all_b);
  return Mean(v);
}
double CrossplayReport::MeanAgreedA() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.agreed_a);
  return Mean(v);
}
double CrossplayReport::MeanAgreedB() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.agreed_b);
  return Mean(v);
}

namespace {
std::string OneDecimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}
}  // namespace

std::string CrossplayReport::AllText() const {
  return OneDecimal(MeanAllA()) + " vs " + OneDecimal(MeanAllB());
}
std::string CrossplayReport::AgreedText() const {
  return OneDecimal(MeanAgreedA()) + " vs " + OneDecimal(MeanAgreedB());
}

ordered_json CrossplayReport::ToJson() const {
  ordered_json j;
  j["a"] = a;
  j["b"] = b;
  j["all"] = AllText();
  j["agreed"] = AgreedText();
  j["mean"] = {{"all_a", MeanAllA()},
               {"all_b", MeanAllB()},
               {"agreed_a", MeanAgreedA()},
               {"agreed_b", MeanAgreedB()}};
  ordered_json rs = ordered_json::array();
  for (const auto& r : rows) {
    rs.push_back({{"seed", r.seed},
                  {"episodes", r.episodes},
                  {"agreed", r.agreed},
                  {"all_a", r.all_a},
                  {"all_b", r.all_b},
                  {"agreed_a", r.agreed_a},
                  {"agreed_b", r.agreed_b}});
  }
  j["seeds"] = rs;
  return j;
}

std::string CrossplayReport::ToCsv() const {
  std::ostringstream out;
  out << "a,b,seed,episodes,agreed,all_a,all_b,agreed_a,agreed_b\n";
  for (const auto& r : rows) {
    out << a << "," << b << "," << r.seed << "," << r.episodes << "," << r.agreed << ","
        << FormatNumber(r.all_a) << "," << FormatNumber(r.all_b) << ","
        << FormatNumber(r.agreed_a) << "," << FormatNumber(r.agreed_b) << "\n";
  }
  return out.str();
}

CrossplayReport CrossplayReport::FromCsv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "a,b,seed,episodes,agreed,all_a,all_b,agreed_a,agreed_b") {
    Fail(ErrorCode::kInvalidArgument, "unexpected crossplay CSV header");
  }
  CrossplayReport rep;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = SplitCsvLine(line);
    if (f.size() != 9) Fail(ErrorCode::kInvalidArgument, "crossplay CSV row has ", f.size(), " fields");
    if (first) {
      rep.a = f[0];
      rep.b = f[1];
      first = false;
    } else if (f[0] != rep.a || f[1] != rep.b) {
      Fail(ErrorCode::kInvalidArgument, "crossplay CSV mixes pairings");
    }
    CrossplayRow r;
    try {
      r.seed = std::stoull(f[2]);
      r.episodes = std::stoi(f[3]);
      r.agreed = std::stoi(f[4]);
    } catch (const std::exception&) {
      Fail(ErrorCode::kInvalidArgument, "bad integer in crossplay CSV row '", line, "'");
    }
    r.all_a = ParseNumber(f[5]);
    r.all_b = ParseNumber(f[6]);
    r.agreed_a = ParseNumber(f[7]);
    r.agreed_b = ParseNumber(f[8]);
    rep.rows.push_back(r);
  }
  return rep;
}

const EvalReport& AblationReport::variant(const std::string& name) const {
  for (const auto& [n, r] : variants) {
    if (n == name) return r;
  }
  Fail(ErrorCode::kNotFound, "ablation report has no variant '", name, "'");
}

ordered_json AblationReport::ToJson() const {
  ordered_json j = ordered_json::array();
  for (const auto& [n, r] : variants) {
    ordered_json v = r.ToJson();
    v["variant"] = n;
    j.push_back(v);
  }
  return j;
}

std::string AblationReport::ToCsv() const {
  std::ostringstream out;
  out << "variant,metric,mean,std\n";
  for (const auto& [n, r] : variants) {
    for (const auto& m : r.metrics) {
      out << n << "," << m.name << "," << FormatNumber(m.mean) << "," << FormatNumber(m.std)
          << "\n";
    }
  }
  return out.str();
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write ", path);
  out << text;
  if (!out) Fail(ErrorCode::kIo, "write failed for ", path);
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kNotFound, "cannot read ", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace oppa::harness
