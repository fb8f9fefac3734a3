/*
 * Copyright 2026 The deepbo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "deepbo/common.hpp"
#include "deepbo/experiment.hpp"

using namespace deepbo;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  SyntheticSpec s;
  s.n = 60;
  s.seed = 4;
  c.synthetic = s;
  c.workers = 2;
  c.n_trials = 3;
  c.gp_samples = 2;
  c.target_top_k = 5;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "deepbo_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("parse_config: every key is representable") {
  const auto j = nlohmann::json::parse(R"({
    "synthetic": {"preset": "convnet", "n": 50, "seed": 2,
                  "curve": {"max_epoch": 12, "late_bloomer_fraction": 0.25}},
    "algorithm": "deepbo", "arms": ["GP-EI", "RF-UCB"], "workers": 3,
    "alpha": 0.2, "beta": 0.25, "etr": "custom",
    "checkpoints": [{"s": 1, "e": 4, "j": 4, "h": 0.2}],
    "running_average": "literal", "msr_warmup": 2, "duplicates": "next_candidate",
    "target": {"accuracy": 0.8}, "n_trials": 7, "seed": 9, "time_budget": 3600,
    "gp_samples": 4, "ucb_kappa": 1.5, "hedge_eta": 0.5, "fit_seconds": 2,
    "dispatch": "round_robin", "threads": 2})");
  const ExperimentConfig c = parse_config(j);
  REQUIRE(c.synthetic.has_value());
  CHECK(c.synthetic->n == 50);
  CHECK(c.synthetic->curve.max_epoch == 12);
  CHECK(c.synthetic->curve.late_bloomer_fraction == 0.25);
  CHECK(c.arms == std::vector<std::string>{"GP-EI", "RF-UCB"});
  CHECK(c.checkpoints.size() == 1);
  CHECK(c.checkpoints[0] == EtrCheckpoint{1, 4, 4, 0.2});
  CHECK(c.target_accuracy == 0.8);
  CHECK_FALSE(c.target_top_k.has_value());
  CHECK(c.time_budget == 3600.0);
  CHECK(c.dispatch == "round_robin");
  CHECK(validate_config(c).empty());
  const TrialOptions o = trial_options(c, resolve_table(c));
  CHECK(o.portfolio.size() == 2);
  CHECK(o.etr.kind == EtrKind::kCustom);
  CHECK(o.duplicates == DuplicateStrategy::kNextCandidate);
  CHECK(o.dispatch == Dispatch::kRoundRobin);
  CHECK(o.target == 0.8);
}

TEST_CASE("parse_config: reports every offending field") {
  const auto j = nlohmann::json::parse(R"({"workers": "four", "bogus": 1, "alpha": [1]})");
  try {
    parse_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("'workers'") != std::string::npos);
    CHECK(msg.find("'bogus'") != std::string::npos);
    CHECK(msg.find("'alpha'") != std::string::npos);
  }
}

TEST_CASE("validate_config: lists problems per field") {
  ExperimentConfig c = small_config();
  c.workers = 0;
  c.beta = 0.7;
  c.duplicates = "sometimes";
  c.table = "x.jsonl";  // both table and synthetic
  const auto errors = validate_config(c);
  CHECK(errors.size() == 4);
  std::ostringstream out;
  CHECK_THROWS_AS(cmd_run(c, out), ConfigError);
  CHECK(out.str().empty());  // nothing written before validation
}

TEST_CASE("targets and checkpoints from strings") {
  ExperimentConfig c;
  set_target(c, "top:3");
  CHECK(c.target_top_k == 3u);
  set_target(c, "top10");
  CHECK(c.target_top_k == 10u);
  set_target(c, "0.93");
  CHECK(c.target_accuracy == 0.93);
  CHECK_FALSE(c.target_top_k.has_value());
  CHECK_THROWS(set_target(c, "best"));
  CHECK_THROWS(set_target(c, "top0"));
  const auto cps = parse_checkpoints("1:7:7:0.1,7:13:13:0.9");
  REQUIRE(cps.size() == 2);
  CHECK(cps[1] == EtrCheckpoint{7, 13, 13, 0.9});
  CHECK_THROWS_AS(parse_checkpoints("1-7-7-0.1"), ConfigError);
  CHECK(parse_t_grid("0,3600,inf").back() == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(parse_t_grid("-1"), ConfigError);
}

TEST_CASE("fingerprint ignores seed, trial count and threads") {
  ExperimentConfig a = small_config(), b = small_config();
  b.seed = 99;
  b.n_trials = 17;
  b.threads = 4;
  CHECK(fingerprint(a) == fingerprint(b));
  b.workers = 3;
  CHECK(fingerprint(a) != fingerprint(b));
  CHECK(fingerprint(a).size() == 16);
}

TEST_CASE("cmd_gen_benchmark: header plus one line per configuration") {
  ExperimentConfig c = small_config();
  c.synthetic->n = 100;
  const fs::path p1 = scratch("gen1.jsonl"), p2 = scratch("gen2.jsonl");
  cmd_gen_benchmark(c, p1);
  cmd_gen_benchmark(c, p2);
  std::ifstream f1(p1), f2(p2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  CHECK(lines(s1.str()).size() == 101);
  c.synthetic->n = 10;
  CHECK_THROWS_AS(cmd_gen_benchmark(c, p1), DomainError);
}

TEST_CASE("cmd_run: rows, determinism, thread independence") {
  ExperimentConfig c = small_config();
  std::ostringstream a, b, threaded;
  cmd_run(c, a);
  cmd_run(c, b);
  CHECK(a.str() == b.str());
  c.threads = 3;
  cmd_run(c, threaded);
  CHECK(threaded.str() == a.str());
  const auto rows = lines(a.str());
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].rfind("# deepbo-run fingerprint=", 0) == 0);
  CHECK(rows[1] == "trial_index,seed,tau_seconds,evals_started,evals_terminated,evals_completed,duplicates_resolved");
  CHECK(rows[2].rfind("0,0,", 0) == 0);
  CHECK(rows[4].rfind("2,2,", 0) == 0);

  c.n_trials = 1;
  c.time_budget = 1.0;  // nothing finishes an epoch: censored
  std::ostringstream censored;
  cmd_run(c, censored);
  const auto crow = lines(censored.str());
  REQUIRE(crow.size() == 3);
  CHECK(crow[2].rfind("0,0,,", 0) == 0);
}

TEST_CASE("cmd_report: sections, t grid, combine") {
  ExperimentConfig c = small_config();
  const fs::path r1 = scratch("r1.csv"), r2 = scratch("r2.csv"), r3 = scratch("r3.csv");
  {
    std::ofstream o(r1);
    cmd_run(c, o);
  }
  c.seed = 100;
  {
    std::ofstream o(r2);
    cmd_run(c, o);
  }
  c.workers = 1;
  {
    std::ofstream o(r3);
    cmd_run(c, o);
  }
  ReportOptions ro;
  ro.t_grid = parse_t_grid("600,3600,inf");
  std::ostringstream one;
  cmd_report({read_results(r1)}, ro, one);
  const auto rows = lines(one.str());
  CHECK(rows[0] == "source,fingerprint,metric,t_seconds,value");
  int success = 0;
  for (const auto& r : rows) success += r.find(",success_rate,") != std::string::npos;
  CHECK(success == 3);
  CHECK(one.str().find("success_rate,inf,1.000000") != std::string::npos);

  ro.diversity_workers = 4;
  std::ostringstream two;
  cmd_report({read_results(r1), read_results(r3)}, ro, two);
  CHECK(two.str().find("r1.csv,") != std::string::npos);
  CHECK(two.str().find("r3.csv,") != std::string::npos);
  CHECK(two.str().find("theoretical_diversity_m4") != std::string::npos);

  ro.combine = true;
  std::ostringstream pooled;
  cmd_report({read_results(r1), read_results(r2)}, ro, pooled);
  CHECK(pooled.str().find("combined,") != std::string::npos);
  CHECK(pooled.str().find("trials,,6") != std::string::npos);
  std::ostringstream bad;
  CHECK_THROWS_AS(cmd_report({read_results(r1), read_results(r3)}, ro, bad), ConfigError);
  CHECK_THROWS_AS(cmd_report({}, ro, bad), ConfigError);
}

TEST_CASE("read_results: malformed files") {
  const fs::path p = scratch("bad.csv");
  {
    std::ofstream o(p);
    o << "# deepbo-run fingerprint=abc target=0.5\ntrial_index,seed,tau_seconds,evals_started,evals_terminated,"
         "evals_completed,duplicates_resolved\n0,0,12.5,1,0\n";
  }
  try {
    read_results(p);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(read_results(scratch("missing.csv")), ParseError);
}
