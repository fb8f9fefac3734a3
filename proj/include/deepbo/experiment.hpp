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

#ifndef DEEPBO_EXPERIMENT_HPP_
#define DEEPBO_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "deepbo/engine.hpp"
#include "deepbo/metrics.hpp"
#include "deepbo/tabular.hpp"

namespace deepbo {

struct SyntheticSpec {
  HyperparameterSpace space = convnet_space();
  std::size_t n = 500;
  std::uint64_t seed = 0;
  CurveModel curve;
};

// Everything a gen-benchmark / run invocation needs. Field names match the
// keys of the JSON config file.
struct ExperimentConfig {
  std::optional<std::string> table;
  std::optional<SyntheticSpec> synthetic;
  std::string algorithm = "deepbo";  // deepbo | random | gp-hedge | single arm such as GP-EI
  std::vector<std::string> arms;     // deepbo portfolio; empty = all six arms
  int workers = 1;
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;
  std::string etr = "cr";  // none | cr | msr | custom
  std::vector<EtrCheckpoint> checkpoints;
  std::string running_average = "mean";  // mean | literal
  int msr_warmup = 0;
  std::string duplicates = "in_progress";
  std::optional<std::size_t> target_top_k = 10;
  std::optional<double> target_accuracy;
  std::size_t n_trials = 1;
  std::uint64_t seed = 0;
  double time_budget = std::numeric_limits<double>::infinity();
  std::size_t gp_samples = 10;
  double ucb_kappa = 2.0;
  double hedge_eta = 1.0;
  double fit_seconds = 0.0;
  std::string dispatch = "idle_any";  // idle_any | round_robin
  int threads = 1;
};

// Throws ConfigError listing every offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// Problems with the config, one message per offending field.
std::vector<std::string> validate_config(const ExperimentConfig& config);

// Parses "top10" / "top:10" or a plain accuracy such as "0.93" into the config.
void set_target(ExperimentConfig& config, const std::string& spec);
std::vector<EtrCheckpoint> parse_checkpoints(const std::string& spec);  // "s:e:j:h,s:e:j:h"

SurrogateTable resolve_table(const ExperimentConfig& config);
double resolve_target(const ExperimentConfig& config, const SurrogateTable& table);
TrialOptions trial_options(const ExperimentConfig& config, const SurrogateTable& table);

// Hash of every setting except seed, trial count and thread count.
std::string fingerprint(const ExperimentConfig& config);

void cmd_gen_benchmark(const ExperimentConfig& config, const std::filesystem::path& out);

// Runs trials base_seed + 0 .. n_trials - 1, using up to `threads` threads.
std::vector<TrialResult> run_trials(const ExperimentConfig& config, const SurrogateTable& table);
void write_results_csv(const ExperimentConfig& config, double target, const std::vector<TrialResult>& results,
                       std::ostream& out);
void cmd_run(const ExperimentConfig& config, std::ostream& out);

struct ResultsFile {
  std::string source;
  std::string fingerprint;
  double target = 0.0;
  TrialEnsemble ensemble;
};
ResultsFile read_results(const std::filesystem::path& path);

struct ReportOptions {
  std::vector<double> t_grid;  // seconds; +inf allowed
  std::optional<int> diversity_workers;
  bool combine = false;
};
// Long-format CSV: source,fingerprint,metric,t_seconds,value.
void cmd_report(const std::vector<ResultsFile>& inputs, const ReportOptions& options, std::ostream& out);
std::vector<double> parse_t_grid(const std::string& spec);

}  // namespace deepbo

#endif  // DEEPBO_EXPERIMENT_HPP_
