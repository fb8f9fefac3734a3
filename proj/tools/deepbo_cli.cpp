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

// deepbo command-line driver: gen-benchmark, run, report.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deepbo/common.hpp"
#include "deepbo/experiment.hpp"

namespace {

using deepbo::ExperimentConfig;

// Flags shared by gen-benchmark and run; each one overrides the config file.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> table;
  std::optional<std::string> preset;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> bench_seed;
  std::optional<double> late_bloomers;
  std::optional<int> max_epoch;
  std::optional<std::string> algorithm;
  std::vector<std::string> arms;
  std::optional<int> workers;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::string> etr;
  std::optional<std::string> checkpoints;
  std::optional<std::string> running_average;
  std::optional<int> msr_warmup;
  std::optional<std::string> duplicates;
  std::optional<std::string> target;
  std::optional<std::size_t> n_trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> time_budget;
  std::optional<std::size_t> gp_samples;
  std::optional<double> ucb_kappa;
  std::optional<double> hedge_eta;
  std::optional<double> fit_seconds;
  std::optional<std::string> dispatch;
  std::optional<int> threads;
};

void add_benchmark_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config file; other flags override it");
  app->add_option("--n", o.n, "number of synthetic configurations");
  app->add_option("--bench-seed", o.bench_seed, "seed of the synthetic table");
  app->add_option("--late-bloomers", o.late_bloomers, "fraction of late-blooming curves");
  app->add_option("--max-epoch", o.max_epoch, "epochs per curve");
  app->add_option("--preset", o.preset, "search space preset (convnet)");
}

void add_run_flags(CLI::App* app, Overrides& o) {
  add_benchmark_flags(app, o);
  app->add_option("--table", o.table, "JSON-lines table file (instead of a synthetic block)");
  app->add_option("--algorithm", o.algorithm, "deepbo | random | gp-hedge | arm name such as RF-EI");
  app->add_option("--arms", o.arms, "portfolio arms for deepbo")->delimiter(',');
  app->add_option("--workers", o.workers, "parallel workers M");
  app->add_option("--alpha", o.alpha, "hybrid transform threshold");
  app->add_option("--beta", o.beta, "compound rule aggressiveness");
  app->add_option("--etr", o.etr, "none | cr | msr | custom");
  app->add_option("--checkpoints", o.checkpoints, "custom checkpoints s:e:j:h,...");
  app->add_option("--running-average", o.running_average, "mean | literal");
  app->add_option("--msr-warmup", o.msr_warmup, "median rule warm-up epochs (0 = ceil(E/3))");
  app->add_option("--duplicates", o.duplicates, "naive | random | next_candidate | in_progress");
  app->add_option("--target", o.target, "top10, top:5 or an accuracy such as 0.93");
  app->add_option("--n-trials", o.n_trials, "number of trials");
  app->add_option("--seed", o.seed, "base seed; trial i uses seed + i");
  app->add_option("--time-budget", o.time_budget, "virtual seconds per trial");
  app->add_option("--gp-samples", o.gp_samples, "GP hyperparameter samples");
  app->add_option("--ucb-kappa", o.ucb_kappa, "UCB exploration weight");
  app->add_option("--hedge-eta", o.hedge_eta, "GP-Hedge learning rate");
  app->add_option("--fit-seconds", o.fit_seconds, "virtual seconds charged per model fit");
  app->add_option("--dispatch", o.dispatch, "idle_any | round_robin");
  app->add_option("--threads", o.threads, "threads used to run trials");
}

template <typename T, typename U>
void apply(const std::optional<T>& from, U& to) {
  if (from) to = *from;
}

ExperimentConfig build_config(const Overrides& o, bool need_synthetic) {
  ExperimentConfig c = o.config ? deepbo::load_config(*o.config) : ExperimentConfig{};
  if (o.table) {
    c.table = *o.table;
    c.synthetic.reset();
  }
  // Without a table, fall back to the default synthetic benchmark.
  if (!c.synthetic && (need_synthetic || !c.table)) c.synthetic = deepbo::SyntheticSpec{};
  if (c.synthetic) {
    if (o.preset && *o.preset != "convnet") throw deepbo::ConfigError("unknown preset '" + *o.preset + "'");
    apply(o.n, c.synthetic->n);
    apply(o.bench_seed, c.synthetic->seed);
    apply(o.late_bloomers, c.synthetic->curve.late_bloomer_fraction);
    apply(o.max_epoch, c.synthetic->curve.max_epoch);
  }
  apply(o.algorithm, c.algorithm);
  if (!o.arms.empty()) c.arms = o.arms;
  apply(o.workers, c.workers);
  apply(o.alpha, c.alpha);
  apply(o.beta, c.beta);
  apply(o.etr, c.etr);
  if (o.checkpoints) c.checkpoints = deepbo::parse_checkpoints(*o.checkpoints);
  apply(o.running_average, c.running_average);
  apply(o.msr_warmup, c.msr_warmup);
  apply(o.duplicates, c.duplicates);
  if (o.target) deepbo::set_target(c, *o.target);
  apply(o.n_trials, c.n_trials);
  apply(o.seed, c.seed);
  apply(o.time_budget, c.time_budget);
  apply(o.gp_samples, c.gp_samples);
  apply(o.ucb_kappa, c.ucb_kappa);
  apply(o.hedge_eta, c.hedge_eta);
  apply(o.fit_seconds, c.fit_seconds);
  apply(o.dispatch, c.dispatch);
  apply(o.threads, c.threads);
  return c;
}

// Writes through a temporary so a failed run never leaves a partial file.
template <typename Fn>
void write_output(const std::optional<std::string>& path, Fn&& fn) {
  if (!path) {
    fn(std::cout);
    return;
  }
  const std::filesystem::path tmp = *path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw deepbo::Error("cannot write " + tmp.string());
    fn(out);
    if (!out) throw deepbo::Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, *path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diversified portfolio Bayesian optimization on tabular benchmarks"};
  app.require_subcommand(1);

  Overrides gen;
  std::string gen_out;
  CLI::App* gen_cmd = app.add_subcommand("gen-benchmark", "generate a synthetic JSON-lines table");
  add_benchmark_flags(gen_cmd, gen);
  gen_cmd->add_option("-o,--out", gen_out, "output table path")->required();

  Overrides run;
  std::optional<std::string> run_out;
  CLI::App* run_cmd = app.add_subcommand("run", "run repeated trials and write a results CSV");
  add_run_flags(run_cmd, run);
  run_cmd->add_option("-o,--out", run_out, "results CSV path (default stdout)");

  std::vector<std::string> report_inputs;
  std::string t_grid = "inf";
  std::optional<int> diversity_workers;
  bool combine = false;
  std::optional<std::string> report_out;
  CLI::App* report_cmd = app.add_subcommand("report", "summarize results files");
  report_cmd->add_option("inputs", report_inputs, "results CSV files")->required();
  report_cmd->add_option("--t-grid", t_grid, "comma-separated budgets in seconds; 'inf' allowed");
  report_cmd->add_option("--diversity-workers", diversity_workers, "also emit 1-(1-s)^M for this M");
  report_cmd->add_flag("--combine", combine, "pool files with equal fingerprints into one section");
  report_cmd->add_option("-o,--out", report_out, "report CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen_cmd) {
      ExperimentConfig c = build_config(gen, true);
      deepbo::cmd_gen_benchmark(c, gen_out);
    } else if (*run_cmd) {
      const ExperimentConfig c = build_config(run, false);
      const std::vector<std::string> errors = deepbo::validate_config(c);
      if (!errors.empty()) {
        std::cerr << "deepbo: invalid config:\n";
        for (const std::string& e : errors) std::cerr << "  " << e << '\n';
        return 2;
      }
      write_output(run_out, [&](std::ostream& out) { deepbo::cmd_run(c, out); });
    } else if (*report_cmd) {
      deepbo::ReportOptions options;
      options.t_grid = deepbo::parse_t_grid(t_grid);
      options.diversity_workers = diversity_workers;
      options.combine = combine;
      std::vector<deepbo::ResultsFile> files;
      for (const std::string& p : report_inputs) files.push_back(deepbo::read_results(p));
      write_output(report_out, [&](std::ostream& out) { deepbo::cmd_report(files, options, out); });
    }
  } catch (const std::exception& e) {
    std::cerr << "deepbo: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
