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

#include "deepbo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "deepbo/common.hpp"
#include "deepbo/io.hpp"

namespace deepbo {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

const std::set<std::string> kConfigKeys = {
    "table",     "synthetic",  "algorithm",    "arms",      "workers",     "alpha",       "beta",
    "etr",       "checkpoints", "running_average", "msr_warmup", "duplicates", "target",   "n_trials",
    "seed",      "time_budget", "gp_samples",  "ucb_kappa", "hedge_eta",   "fit_seconds", "dispatch",
    "threads"};

// Runs `fn`, turning any failure into a message about `field`.
template <typename Fn>
void field(std::vector<std::string>& errors, const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& ex) {
    errors.push_back("field '" + name + "': " + ex.what());
  }
}

CurveModel parse_curve(const json& j) {
  CurveModel m;
  for (const auto& [key, value] : j.items()) {
    if (key == "max_epoch") m.max_epoch = value.get<int>();
    else if (key == "accuracy_lo") m.accuracy_lo = value.get<double>();
    else if (key == "accuracy_hi") m.accuracy_hi = value.get<double>();
    else if (key == "lambda_min") m.lambda_min = value.get<double>();
    else if (key == "lambda_max") m.lambda_max = value.get<double>();
    else if (key == "noise_sd") m.noise_sd = value.get<double>();
    else if (key == "late_bloomer_fraction") m.late_bloomer_fraction = value.get<double>();
    else if (key == "floor") m.floor = value.get<double>();
    else if (key == "epoch_seconds_min") m.epoch_seconds_min = value.get<double>();
    else if (key == "epoch_seconds_max") m.epoch_seconds_max = value.get<double>();
    else if (key == "modes") m.modes = value.get<int>();
    else throw DomainError("unknown curve key '" + key + "'");
  }
  return m;
}

ordered_json curve_to_json(const CurveModel& m) {
  ordered_json j;
  j["max_epoch"] = m.max_epoch;
  j["accuracy_lo"] = m.accuracy_lo;
  j["accuracy_hi"] = m.accuracy_hi;
  j["lambda_min"] = m.lambda_min;
  j["lambda_max"] = m.lambda_max;
  j["noise_sd"] = m.noise_sd;
  j["late_bloomer_fraction"] = m.late_bloomer_fraction;
  j["floor"] = m.floor;
  j["epoch_seconds_min"] = m.epoch_seconds_min;
  j["epoch_seconds_max"] = m.epoch_seconds_max;
  j["modes"] = m.modes;
  return j;
}

SyntheticSpec parse_synthetic(const json& j) {
  SyntheticSpec s;
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") {
      if (value.get<std::string>() != "convnet") throw DomainError("unknown preset '" + value.get<std::string>() + "'");
      s.space = convnet_space();
    } else if (key == "space") {
      s.space = space_from_json(value);
    } else if (key == "n") {
      s.n = value.get<std::size_t>();
    } else if (key == "seed") {
      s.seed = value.get<std::uint64_t>();
    } else if (key == "curve") {
      s.curve = parse_curve(value);
    } else {
      throw DomainError("unknown synthetic key '" + key + "'");
    }
  }
  return s;
}

EtrCheckpoint parse_checkpoint(const json& j) {
  EtrCheckpoint cp;
  cp.start = j.at("s").get<int>();
  cp.end = j.at("e").get<int>();
  cp.at = j.at("j").get<int>();
  cp.aggressiveness = j.at("h").get<double>();
  return cp;
}

std::string format_seconds(double t) {
  if (std::isinf(t)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  std::vector<std::string> errors;
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.contains(key)) errors.push_back("field '" + key + "': unknown key");
  }
  auto get = [&](const char* key, auto& dest) {
    if (!j.contains(key)) return;
    field(errors, key, [&] { dest = j.at(key).get<std::decay_t<decltype(dest)>>(); });
  };
  if (j.contains("table")) field(errors, "table", [&] { c.table = j.at("table").get<std::string>(); });
  if (j.contains("synthetic")) field(errors, "synthetic", [&] { c.synthetic = parse_synthetic(j.at("synthetic")); });
  get("algorithm", c.algorithm);
  get("arms", c.arms);
  get("workers", c.workers);
  get("alpha", c.alpha);
  get("beta", c.beta);
  get("etr", c.etr);
  if (j.contains("checkpoints")) {
    field(errors, "checkpoints", [&] {
      c.checkpoints.clear();
      for (const json& cp : j.at("checkpoints")) c.checkpoints.push_back(parse_checkpoint(cp));
    });
  }
  get("running_average", c.running_average);
  get("msr_warmup", c.msr_warmup);
  get("duplicates", c.duplicates);
  if (j.contains("target")) {
    field(errors, "target", [&] {
      const json& t = j.at("target");
      if (t.is_string()) {
        set_target(c, t.get<std::string>());
      } else if (t.is_number()) {
        c.target_top_k.reset();
        c.target_accuracy = t.get<double>();
      } else if (t.contains("top_k")) {
        c.target_accuracy.reset();
        c.target_top_k = t.at("top_k").get<std::size_t>();
      } else {
        c.target_top_k.reset();
        c.target_accuracy = t.at("accuracy").get<double>();
      }
    });
  }
  get("n_trials", c.n_trials);
  get("seed", c.seed);
  if (j.contains("time_budget")) {
    field(errors, "time_budget", [&] {
      const json& t = j.at("time_budget");
      c.time_budget = t.is_null() ? std::numeric_limits<double>::infinity() : t.get<double>();
    });
  }
  get("gp_samples", c.gp_samples);
  get("ucb_kappa", c.ucb_kappa);
  get("hedge_eta", c.hedge_eta);
  get("fit_seconds", c.fit_seconds);
  get("dispatch", c.dispatch);
  get("threads", c.threads);
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const std::string& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw ConfigError("config file " + path.string() + ": " + ex.what());
  }
  return parse_config(j);
}

void set_target(ExperimentConfig& config, const std::string& spec) {
  std::string s = spec;
  if (s.rfind("top", 0) == 0) {
    s = s.substr(3);
    if (!s.empty() && s.front() == ':') s = s.substr(1);
    std::size_t used = 0;
    const long k = std::stol(s, &used);
    if (used != s.size() || k < 1) throw ConfigError("target '" + spec + "': top-k needs a positive integer");
    config.target_accuracy.reset();
    config.target_top_k = static_cast<std::size_t>(k);
    return;
  }
  std::size_t used = 0;
  const double c = std::stod(s, &used);
  if (used != s.size()) throw ConfigError("target '" + spec + "' is neither top-k nor an accuracy");
  config.target_top_k.reset();
  config.target_accuracy = c;
}

std::vector<EtrCheckpoint> parse_checkpoints(const std::string& spec) {
  std::vector<EtrCheckpoint> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    EtrCheckpoint cp;
    char c1 = 0, c2 = 0, c3 = 0;
    std::stringstream is(item);
    if (!(is >> cp.start >> c1 >> cp.end >> c2 >> cp.at >> c3 >> cp.aggressiveness) || c1 != ':' || c2 != ':' ||
        c3 != ':') {
      throw ConfigError("checkpoint '" + item + "' must look like s:e:j:h");
    }
    out.push_back(cp);
  }
  return out;
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  auto bad = [&](const std::string& name, const std::string& why) { errors.push_back("field '" + name + "': " + why); };
  if (c.table.has_value() == c.synthetic.has_value()) bad("table", "exactly one of 'table' and 'synthetic' is required");
  if (c.synthetic && c.synthetic->n < SurrogateTable::kMinEntries) bad("synthetic.n", "must be >= 11");
  const std::set<std::string> algorithms = {"deepbo", "random", "gp-hedge"};
  if (!algorithms.contains(c.algorithm)) {
    try {
      (void)Arm::parse(c.algorithm);
    } catch (const std::exception&) {
      bad("algorithm", "expected deepbo, random, gp-hedge or an arm such as GP-EI, got '" + c.algorithm + "'");
    }
  }
  std::set<std::string> seen;
  for (const std::string& a : c.arms) {
    try {
      (void)Arm::parse(a);
    } catch (const std::exception& ex) {
      bad("arms", ex.what());
    }
    if (!seen.insert(a).second) bad("arms", "duplicate arm '" + a + "'");
  }
  if (c.workers < 1) bad("workers", "must be >= 1");
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) bad("alpha", "must lie in (0, 1]");
  if (!(c.beta > 0.0 && c.beta <= 0.5)) bad("beta", "must lie in (0, 0.5]");
  if (c.etr != "none" && c.etr != "cr" && c.etr != "msr" && c.etr != "custom") {
    bad("etr", "expected none, cr, msr or custom");
  }
  if (c.etr == "custom" && c.checkpoints.empty()) bad("checkpoints", "custom ETR needs checkpoints");
  if (c.running_average != "mean" && c.running_average != "literal") bad("running_average", "expected mean or literal");
  if (c.msr_warmup < 0) bad("msr_warmup", "must be >= 0");
  try {
    (void)parse_duplicate_strategy(c.duplicates);
  } catch (const std::exception&) {
    bad("duplicates", "expected naive, random, next_candidate or in_progress");
  }
  if (c.target_top_k.has_value() == c.target_accuracy.has_value()) bad("target", "give exactly one of top_k or accuracy");
  if (c.target_top_k && *c.target_top_k < 1) bad("target", "top_k must be >= 1");
  if (c.target_accuracy && !(*c.target_accuracy >= 0.0 && *c.target_accuracy < 1.0)) {
    bad("target", "accuracy must lie in [0, 1)");
  }
  if (c.n_trials < 1) bad("n_trials", "must be >= 1");
  if (!(c.time_budget > 0.0)) bad("time_budget", "must be > 0");
  if (c.gp_samples < 1) bad("gp_samples", "must be >= 1");
  if (!(c.ucb_kappa > 0.0)) bad("ucb_kappa", "must be > 0");
  if (!(c.hedge_eta > 0.0)) bad("hedge_eta", "must be > 0");
  if (!(c.fit_seconds >= 0.0)) bad("fit_seconds", "must be >= 0");
  if (c.dispatch != "idle_any" && c.dispatch != "round_robin") bad("dispatch", "expected idle_any or round_robin");
  if (c.threads < 1) bad("threads", "must be >= 1");
  return errors;
}

namespace {

void require_valid(const ExperimentConfig& c) {
  const std::vector<std::string> errors = validate_config(c);
  if (errors.empty()) return;
  std::string msg = "invalid config:";
  for (const std::string& e : errors) msg += "\n  " + e;
  throw ConfigError(msg);
}

}  // namespace

SurrogateTable resolve_table(const ExperimentConfig& c) {
  if (c.table) return load_table(*c.table);
  if (!c.synthetic) throw ConfigError("field 'table': exactly one of 'table' and 'synthetic' is required");
  return generate_synthetic(c.synthetic->space, c.synthetic->n, c.synthetic->seed, c.synthetic->curve);
}

double resolve_target(const ExperimentConfig& c, const SurrogateTable& table) {
  if (c.target_accuracy) return *c.target_accuracy;
  if (!c.target_top_k) throw ConfigError("field 'target': missing");
  return target_accuracy(table, *c.target_top_k);
}

TrialOptions trial_options(const ExperimentConfig& c, const SurrogateTable& table) {
  require_valid(c);
  TrialOptions o;
  if (c.algorithm == "random") {
    o.algorithm = Algorithm::kRandom;
  } else if (c.algorithm == "gp-hedge") {
    o.algorithm = Algorithm::kGpHedge;
  } else if (c.algorithm == "deepbo") {
    o.algorithm = Algorithm::kPortfolio;
    if (c.arms.empty()) {
      o.portfolio = default_portfolio(c.ucb_kappa);
    } else {
      o.portfolio.clear();
      for (const std::string& a : c.arms) o.portfolio.push_back(Arm::parse(a, c.ucb_kappa));
    }
  } else {
    o.algorithm = Algorithm::kPortfolio;
    o.portfolio = {Arm::parse(c.algorithm, c.ucb_kappa)};
  }
  o.workers = c.workers;
  o.alpha = c.alpha;
  const AverageMode mode = c.running_average == "literal" ? AverageMode::kLiteral : AverageMode::kMean;
  if (c.etr == "none") {
    o.etr = EtrPolicy::none();
  } else if (c.etr == "cr") {
    o.etr = EtrPolicy::cr(c.beta, mode);
  } else if (c.etr == "msr") {
    o.etr = EtrPolicy::msr(c.msr_warmup);
  } else {
    o.etr = EtrPolicy::custom(c.checkpoints, mode);
  }
  o.etr.validate(table.max_epoch());
  o.duplicates = parse_duplicate_strategy(c.duplicates);
  o.target = resolve_target(c, table);
  o.seed = c.seed;
  o.time_budget = c.time_budget;
  o.fit_seconds = c.fit_seconds;
  o.dispatch = c.dispatch == "round_robin" ? Dispatch::kRoundRobin : Dispatch::kIdleAny;
  o.ucb_kappa = c.ucb_kappa;
  o.hedge_eta = c.hedge_eta;
  o.model.gp_samples = c.gp_samples;
  return o;
}

std::string fingerprint(const ExperimentConfig& c) {
  ordered_json j;
  if (c.table) j["table"] = *c.table;
  if (c.synthetic) {
    j["synthetic"]["space"] = space_to_json(c.synthetic->space);
    j["synthetic"]["n"] = c.synthetic->n;
    j["synthetic"]["seed"] = c.synthetic->seed;
    j["synthetic"]["curve"] = curve_to_json(c.synthetic->curve);
  }
  j["algorithm"] = c.algorithm;
  j["arms"] = c.arms;
  j["workers"] = c.workers;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["etr"] = c.etr;
  j["checkpoints"] = ordered_json::array();
  for (const EtrCheckpoint& cp : c.checkpoints) {
    j["checkpoints"].push_back({cp.start, cp.end, cp.at, cp.aggressiveness});
  }
  j["running_average"] = c.running_average;
  j["msr_warmup"] = c.msr_warmup;
  j["duplicates"] = c.duplicates;
  if (c.target_top_k) j["target_top_k"] = *c.target_top_k;
  if (c.target_accuracy) j["target_accuracy"] = *c.target_accuracy;
  j["time_budget"] = std::isinf(c.time_budget) ? ordered_json() : ordered_json(c.time_budget);
  j["gp_samples"] = c.gp_samples;
  j["ucb_kappa"] = c.ucb_kappa;
  j["hedge_eta"] = c.hedge_eta;
  j["fit_seconds"] = c.fit_seconds;
  j["dispatch"] = c.dispatch;
  // FNV-1a over the canonical serialization.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return hex64(h);
}

void cmd_gen_benchmark(const ExperimentConfig& c, const std::filesystem::path& out) {
  const SyntheticSpec spec = c.synthetic.value_or(SyntheticSpec{});
  const SurrogateTable table = generate_synthetic(spec.space, spec.n, spec.seed, spec.curve);
  write_table(table, out);
}

std::vector<TrialResult> run_trials(const ExperimentConfig& c, const SurrogateTable& table) {
  const TrialOptions base = trial_options(c, table);
  std::vector<TrialResult> results(c.n_trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < c.n_trials; i = next++) {
      TrialOptions o = base;
      o.seed = c.seed + i;
      results[i] = run_trial(table, o);
      results[i].history.clear();
      results[i].history.shrink_to_fit();
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(c.threads), c.n_trials);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return results;
}

void write_results_csv(const ExperimentConfig& c, double target, const std::vector<TrialResult>& results,
                       std::ostream& out) {
  out << "# deepbo-run fingerprint=" << fingerprint(c) << " target=" << format_value(target)
      << " algorithm=" << c.algorithm << " workers=" << c.workers << " etr=" << c.etr
      << " duplicates=" << c.duplicates << " base_seed=" << c.seed << " n_trials=" << c.n_trials << '\n';
  out << "trial_index,seed,tau_seconds,evals_started,evals_terminated,evals_completed,duplicates_resolved\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const TrialResult& r = results[i];
    out << i << ',' << r.seed << ',' << (r.tau ? format_seconds(*r.tau) : "") << ',' << r.evals_started << ','
        << r.evals_terminated << ',' << r.evals_completed << ',' << r.duplicates_resolved << '\n';
  }
}

void cmd_run(const ExperimentConfig& c, std::ostream& out) {
  require_valid(c);
  const SurrogateTable table = resolve_table(c);
  const double target = resolve_target(c, table);
  const std::vector<TrialResult> results = run_trials(c, table);
  write_results_csv(c, target, results, out);
}

ResultsFile read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open results file " + path.string());
  ResultsFile f;
  f.source = path.filename().string();
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::stringstream ss(line.substr(1));
      std::string token;
      while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "fingerprint") f.fingerprint = value;
        if (key == "target") f.target = std::stod(value);
      }
      continue;
    }
    if (!header_seen) {
      if (line.rfind("trial_index,", 0) != 0) throw ParseError(line_no, "missing CSV header row");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 7) throw ParseError(line_no, "expected 7 columns");
    try {
      f.ensemble.taus.push_back(cells[2].empty() ? std::nullopt : std::optional<double>(std::stod(cells[2])));
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad tau_seconds '" + cells[2] + "'");
    }
  }
  if (f.fingerprint.empty()) throw ParseError(0, path.string() + ": missing run-metadata comment");
  if (f.ensemble.taus.empty()) throw ParseError(0, path.string() + ": no trial rows");
  f.ensemble.fingerprint = f.fingerprint;
  f.ensemble.target = f.target;
  return f;
}

std::vector<double> parse_t_grid(const std::string& spec) {
  std::vector<double> grid;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "inf") {
      grid.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    std::size_t used = 0;
    const double t = std::stod(item, &used);
    if (used != item.size() || !(t >= 0.0)) throw ConfigError("t-grid entry '" + item + "' must be >= 0 or inf");
    grid.push_back(t);
  }
  if (grid.empty()) throw ConfigError("t-grid must not be empty");
  return grid;
}

void cmd_report(const std::vector<ResultsFile>& inputs, const ReportOptions& options, std::ostream& out) {
  if (inputs.empty()) throw ConfigError("report needs at least one results file");
  std::vector<ResultsFile> sections;
  if (options.combine) {
    ResultsFile merged = inputs.front();
    merged.source = "combined";
    for (std::size_t i = 1; i < inputs.size(); ++i) {
      if (inputs[i].fingerprint != merged.fingerprint) {
        throw ConfigError("cannot combine " + inputs[i].source + ": fingerprint " + inputs[i].fingerprint +
                          " differs from " + merged.fingerprint);
      }
      merged.ensemble.taus.insert(merged.ensemble.taus.end(), inputs[i].ensemble.taus.begin(),
                                  inputs[i].ensemble.taus.end());
    }
    sections.push_back(std::move(merged));
  } else {
    sections = inputs;
  }

  out << "source,fingerprint,metric,t_seconds,value\n";
  for (const ResultsFile& f : sections) {
    const std::string prefix = f.source + ',' + f.fingerprint + ',';
    std::vector<double> success;
    for (double t : options.t_grid) {
      success.push_back(success_rate(f.ensemble, t));
      out << prefix << "success_rate," << format_seconds(t) << ',' << format_value(success.back()) << '\n';
    }
    if (options.diversity_workers) {
      const std::vector<double> theory = theoretical_diversity(success, *options.diversity_workers);
      for (std::size_t i = 0; i < theory.size(); ++i) {
        out << prefix << "theoretical_diversity_m" << *options.diversity_workers << ','
            << format_seconds(options.t_grid[i]) << ',' << format_value(theory[i]) << '\n';
      }
    }
    std::size_t censored = 0;
    for (const auto& tau : f.ensemble.taus) censored += tau ? 0 : 1;
    if (censored < f.ensemble.taus.size()) {
      const ExpectedTime et = expected_time(f.ensemble);
      out << prefix << "expected_time_hours_mean,," << format_value(et.mean_hours) << '\n';
      out << prefix << "expected_time_hours_std,," << format_value(et.stddev_hours) << '\n';
    }
    out << prefix << "censored,," << censored << '\n';
    out << prefix << "trials,," << f.ensemble.taus.size() << '\n';
    out << prefix << "target,," << format_value(f.target) << '\n';
  }
}

}  // namespace deepbo
