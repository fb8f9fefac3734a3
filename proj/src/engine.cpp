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

#include "deepbo/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "deepbo/common.hpp"

namespace deepbo {

std::string Arm::name() const {
  return std::string(surrogate == SurrogateKind::kGP ? "GP" : "RF") + "-" + to_string(acq.tag);
}

Arm Arm::parse(const std::string& name, double kappa) {
  const auto dash = name.find('-');
  if (dash == std::string::npos) throw DomainError("arm '" + name + "' must look like GP-EI");
  const std::string model = name.substr(0, dash);
  const std::string acq = name.substr(dash + 1);
  Arm arm;
  if (model == "GP") {
    arm.surrogate = SurrogateKind::kGP;
  } else if (model == "RF") {
    arm.surrogate = SurrogateKind::kRF;
  } else {
    throw DomainError("arm '" + name + "': unknown surrogate '" + model + "'");
  }
  if (acq == "EI") {
    arm.acq = AcqKind::ei();
  } else if (acq == "PI") {
    arm.acq = AcqKind::pi();
  } else if (acq == "UCB") {
    arm.acq = AcqKind::ucb(kappa);
  } else {
    throw DomainError("arm '" + name + "': unknown acquisition '" + acq + "'");
  }
  return arm;
}

Portfolio default_portfolio(double kappa) {
  return {
      {SurrogateKind::kGP, AcqKind::ei()},       {SurrogateKind::kGP, AcqKind::pi()},
      {SurrogateKind::kGP, AcqKind::ucb(kappa)}, {SurrogateKind::kRF, AcqKind::ei()},
      {SurrogateKind::kRF, AcqKind::pi()},       {SurrogateKind::kRF, AcqKind::ucb(kappa)},
  };
}

std::string to_string(DuplicateStrategy s) {
  switch (s) {
    case DuplicateStrategy::kNaive: return "naive";
    case DuplicateStrategy::kRandom: return "random";
    case DuplicateStrategy::kNextCandidate: return "next_candidate";
    case DuplicateStrategy::kInProgress: return "in_progress";
  }
  return "?";
}

DuplicateStrategy parse_duplicate_strategy(const std::string& name) {
  for (auto s : {DuplicateStrategy::kNaive, DuplicateStrategy::kRandom, DuplicateStrategy::kNextCandidate,
                 DuplicateStrategy::kInProgress}) {
    if (to_string(s) == name) return s;
  }
  throw DomainError("unknown duplicate strategy '" + name + "'");
}

std::size_t History::append(HistoryEntry entry) {
  entries_.push_back(std::move(entry));
  return entries_.size() - 1;
}

void History::record_epoch(std::size_t index, double accuracy, double alpha) {
  HistoryEntry& e = entries_.at(index);
  if (e.finished()) throw DomainError("history entry already finished");
  e.curve.push_back(accuracy);
  e.best_raw = std::max(e.best_raw, accuracy);
  e.transformed_best = hybrid_transform(e.best_raw, alpha);
}

void History::finish(std::size_t index, EntryStatus status, double alpha) {
  HistoryEntry& e = entries_.at(index);
  if (e.finished() || status == EntryStatus::kInProgress) throw DomainError("invalid history status transition");
  // Replace whatever premature value was visible with the full-curve best.
  e.best_raw = e.curve.empty() ? 0.0 : *std::max_element(e.curve.begin(), e.curve.end());
  e.transformed_best = hybrid_transform(e.best_raw, alpha);
  e.status = status;
}

HistorySnapshot history_snapshot(const History& history) { return HistorySnapshot(history.entries()); }

void VirtualClock::schedule(double time, int worker) {
  if (time < now_) throw DomainError("cannot schedule an event in the past");
  queue_.push_back({time, worker});
  std::push_heap(queue_.begin(), queue_.end(), [](const Event& a, const Event& b) {
    return a.time > b.time || (a.time == b.time && a.worker > b.worker);
  });
}

VirtualClock::Event VirtualClock::pop() {
  if (queue_.empty()) throw DomainError("no pending events");
  std::pop_heap(queue_.begin(), queue_.end(), [](const Event& a, const Event& b) {
    return a.time > b.time || (a.time == b.time && a.worker > b.worker);
  });
  const Event e = queue_.back();
  queue_.pop_back();
  now_ = e.time;
  return e;
}

Eigen::MatrixXd encode_table(const SurrogateTable& table) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(table.size()),
                    static_cast<Eigen::Index>(table.space().feature_dimension()));
  for (const TableEntry& e : table.entries()) f.row(e.config.id) = encode(table.space(), e.config).transpose();
  return f;
}

ModelData modeling_data(const HistorySnapshot& snapshot, bool use_in_progress) {
  std::vector<const HistoryEntry*> usable;
  for (const HistoryEntry& e : snapshot) {
    if (e.curve.empty()) continue;
    if (!e.finished() && !use_in_progress) continue;
    usable.push_back(&e);
  }
  ModelData d;
  if (usable.empty()) return d;
  const Eigen::Index dims = usable.front()->features.size();
  d.x.resize(static_cast<Eigen::Index>(usable.size()), dims);
  d.y.resize(static_cast<Eigen::Index>(usable.size()));
  double best_finished = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < usable.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    d.x.row(r) = usable[i]->features.transpose();
    d.y[r] = usable[i]->transformed_best;
    if (usable[i]->finished()) best_finished = std::max(best_finished, usable[i]->transformed_best);
  }
  d.incumbent = std::isfinite(best_finished) ? best_finished : d.y.maxCoeff();
  return d;
}

namespace {

Eigen::MatrixXd pool_features(std::span<const int> pool, const Eigen::MatrixXd& features) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(pool.size()), features.cols());
  for (std::size_t i = 0; i < pool.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = features.row(pool[i]);
  return out;
}

Selection rank_pool(std::span<const int> pool, const std::vector<double>& scores) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  // Pool is ascending, so a stable sort breaks score ties toward lower ids.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  Selection s;
  s.model_based = true;
  for (std::size_t i : order) {
    s.ranked.push_back(pool[i]);
    s.scores.push_back(scores[i]);
  }
  s.config_id = s.ranked.front();
  return s;
}

}  // namespace

Selection cold_start(std::span<const int> pool, const HistorySnapshot& snapshot) {
  std::set<int> seen;
  for (const HistoryEntry& e : snapshot) seen.insert(e.config_id);
  Selection s;
  s.config_id = pool.front();
  for (int id : pool) {
    if (!seen.contains(id)) {
      s.config_id = id;
      break;
    }
  }
  s.ranked.assign(pool.begin(), pool.end());
  s.scores.assign(pool.size(), 0.0);
  return s;
}

std::optional<Selection> select_candidate(const Arm& arm, const HistorySnapshot& snapshot, std::span<const int> pool,
                                          const Eigen::MatrixXd& features, const ModelOptions& options,
                                          std::uint64_t seed) {
  if (pool.empty()) return std::nullopt;
  const ModelData data = modeling_data(snapshot, options.use_in_progress);
  if (data.y.size() < 2 || pool.size() == 1) return cold_start(pool, snapshot);

  const Eigen::MatrixXd candidates = pool_features(pool, features);
  std::vector<double> scores(pool.size());
  if (arm.surrogate == SurrogateKind::kGP) {
    const GpModel gp = fit_gp(data.x, data.y, options.gp_samples, seed, options.gp_prior);
    const auto predictions = gp.predict_batch(candidates);
    for (std::size_t i = 0; i < pool.size(); ++i) scores[i] = integrated_acq(arm.acq, predictions[i], data.incumbent);
  } else {
    const RfModel rf = fit_rf(data.x, data.y, seed, options.forest);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const Prediction p = rf.predict(candidates.row(static_cast<Eigen::Index>(i)).transpose());
      scores[i] = acquisition(arm.acq, p, data.incumbent);
    }
  }
  return rank_pool(pool, scores);
}

std::optional<HedgeSelection> select_hedge(const HedgeState& state, const HistorySnapshot& snapshot,
                                           std::span<const int> pool, const Eigen::MatrixXd& features,
                                           const ModelOptions& options, double kappa, std::uint64_t seed, Rng& rng) {
  if (pool.empty()) return std::nullopt;
  HedgeSelection out;
  out.state = state;
  out.arm = hedge_select(state, rng);
  const ModelData data = modeling_data(snapshot, options.use_in_progress);
  if (data.y.size() < 2 || pool.size() == 1) {
    out.selection = cold_start(pool, snapshot);
    return out;
  }
  const GpModel gp = fit_gp(data.x, data.y, options.gp_samples, seed, options.gp_prior);
  const auto predictions = gp.predict_batch(pool_features(pool, features));
  std::array<double, 3> rewards{};
  for (std::size_t a = 0; a < kHedgeArms.size(); ++a) {
    const AcqKind kind{kHedgeArms[a], kappa};
    std::vector<double> scores(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) scores[i] = integrated_acq(kind, predictions[i], data.incumbent);
    Selection s = rank_pool(pool, scores);
    const auto nominee = static_cast<std::size_t>(std::find(pool.begin(), pool.end(), s.config_id) - pool.begin());
    double mean = 0.0;
    for (const Prediction& p : predictions[nominee]) mean += p.mean;
    rewards[a] = mean / static_cast<double>(predictions[nominee].size());
    if (a == out.arm) out.selection = std::move(s);
  }
  out.state = hedge_update(state, rewards);
  return out;
}

std::optional<int> resolve_duplicate(int candidate, std::span<const int> in_flight, DuplicateStrategy strategy,
                                     std::span<const int> ranked, std::span<const int> pool, Rng& rng) {
  auto busy = [&](int id) { return std::find(in_flight.begin(), in_flight.end(), id) != in_flight.end(); };
  if (!busy(candidate)) return candidate;
  switch (strategy) {
    case DuplicateStrategy::kNaive:
    case DuplicateStrategy::kInProgress:
      return candidate;
    case DuplicateStrategy::kRandom: {
      std::vector<int> free;
      for (int id : pool) {
        if (!busy(id)) free.push_back(id);
      }
      if (free.empty()) return std::nullopt;
      return free[rng.below(free.size())];
    }
    case DuplicateStrategy::kNextCandidate:
      for (int id : ranked) {
        if (!busy(id)) return id;
      }
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

class TrialSimulator {
 public:
  TrialSimulator(const SurrogateTable& table, const TrialOptions& options)
      : table_(table), opt_(options), features_(encode_table(table)), rng_(mix_seed(options.seed, 0x5eed)),
        workers_(static_cast<std::size_t>(options.workers)), finished_(table.size(), false) {
    hedge_.eta = options.hedge_eta;
    result_.seed = options.seed;
  }

  TrialResult run() {
    if (opt_.dispatch == Dispatch::kRoundRobin) {
      pump_round_robin();
    } else {
      for (int m = 0; m < opt_.workers; ++m) dispatch(m);
    }
    while (!clock_.empty() && !result_.tau) {
      if (clock_.peek().time > opt_.time_budget) break;
      const VirtualClock::Event ev = clock_.pop();
      on_epoch(ev.worker);
    }
    for (const Worker& w : workers_) result_.in_flight_at_end += w.busy ? 1 : 0;
    result_.history = history_.entries();
    return std::move(result_);
  }

 private:
  struct Worker {
    bool busy = false;
    std::size_t entry = 0;
    int config = -1;
  };

  bool in_flight(int id) const {
    return std::any_of(workers_.begin(), workers_.end(), [id](const Worker& w) { return w.busy && w.config == id; });
  }

  std::vector<int> in_flight_ids() const {
    std::vector<int> ids;
    for (const Worker& w : workers_) {
      if (w.busy) ids.push_back(w.config);
    }
    return ids;
  }

  // Candidates the selector may score. Strategies that keep in-flight
  // entries out of the model also keep them in the pool, so collisions can
  // happen and are resolved afterwards.
  std::vector<int> pool(bool include_in_flight) const {
    std::vector<int> ids;
    for (std::size_t id = 0; id < finished_.size(); ++id) {
      if (finished_[id]) continue;
      if (!include_in_flight && in_flight(static_cast<int>(id))) continue;
      ids.push_back(static_cast<int>(id));
    }
    return ids;
  }

  std::optional<int> choose() {
    const std::size_t index = selections_++;
    const std::uint64_t model_seed = mix_seed(opt_.seed, index + 1);
    switch (opt_.algorithm) {
      case Algorithm::kRandom: {
        const std::vector<int> candidates = pool(false);
        result_.arm_sequence.push_back(-1);
        if (candidates.empty()) return std::nullopt;
        return candidates[rng_.below(candidates.size())];
      }
      case Algorithm::kGpHedge: {
        const bool in_progress = opt_.duplicates == DuplicateStrategy::kInProgress;
        const std::vector<int> candidates = pool(!in_progress);
        ModelOptions mo = opt_.model;
        mo.use_in_progress = in_progress;
        const bool cold = index < static_cast<std::size_t>(std::max(2, opt_.workers));
        std::optional<HedgeSelection> hs;
        if (cold) {
          if (candidates.empty()) return std::nullopt;
          result_.arm_sequence.push_back(-1);
          return finish_choice(cold_start(candidates, history_snapshot(history_)), candidates);
        }
        hs = select_hedge(hedge_, history_snapshot(history_), candidates, features_, mo, opt_.ucb_kappa, model_seed,
                          rng_);
        if (!hs) return std::nullopt;
        hedge_ = hs->state;
        result_.arm_sequence.push_back(static_cast<int>(hs->arm));
        return finish_choice(hs->selection, candidates);
      }
      case Algorithm::kPortfolio: {
        const std::size_t arm_index = index % opt_.portfolio.size();
        result_.arm_sequence.push_back(static_cast<int>(arm_index));
        const bool in_progress = opt_.duplicates == DuplicateStrategy::kInProgress;
        const std::vector<int> candidates = pool(!in_progress);
        if (candidates.empty()) return std::nullopt;
        if (index < static_cast<std::size_t>(std::max(2, opt_.workers))) {
          return finish_choice(cold_start(candidates, history_snapshot(history_)), candidates);
        }
        ModelOptions mo = opt_.model;
        mo.use_in_progress = in_progress;
        const auto sel = select_candidate(opt_.portfolio[arm_index], history_snapshot(history_), candidates,
                                          features_, mo, model_seed);
        if (!sel) return std::nullopt;
        return finish_choice(*sel, candidates);
      }
    }
    return std::nullopt;
  }

  std::optional<int> finish_choice(const Selection& sel, const std::vector<int>& candidates) {
    const std::vector<int> busy = in_flight_ids();
    if (std::find(busy.begin(), busy.end(), sel.config_id) != busy.end()) ++result_.duplicates_resolved;
    return resolve_duplicate(sel.config_id, busy, opt_.duplicates, sel.ranked, candidates, rng_);
  }

  bool dispatch(int m) {
    const std::optional<int> id = choose();
    if (!id) return false;
    HistoryEntry entry;
    entry.config_id = *id;
    entry.features = features_.row(*id).transpose();
    entry.transformed_best = hybrid_transform(0.0, opt_.alpha);
    Worker& w = workers_[static_cast<std::size_t>(m)];
    w.busy = true;
    w.config = *id;
    w.entry = history_.append(std::move(entry));
    ++result_.evals_started;
    schedule_epoch(m, opt_.fit_seconds);
    return true;
  }

  void schedule_epoch(int m, double extra) {
    const Worker& w = workers_[static_cast<std::size_t>(m)];
    const std::size_t done = history_[w.entry].curve.size();
    const double seconds = table_.at(w.config).curve.epoch_seconds[done];
    clock_.schedule(clock_.now() + extra + seconds, m);
  }

  void on_epoch(int m) {
    Worker& w = workers_[static_cast<std::size_t>(m)];
    const TableEntry& te = table_.at(w.config);
    const std::size_t epoch = history_[w.entry].curve.size() + 1;
    history_.record_epoch(w.entry, te.curve.accuracy[epoch - 1], opt_.alpha);
    ++result_.total_epochs;
    const double best = history_[w.entry].best_raw;

    if (best > best_seen_) {
      best_seen_ = best;
      if (!result_.best_trace.empty() && result_.best_trace.back().time == clock_.now()) {
        result_.best_trace.back().accuracy = best;
      } else {
        result_.best_trace.push_back({clock_.now(), best});
      }
    }
    if (best > opt_.target) {
      result_.tau = clock_.now();
      return;
    }

    const int E = table_.max_epoch();
    std::optional<EntryStatus> outcome;
    if (opt_.etr.kind != EtrKind::kNone) {
      std::vector<CurveSoFar> reference;
      reference.reserve(history_.size());
      for (std::size_t i = 0; i < history_.size(); ++i) {
        if (i != w.entry && !history_[i].curve.empty()) reference.push_back(history_[i].curve);
      }
      if (opt_.etr.decide(best, static_cast<int>(epoch), reference, E) == Decision::kTerminate) {
        outcome = EntryStatus::kTerminated;
      }
    }
    if (!outcome && epoch == static_cast<std::size_t>(E)) outcome = EntryStatus::kComplete;
    if (!outcome) {
      schedule_epoch(m, 0.0);
      return;
    }

    history_.finish(w.entry, *outcome, opt_.alpha);
    ++(*outcome == EntryStatus::kComplete ? result_.evals_completed : result_.evals_terminated);
    w.busy = false;
    w.config = -1;
    // A configuration is retired once any evaluation of it finishes.
    finished_[static_cast<std::size_t>(te.config.id)] = true;
    if (opt_.dispatch == Dispatch::kRoundRobin) {
      pump_round_robin();
    } else {
      dispatch(m);
    }
  }

  // Selection i goes to worker i mod M, waiting for that worker if needed.
  void pump_round_robin() {
    while (!workers_[static_cast<std::size_t>(next_worker_)].busy) {
      if (!dispatch(next_worker_)) return;
      next_worker_ = (next_worker_ + 1) % opt_.workers;
    }
  }

  const SurrogateTable& table_;
  const TrialOptions& opt_;
  Eigen::MatrixXd features_;
  Rng rng_;
  VirtualClock clock_;
  History history_;
  std::vector<Worker> workers_;
  std::vector<bool> finished_;
  HedgeState hedge_;
  TrialResult result_;
  std::size_t selections_ = 0;
  int next_worker_ = 0;
  double best_seen_ = -1.0;
};

void validate(const SurrogateTable& table, const TrialOptions& o) {
  if (o.workers < 1) throw DomainError("run_trial: need at least one worker");
  if (!(o.alpha > 0.0 && o.alpha <= 1.0)) throw DomainError("run_trial: alpha must lie in (0, 1]");
  if (!std::isfinite(o.target)) throw DomainError("run_trial: target accuracy must be set");
  if (o.algorithm == Algorithm::kPortfolio && o.portfolio.empty()) throw DomainError("run_trial: empty portfolio");
  for (std::size_t i = 0; i < o.portfolio.size(); ++i) {
    for (std::size_t j = i + 1; j < o.portfolio.size(); ++j) {
      if (o.portfolio[i] == o.portfolio[j]) throw DomainError("run_trial: portfolio arms must be distinct");
    }
  }
  if (!(o.fit_seconds >= 0.0)) throw DomainError("run_trial: fit_seconds must be >= 0");
  if (!(o.time_budget > 0.0)) throw DomainError("run_trial: time budget must be > 0");
  if (o.model.gp_samples < 1) throw DomainError("run_trial: need at least one GP hyper-sample");
  o.etr.validate(table.max_epoch());
}

}  // namespace

TrialResult run_trial(const SurrogateTable& table, const TrialOptions& options) {
  validate(table, options);
  TrialSimulator sim(table, options);
  TrialResult result = sim.run();
  if (options.target >= table.at(table.ids_by_rank().front()).terminal_best) {
    result.warnings.push_back("target accuracy is not exceeded by any table entry; the trial cannot succeed");
  }
  return result;
}

}  // namespace deepbo
