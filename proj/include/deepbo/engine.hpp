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

#ifndef DEEPBO_ENGINE_HPP_
#define DEEPBO_ENGINE_HPP_

#include <cstdint>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deepbo/acquisition.hpp"
#include "deepbo/etr.hpp"
#include "deepbo/hpspace.hpp"
#include "deepbo/surrogate.hpp"
#include "deepbo/tabular.hpp"
#include "deepbo/xform.hpp"

namespace deepbo {

enum class SurrogateKind { kGP, kRF };

// One (surrogate, acquisition) pair of the portfolio.
struct Arm {
  SurrogateKind surrogate = SurrogateKind::kGP;
  AcqKind acq;

  bool operator==(const Arm&) const = default;

  std::string name() const;                 // e.g. "GP-EI"
  static Arm parse(const std::string& name, double kappa = 2.0);
};

using Portfolio = std::vector<Arm>;

// GP-EI, GP-PI, GP-UCB, RF-EI, RF-PI, RF-UCB.
Portfolio default_portfolio(double kappa = 2.0);

enum class DuplicateStrategy { kNaive, kRandom, kNextCandidate, kInProgress };
std::string to_string(DuplicateStrategy s);
DuplicateStrategy parse_duplicate_strategy(const std::string& name);

enum class EntryStatus { kInProgress, kTerminated, kComplete };

// One evaluation in the shared history.
struct HistoryEntry {
  int config_id = 0;
  FeatureVector features;
  double best_raw = 0.0;          // running best accuracy y*
  double transformed_best = 0.0;  // hybrid_transform(best_raw, alpha)
  CurveSoFar curve;
  EntryStatus status = EntryStatus::kInProgress;

  bool finished() const { return status != EntryStatus::kInProgress; }
};

// Point-in-time copy of the history; cheap to copy, never changes.
class HistorySnapshot {
 public:
  HistorySnapshot() : entries_(std::make_shared<const std::vector<HistoryEntry>>()) {}
  explicit HistorySnapshot(std::vector<HistoryEntry> entries)
      : entries_(std::make_shared<const std::vector<HistoryEntry>>(std::move(entries))) {}

  std::size_t size() const { return entries_->size(); }
  bool empty() const { return entries_->empty(); }
  const HistoryEntry& operator[](std::size_t i) const { return (*entries_)[i]; }
  auto begin() const { return entries_->begin(); }
  auto end() const { return entries_->end(); }

 private:
  std::shared_ptr<const std::vector<HistoryEntry>> entries_;
};

// Shared history H. Entries are appended on dispatch and updated in place as
// epochs complete.
class History {
 public:
  std::size_t append(HistoryEntry entry);
  // Records one more epoch and refreshes the running and transformed best.
  void record_epoch(std::size_t index, double accuracy, double alpha);
  void finish(std::size_t index, EntryStatus status, double alpha);

  const HistoryEntry& operator[](std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<HistoryEntry>& entries() const { return entries_; }

 private:
  std::vector<HistoryEntry> entries_;
};

HistorySnapshot history_snapshot(const History& history);

// Knobs shared by every model-based selection.
struct ModelOptions {
  std::size_t gp_samples = 10;
  GpPrior gp_prior;
  ForestOptions forest;
  bool use_in_progress = false;  // model premature in-flight entries too
};

struct Selection {
  int config_id = -1;
  std::vector<int> ranked;  // pool ordered by acquisition, best first
  bool model_based = false;
  std::vector<double> scores;  // aligned with `ranked`
};

// Ids of the configurations usable for modeling, plus the value used as the
// incumbent for improvement-based acquisitions.
struct ModelData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  double incumbent = 0.0;
};
ModelData modeling_data(const HistorySnapshot& snapshot, bool use_in_progress);

// Lowest pool id that has no history entry yet (Sobol order for generated
// tables); the lowest pool id if every candidate already appears.
Selection cold_start(std::span<const int> pool, const HistorySnapshot& snapshot);

// Fits the arm's surrogate on the usable history and returns the pool member
// maximizing the integrated acquisition (ties to the lowest id). With fewer
// than two usable entries, falls back to cold_start. Rows of `features`
// are indexed by configuration id; `pool` must be sorted ascending.
std::optional<Selection> select_candidate(const Arm& arm, const HistorySnapshot& snapshot, std::span<const int> pool,
                                          const Eigen::MatrixXd& features, const ModelOptions& options,
                                          std::uint64_t seed);

// GP-Hedge: one GP, three acquisition nominees, one chosen by exponential
// weights; gains grow by the posterior mean at each nominee.
struct HedgeSelection {
  Selection selection;
  std::size_t arm = 0;
  HedgeState state;
};
std::optional<HedgeSelection> select_hedge(const HedgeState& state, const HistorySnapshot& snapshot,
                                           std::span<const int> pool, const Eigen::MatrixXd& features,
                                           const ModelOptions& options, double kappa, std::uint64_t seed, Rng& rng);

// Replaces a candidate that is already being evaluated, per strategy.
// nullopt means no eligible candidate remains.
std::optional<int> resolve_duplicate(int candidate, std::span<const int> in_flight, DuplicateStrategy strategy,
                                     std::span<const int> ranked, std::span<const int> pool, Rng& rng);

// Discrete-event clock: events pop in time order, ties by worker id.
class VirtualClock {
 public:
  struct Event {
    double time = 0.0;
    int worker = 0;
  };

  double now() const { return now_; }
  bool empty() const { return queue_.empty(); }
  std::size_t pending() const { return queue_.size(); }
  const Event& peek() const { return queue_.front(); }

  // Throws DomainError for events scheduled in the past.
  void schedule(double time, int worker);
  Event pop();

 private:
  double now_ = 0.0;
  std::vector<Event> queue_;  // min-heap on (time, worker)
};

enum class Algorithm { kPortfolio, kGpHedge, kRandom };
enum class Dispatch { kIdleAny, kRoundRobin };

struct TrialOptions {
  Algorithm algorithm = Algorithm::kPortfolio;
  Portfolio portfolio = default_portfolio();
  int workers = 1;
  double alpha = kDefaultAlpha;
  EtrPolicy etr = EtrPolicy::cr();
  DuplicateStrategy duplicates = DuplicateStrategy::kInProgress;
  double target = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  double time_budget = std::numeric_limits<double>::infinity();  // virtual seconds
  double fit_seconds = 0.0;  // virtual cost charged per selection
  Dispatch dispatch = Dispatch::kIdleAny;
  double ucb_kappa = 2.0;
  double hedge_eta = 1.0;
  ModelOptions model;
};

struct TracePoint {
  double time = 0.0;
  double accuracy = 0.0;
};

struct TrialResult {
  std::optional<double> tau;  // virtual seconds; empty when censored
  std::vector<TracePoint> best_trace;
  std::size_t evals_started = 0;
  std::size_t evals_terminated = 0;
  std::size_t evals_completed = 0;
  std::size_t in_flight_at_end = 0;
  std::size_t duplicates_resolved = 0;  // selections that collided with an in-flight config
  std::size_t total_epochs = 0;
  std::uint64_t seed = 0;
  std::vector<int> arm_sequence;  // arm index per selection
  std::vector<HistoryEntry> history;
  std::vector<std::string> warnings;

  bool censored() const { return !tau.has_value(); }
};

// Simulates one optimization run on the table under a virtual clock.
TrialResult run_trial(const SurrogateTable& table, const TrialOptions& options);

// Feature rows of every table entry, indexed by id.
Eigen::MatrixXd encode_table(const SurrogateTable& table);

}  // namespace deepbo

#endif  // DEEPBO_ENGINE_HPP_
