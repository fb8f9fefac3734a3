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

#ifndef DEEPBO_ETR_HPP_
#define DEEPBO_ETR_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deepbo/tabular.hpp"

namespace deepbo {

inline constexpr double kDefaultBeta = 0.1;

// Per-epoch accuracies observed so far for one configuration.
using CurveSoFar = std::vector<double>;

enum class Decision { kContinue, kTerminate };

// kMean divides by the number of epochs averaged. kLiteral divides by the
// end epoch j even when the window starts later.
enum class AverageMode { kMean, kLiteral };

// One termination checkpoint in (start, end, evaluate-at, aggressiveness) form.
// Epochs are 1-based; 1 <= start <= end <= at, 0 <= aggressiveness <= 1.
struct EtrCheckpoint {
  int start = 1;
  int end = 1;
  int at = 1;
  double aggressiveness = 0.5;

  bool operator==(const EtrCheckpoint&) const = default;
};

// (floor(E/2), floor((1 - beta) E)).
std::pair<int, int> checkpoints_cr(int max_epoch, double beta);

// Average of curve[i..j] (1-based, inclusive).
double running_average(std::span<const double> curve, int i, int j, AverageMode mode = AverageMode::kMean);

// Smallest value whose empirical CDF is >= p.
double nearest_rank_percentile(std::vector<double> values, double p);
// Midpoint median.
double median(std::vector<double> values);

// Applies one checkpoint at its evaluation epoch. Reference curves need at
// least `min_epochs` recorded epochs; their window average is taken over
// [start, min(end, length)]. No reference curves means continue.
Decision checkpoint_decide(double y_best, const EtrCheckpoint& checkpoint, std::span<const CurveSoFar> history,
                           int min_epochs, AverageMode mode = AverageMode::kMean);

// Two-checkpoint compound rule. Checkpoint-1 at j1 compares against the
// beta-percentile of running averages over [1, j1] for curves with >= j1
// epochs; checkpoint-2 at j2 against the (1 - beta)-percentile over [j1, j2]
// for curves with more than j1 epochs. Other epochs always continue.
Decision cr_decide(double y_best, int epoch, std::span<const CurveSoFar> history, int max_epoch, double beta,
                   AverageMode mode = AverageMode::kMean);

// Median stopping rule: compares against the median of running averages over
// [1, epoch]; needs at least three reference curves and epoch >= warmup.
Decision msr_decide(double y_best, int epoch, std::span<const CurveSoFar> history, int warmup = 1);

// Expected configurations encountered per unit time relative to no early
// termination: 1 / (beta/2 + (1-beta)^3 + (1-beta) beta).
double throughput_factor(double beta);

// Mean rank regret over the configurations that were trained fully.
double survivor_rank_regret(const SurrogateTable& table, std::span<const int> survivor_ids);

enum class EtrKind { kNone, kCR, kMSR, kCustom };

std::string to_string(EtrKind kind);

struct EtrPolicy {
  EtrKind kind = EtrKind::kNone;
  double beta = kDefaultBeta;
  AverageMode mode = AverageMode::kMean;
  std::vector<EtrCheckpoint> checkpoints;  // kCustom only
  int msr_warmup = 0;                      // 0 selects ceil(E/3)

  static EtrPolicy none() { return {}; }
  static EtrPolicy cr(double beta = kDefaultBeta, AverageMode mode = AverageMode::kMean);
  static EtrPolicy msr(int warmup = 0);
  static EtrPolicy custom(std::vector<EtrCheckpoint> checkpoints, AverageMode mode = AverageMode::kMean);

  // Throws DomainError if the policy cannot run with this epoch budget.
  void validate(int max_epoch) const;

  // Checkpoint form of the policy (CR expands to its two checkpoints; MSR and
  // kNone have none).
  std::vector<EtrCheckpoint> resolved_checkpoints(int max_epoch) const;

  Decision decide(double y_best, int epoch, std::span<const CurveSoFar> history, int max_epoch) const;
};

}  // namespace deepbo

#endif  // DEEPBO_ETR_HPP_
