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

#ifndef DEEPBO_TABULAR_HPP_
#define DEEPBO_TABULAR_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "deepbo/hpspace.hpp"

namespace deepbo {

// Per-epoch accuracy and wall time of one pre-evaluated configuration.
struct LearningCurve {
  std::vector<double> accuracy;
  std::vector<double> epoch_seconds;

  std::size_t epochs() const { return accuracy.size(); }
};

struct TableEntry {
  Configuration config;
  LearningCurve curve;
  double terminal_best = 0.0;  // max over the whole curve
};

// Lookup table standing in for live training: entry i has id i.
class SurrogateTable {
 public:
  static constexpr std::size_t kMinEntries = 11;

  SurrogateTable(HyperparameterSpace space, int max_epoch, std::vector<TableEntry> entries);

  const HyperparameterSpace& space() const { return space_; }
  int max_epoch() const { return max_epoch_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<TableEntry>& entries() const { return entries_; }
  const TableEntry& at(int id) const;

  // 1-based rank by terminal best (descending, ties by ascending id).
  std::size_t rank(int id) const;
  const std::vector<int>& ids_by_rank() const { return by_rank_; }

 private:
  HyperparameterSpace space_;
  int max_epoch_;
  std::vector<TableEntry> entries_;
  std::vector<int> by_rank_;
  std::vector<std::size_t> rank_of_;
};

SurrogateTable load_table(const std::filesystem::path& path);
SurrogateTable read_table(std::istream& in);
void write_table(const SurrogateTable& table, std::ostream& out);
void write_table(const SurrogateTable& table, const std::filesystem::path& path);

// Shape of the synthetic learning curves.
struct CurveModel {
  int max_epoch = 15;
  // Terminal accuracies are spread over [accuracy_lo, accuracy_hi].
  double accuracy_lo = 0.1;
  double accuracy_hi = 0.95;
  // Per-configuration time constant, drawn log-uniformly.
  double lambda_min = 0.5;
  double lambda_max = 4.0;
  double noise_sd = 0.005;
  // Fraction of configurations whose first floor(E/4) epochs stay near `floor`.
  double late_bloomer_fraction = 0.0;
  double floor = 0.1;
  double epoch_seconds_min = 30.0;
  double epoch_seconds_max = 120.0;
  // Number of bumps in the multimodal terminal-accuracy landscape.
  int modes = 4;
};

SurrogateTable generate_synthetic(const HyperparameterSpace& space, std::size_t n, std::uint64_t seed,
                                  const CurveModel& model = {});

// k-th largest terminal best accuracy.
double target_accuracy(const SurrogateTable& table, std::size_t k);

// (rank(id) - 1) / n.
double rank_regret(const SurrogateTable& table, int id);

// max of accuracy[1..epoch] (1-based epoch).
double best_until(const SurrogateTable& table, int id, int epoch);

// Space resembling a small convnet search: three discrete sizes, log learning
// rate, two continuous regularizers, two categoricals.
HyperparameterSpace convnet_space();

}  // namespace deepbo

#endif  // DEEPBO_TABULAR_HPP_
