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

#ifndef DEEPBO_METRICS_HPP_
#define DEEPBO_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deepbo/engine.hpp"

namespace deepbo {

inline constexpr double kSecondsPerHour = 3600.0;

// Results of repeated trials under one setting (distinct seeds).
struct TrialEnsemble {
  std::vector<std::optional<double>> taus;  // seconds; empty = censored
  double target = 0.0;
  std::string fingerprint;

  static TrialEnsemble from_results(std::span<const TrialResult> results, double target, std::string fingerprint);
};

// Fraction of trials with tau <= t (seconds). Censored trials never count.
double success_rate(const TrialEnsemble& ensemble, double t);

struct ExpectedTime {
  double mean_hours = 0.0;
  double stddev_hours = 0.0;  // population standard deviation
  std::size_t censored = 0;
};

// Over non-censored trials; throws UndefinedMetricError if all are censored.
ExpectedTime expected_time(const TrialEnsemble& ensemble);

// 1 - (1 - s)^M pointwise.
std::vector<double> theoretical_diversity(std::span<const double> success_curve, int workers);

// E1 / (M * EM); 1 is ideal linear speed-up.
double parallel_gain(double e1, double em, int workers);

// One-sided Mann-Whitney rank-sum test that `a` tends to be smaller than `b`
// (normal approximation with tie correction). Censored values are +inf.
struct RankSumResult {
  double u = 0.0;   // U statistic of `a`
  double z = 0.0;
  double p_less = 1.0;
};
RankSumResult rank_sum_less(std::span<const double> a, std::span<const double> b);

// Equal-tailed acceptance region of Binomial(n, p): at most (1 - level) / 2
// of the probability mass lies below `lo` and at most that much above `hi`.
struct CountInterval {
  std::size_t lo = 0;
  std::size_t hi = 0;
};
CountInterval binomial_interval(std::size_t n, double p, double level);

}  // namespace deepbo

#endif  // DEEPBO_METRICS_HPP_
