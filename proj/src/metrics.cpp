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

#include "deepbo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deepbo/acquisition.hpp"
#include "deepbo/common.hpp"

namespace deepbo {

TrialEnsemble TrialEnsemble::from_results(std::span<const TrialResult> results, double target,
                                          std::string fingerprint) {
  TrialEnsemble e;
  e.target = target;
  e.fingerprint = std::move(fingerprint);
  for (const TrialResult& r : results) e.taus.push_back(r.tau);
  return e;
}

double success_rate(const TrialEnsemble& ensemble, double t) {
  if (!(t >= 0.0)) throw DomainError("success_rate: t must be >= 0");
  if (ensemble.taus.empty()) throw UndefinedMetricError("success_rate of an empty ensemble");
  const auto hits = std::count_if(ensemble.taus.begin(), ensemble.taus.end(),
                                  [t](const std::optional<double>& tau) { return tau && *tau <= t; });
  return static_cast<double>(hits) / static_cast<double>(ensemble.taus.size());
}

ExpectedTime expected_time(const TrialEnsemble& ensemble) {
  std::vector<double> hours;
  ExpectedTime out;
  for (const auto& tau : ensemble.taus) {
    if (tau) {
      hours.push_back(*tau / kSecondsPerHour);
    } else {
      ++out.censored;
    }
  }
  if (hours.empty()) throw UndefinedMetricError("expected time undefined: every trial is censored");
  const double n = static_cast<double>(hours.size());
  out.mean_hours = std::accumulate(hours.begin(), hours.end(), 0.0) / n;
  double ss = 0.0;
  for (double h : hours) ss += (h - out.mean_hours) * (h - out.mean_hours);
  out.stddev_hours = std::sqrt(ss / n);
  return out;
}

std::vector<double> theoretical_diversity(std::span<const double> success_curve, int workers) {
  if (workers < 1) throw DomainError("theoretical_diversity: need M >= 1");
  std::vector<double> out;
  out.reserve(success_curve.size());
  for (double s : success_curve) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("theoretical_diversity: success rate outside [0, 1]");
    out.push_back(1.0 - std::pow(1.0 - s, workers));
  }
  return out;
}

double parallel_gain(double e1, double em, int workers) {
  if (!(e1 > 0.0 && em > 0.0) || workers < 1) throw DomainError("parallel_gain: inputs must be positive");
  return e1 / (static_cast<double>(workers) * em);
}

RankSumResult rank_sum_less(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("rank_sum_less: both samples must be non-empty");
  struct Item {
    double value;
    bool from_a;
  };
  std::vector<Item> all;
  for (double v : a) all.push_back({v, true});
  for (double v : b) all.push_back({v, false});
  std::sort(all.begin(), all.end(), [](const Item& x, const Item& y) { return x.value < y.value; });

  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && (all[j].value == all[i].value)) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].from_a) rank_sum_a += avg_rank;
    }
    i = j;
  }
  RankSumResult r;
  r.u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
  const double mean_u = n1 * n2 / 2.0;
  const double var_u = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var_u <= 0.0) return r;
  // Continuity correction toward the null.
  r.z = (r.u - mean_u + 0.5) / std::sqrt(var_u);
  r.p_less = normal_cdf(r.z);
  return r;
}

CountInterval binomial_interval(std::size_t n, double p, double level) {
  if (!(p >= 0.0 && p <= 1.0) || !(level > 0.0 && level < 1.0)) throw DomainError("binomial_interval: bad inputs");
  // Exact pmf by log-gamma; n is small enough in practice.
  std::vector<double> pmf(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    if (p == 0.0) {
      pmf[k] = k == 0 ? 1.0 : 0.0;
    } else if (p == 1.0) {
      pmf[k] = k == n ? 1.0 : 0.0;
    } else {
      const double kk = static_cast<double>(k);
      const double nn = static_cast<double>(n);
      pmf[k] = std::exp(std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1) + kk * std::log(p) +
                        (nn - kk) * std::log1p(-p));
    }
  }
  // Equal-tailed: trim at most (1 - level)/2 from each side.
  const double tail = (1.0 - level) / 2.0;
  CountInterval ci{0, n};
  double lower_mass = 0.0;
  while (ci.lo < n && lower_mass + pmf[ci.lo] <= tail) lower_mass += pmf[ci.lo++];
  double upper_mass = 0.0;
  while (ci.hi > ci.lo && upper_mass + pmf[ci.hi] <= tail) upper_mass += pmf[ci.hi--];
  return ci;
}

}  // namespace deepbo
