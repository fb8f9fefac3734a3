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

#include <cmath>
#include <limits>

#include "deepbo/common.hpp"
#include "deepbo/metrics.hpp"

using namespace deepbo;

namespace {

TrialEnsemble hours(std::initializer_list<std::optional<double>> h) {
  TrialEnsemble e;
  for (const auto& v : h) e.taus.push_back(v ? std::optional<double>(*v * kSecondsPerHour) : std::nullopt);
  return e;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("success_rate: counting") {
  TrialEnsemble e;
  e.taus = {1.0, 2.0, 3.0, 4.0, std::nullopt};
  CHECK(success_rate(e, 2.0) == doctest::Approx(0.4));
  CHECK(success_rate(e, 0.0) == 0.0);
  CHECK(success_rate(e, kInf) == doctest::Approx(0.8));
  e.taus.push_back(0.0);
  CHECK(success_rate(e, 0.0) == doctest::Approx(1.0 / 6.0));
  CHECK_THROWS_AS(success_rate(e, -1.0), DomainError);
  CHECK_THROWS_AS(success_rate(TrialEnsemble{}, 1.0), UndefinedMetricError);
}

TEST_CASE("property: success_rate is nondecreasing in t") {
  Rng rng(1);
  TrialEnsemble e;
  for (int i = 0; i < 100; ++i) e.taus.push_back(rng.uniform() < 0.2 ? std::nullopt : std::optional(rng.uniform(0, 1e5)));
  double prev = 0.0;
  for (double t = 0.0; t <= 1.1e5; t += 500.0) {
    const double s = success_rate(e, t);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("expected_time: hours, population deviation, censoring") {
  ExpectedTime et = expected_time(hours({2.0, 4.0}));
  CHECK(et.mean_hours == doctest::Approx(3.0));
  CHECK(et.stddev_hours == doctest::Approx(1.0));
  et = expected_time(hours({5.0}));
  CHECK(et.mean_hours == doctest::Approx(5.0));
  CHECK(et.stddev_hours == 0.0);
  et = expected_time(hours({2.0, 4.0, std::nullopt}));
  CHECK(et.mean_hours == doctest::Approx(3.0));
  CHECK(et.stddev_hours == doctest::Approx(1.0));
  CHECK(et.censored == 1);
  CHECK_THROWS_AS(expected_time(hours({std::nullopt})), UndefinedMetricError);
}

TEST_CASE("property: expected time lies within the observed range") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    TrialEnsemble e;
    double lo = kInf, hi = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double t = rng.uniform(10, 1e5);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
      e.taus.push_back(t);
    }
    const double m = expected_time(e).mean_hours * kSecondsPerHour;
    CHECK(m >= lo * (1 - 1e-12));
    CHECK(m <= hi * (1 + 1e-12));
  }
}

TEST_CASE("theoretical_diversity and parallel_gain") {
  const std::vector<double> s{0.0, 0.5, 1.0};
  const auto d6 = theoretical_diversity(s, 6);
  CHECK(d6[0] == 0.0);
  CHECK(d6[1] == 0.984375);
  CHECK(d6[2] == 1.0);
  CHECK(theoretical_diversity(s, 1) == s);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.uniform();
    const std::vector<double> one{v};
    const int m = 1 + static_cast<int>(rng.below(8));
    const double d = theoretical_diversity(one, m)[0];
    CHECK(d >= v);
    if (m > 1 && v > 0.0 && v < 1.0) CHECK(d > v);
  }
  CHECK_THROWS_AS(theoretical_diversity(s, 0), DomainError);
  CHECK_THROWS_AS(theoretical_diversity(std::vector<double>{1.2}, 2), DomainError);

  CHECK(parallel_gain(12, 2, 6) == doctest::Approx(1.0));
  CHECK(parallel_gain(10.7, 2.0, 6) == doctest::Approx(0.891666666666667).epsilon(1e-12));
  CHECK(parallel_gain(6, 6, 1) == 1.0);
  CHECK_THROWS_AS(parallel_gain(0, 1, 1), DomainError);
}

TEST_CASE("rank_sum_less: separation and ties") {
  const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> b{11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  const RankSumResult r = rank_sum_less(a, b);
  CHECK(r.u == 0.0);
  CHECK(r.p_less < 1e-3);
  CHECK(rank_sum_less(b, a).p_less > 0.999);
  // Reference: scipy.stats.mannwhitneyu(c, d, alternative="less",
  // method="asymptotic") gives U = 2, p = 0.017226818519735638.
  const std::vector<double> c{1, 2, 2, 3, 4};
  const std::vector<double> d{3, 4, 5, 5, 6};
  const RankSumResult t = rank_sum_less(c, d);
  CHECK(t.u == 2.0);
  CHECK(t.p_less == doctest::Approx(0.017226818519735638).epsilon(1e-9));
  // Censored (+inf) values rank last.
  const std::vector<double> e{1, 2, kInf};
  const std::vector<double> f{kInf, kInf, kInf};
  CHECK(rank_sum_less(e, f).p_less < 0.1);
  CHECK_THROWS_AS(rank_sum_less(std::vector<double>{}, d), DomainError);
}

TEST_CASE("binomial_interval: equal tails") {
  const CountInterval ci = binomial_interval(500, 0.1, 0.99);
  // scipy.stats.binom.ppf(0.005, 500, 0.1) = 34, ppf(0.995) = 68.
  CHECK(ci.lo == 34);
  CHECK(ci.hi == 68);
  const CountInterval zero = binomial_interval(100, 0.0, 0.99);
  CHECK(zero.lo == 0);
  CHECK(zero.hi == 0);
  const CountInterval one = binomial_interval(100, 1.0, 0.99);
  CHECK(one.lo == 100);
  CHECK(one.hi == 100);
  CHECK_THROWS_AS(binomial_interval(10, 1.5, 0.99), DomainError);
}

TEST_CASE("ensemble from results") {
  std::vector<TrialResult> rs(3);
  rs[0].tau = 10.0;
  rs[2].tau = 30.0;
  const TrialEnsemble e = TrialEnsemble::from_results(rs, 0.9, "abc");
  CHECK(e.taus.size() == 3);
  CHECK_FALSE(e.taus[1].has_value());
  CHECK(e.target == 0.9);
  CHECK(e.fingerprint == "abc");
}
