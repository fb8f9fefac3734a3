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

#include <algorithm>
#include <cmath>

#include "deepbo/acquisition.hpp"
#include "deepbo/common.hpp"

using namespace deepbo;

TEST_CASE("ei: closed form examples") {
  CHECK(std::abs(ei(0.0, 1.0, 0.0) - 0.398942280401433) < 1e-14);
  CHECK(ei(0.3, 0.0, 0.1) == doctest::Approx(0.2));
  CHECK(ei(0.0, 0.0, 0.5) == 0.0);
}

TEST_CASE("pi: closed form examples") {
  CHECK(pi(0.0, 1.0, 0.0) == 0.5);
  CHECK(std::abs(pi(1.0, 1.0, 0.0) - 0.841344746068543) < 1e-14);
  CHECK(pi(0.0, 0.0, 1.0) == 0.0);
  CHECK(pi(1.0, 0.0, 0.0) == 1.0);
}

TEST_CASE("ucb: examples") {
  CHECK(ucb(0.2, 0.01, 2.0) == doctest::Approx(0.4));
  CHECK(ucb(0.7, 0.0, 3.0) == 0.7);
  CHECK(ucb(0.1, 0.04, 3.0) > ucb(0.1, 0.04, 2.0));
  CHECK_THROWS_AS(ucb(0.1, 0.04, 0.0), DomainError);
  CHECK_THROWS_AS(ei(0.1, -1.0, 0.0), DomainError);
}

TEST_CASE("integrated_acq: averages over hyper-samples") {
  const std::vector<Prediction> one{{0.3, 0.2}};
  CHECK(integrated_acq(AcqKind::ei(), one, 0.1) == ei(0.3, 0.2, 0.1));
  const std::vector<Prediction> twice{{0.3, 0.2}, {0.3, 0.2}};
  CHECK(integrated_acq(AcqKind::pi(), twice, 0.1) == doctest::Approx(pi(0.3, 0.2, 0.1)));
  const std::vector<Prediction> mixed{{0.0, 1.0}, {0.0, 0.0}};
  CHECK(std::abs(integrated_acq(AcqKind::ei(), mixed, 0.0) - 0.199471140200716) < 1e-14);
  CHECK_THROWS_AS(integrated_acq(AcqKind::ei(), std::vector<Prediction>{}, 0.0), DomainError);
}

TEST_CASE("property: bounds and permutation invariance") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Prediction> ps;
    for (int k = 0; k < 5; ++k) ps.push_back({rng.uniform(-2, 2), rng.uniform(0, 2)});
    const double best = rng.uniform(-2, 2);
    for (const Prediction& p : ps) {
      CHECK(ei(p.mean, p.variance, best) >= 0.0);
      const double v = pi(p.mean, p.variance, best);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (const AcqKind kind : {AcqKind::ei(), AcqKind::pi(), AcqKind::ucb(1.5)}) {
      const double a = integrated_acq(kind, ps, best);
      std::vector<Prediction> shuffled(ps.rbegin(), ps.rend());
      std::swap(shuffled[0], shuffled[3]);
      CHECK(integrated_acq(kind, shuffled, best) == doctest::Approx(a).epsilon(1e-14));
    }
  }
}

TEST_CASE("ei/pi agree with a Monte Carlo estimate") {
  Rng rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const double mean = rng.uniform(-1, 1), var = rng.uniform(0.01, 1.5), best = rng.uniform(-1, 1);
    double sum_ei = 0.0, sum_pi = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double f = rng.normal(mean, std::sqrt(var));
      sum_ei += std::max(f - best, 0.0);
      sum_pi += f > best ? 1.0 : 0.0;
    }
    CHECK(std::abs(sum_ei / n - ei(mean, var, best)) < 6e-3);
    CHECK(std::abs(sum_pi / n - pi(mean, var, best)) < 6e-3);
  }
}

TEST_CASE("hedge: probabilities, selection, update") {
  HedgeState s;
  for (double p : hedge_probabilities(s)) CHECK(p == doctest::Approx(1.0 / 3.0));
  s.gains = {10, 0, 0};
  s.eta = 10;
  CHECK(hedge_probabilities(s)[0] > 0.9999);
  s.gains = {1e6, 1e6 - 1, 0};  // max-subtraction keeps this finite
  s.eta = 1.0;
  const auto p = hedge_probabilities(s);
  CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 1.0)).epsilon(1e-9));

  const HedgeState u = hedge_update(HedgeState{}, {1, 2, 3});
  CHECK(u.gains == std::array<double, 3>{1, 2, 3});

  Rng rng(2);
  HedgeState t;
  t.gains = {0.0, 1.0, 0.5};
  std::array<int, 3> counts{};
  for (int i = 0; i < 30000; ++i) ++counts[hedge_select(t, rng)];
  const auto q = hedge_probabilities(t);
  for (std::size_t i = 0; i < 3; ++i) CHECK(counts[i] / 30000.0 == doctest::Approx(q[i]).epsilon(0.05));
  CHECK_THROWS_AS(hedge_probabilities(HedgeState{{0, 0, 0}, 0.0}), DomainError);
}

TEST_CASE("property: hedge probabilities ignore a common shift") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    HedgeState s;
    s.gains = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    s.eta = rng.uniform(0.1, 3);
    HedgeState shifted = s;
    const double c = rng.uniform(-100, 100);
    for (double& g : shifted.gains) g += c;
    const auto a = hedge_probabilities(s), b = hedge_probabilities(shifted);
    CHECK(a[0] + a[1] + a[2] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
  }
}
