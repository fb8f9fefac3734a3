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

#include "deepbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace deepbo {

std::string to_string(AcqTag tag) {
  switch (tag) {
    case AcqTag::kEI: return "EI";
    case AcqTag::kPI: return "PI";
    case AcqTag::kUCB: return "UCB";
  }
  return "?";
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double ei(double mean, double var, double best) {
  if (!(var >= 0.0)) throw DomainError("ei: variance must be >= 0");
  const double sigma = std::sqrt(var);
  if (sigma == 0.0) return std::max(mean - best, 0.0);
  const double z = (mean - best) / sigma;
  return std::max(sigma * (z * normal_cdf(z) + normal_pdf(z)), 0.0);
}

double pi(double mean, double var, double best) {
  if (!(var >= 0.0)) throw DomainError("pi: variance must be >= 0");
  const double sigma = std::sqrt(var);
  if (sigma == 0.0) return mean > best ? 1.0 : 0.0;
  return normal_cdf((mean - best) / sigma);
}

double ucb(double mean, double var, double kappa) {
  if (!(var >= 0.0)) throw DomainError("ucb: variance must be >= 0");
  if (!(kappa > 0.0)) throw DomainError("ucb: kappa must be > 0");
  return mean + kappa * std::sqrt(var);
}

double acquisition(const AcqKind& kind, const Prediction& p, double best) {
  switch (kind.tag) {
    case AcqTag::kEI: return ei(p.mean, p.variance, best);
    case AcqTag::kPI: return pi(p.mean, p.variance, best);
    case AcqTag::kUCB: return ucb(p.mean, p.variance, kind.kappa);
  }
  return 0.0;
}

double integrated_acq(const AcqKind& kind, std::span<const Prediction> predictions, double best) {
  if (predictions.empty()) throw DomainError("integrated_acq: need at least one prediction");
  double sum = 0.0;
  for (const Prediction& p : predictions) sum += acquisition(kind, p, best);
  return sum / static_cast<double>(predictions.size());
}

std::array<double, 3> hedge_probabilities(const HedgeState& state) {
  if (!(state.eta > 0.0)) throw DomainError("hedge: eta must be > 0");
  const double top = *std::max_element(state.gains.begin(), state.gains.end());
  std::array<double, 3> p{};
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(state.eta * (state.gains[i] - top));
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

std::size_t hedge_select(const HedgeState& state, Rng& rng) {
  const std::array<double, 3> p = hedge_probabilities(state);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    cumulative += p[i];
    if (u < cumulative) return i;
  }
  return p.size() - 1;
}

HedgeState hedge_update(HedgeState state, const std::array<double, 3>& rewards) {
  for (std::size_t i = 0; i < rewards.size(); ++i) state.gains[i] += rewards[i];
  return state;
}

}  // namespace deepbo
