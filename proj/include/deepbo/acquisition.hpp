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

#ifndef DEEPBO_ACQUISITION_HPP_
#define DEEPBO_ACQUISITION_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>

#include "deepbo/common.hpp"
#include "deepbo/surrogate.hpp"

namespace deepbo {

// All acquisitions maximize: larger transformed accuracy is better.
enum class AcqTag { kEI, kPI, kUCB };

struct AcqKind {
  AcqTag tag = AcqTag::kEI;
  double kappa = 2.0;  // UCB only

  static AcqKind ei() { return {AcqTag::kEI, 0.0}; }
  static AcqKind pi() { return {AcqTag::kPI, 0.0}; }
  static AcqKind ucb(double kappa = 2.0) { return {AcqTag::kUCB, kappa}; }

  bool operator==(const AcqKind&) const = default;
};

std::string to_string(AcqTag tag);

double normal_pdf(double z);
double normal_cdf(double z);

double ei(double mean, double var, double best);
double pi(double mean, double var, double best);
double ucb(double mean, double var, double kappa);

double acquisition(const AcqKind& kind, const Prediction& p, double best);

// Average of the acquisition over per-hyper-sample predictions.
double integrated_acq(const AcqKind& kind, std::span<const Prediction> predictions, double best);

// Exponential-weights portfolio over the three acquisitions (EI, PI, UCB).
struct HedgeState {
  std::array<double, 3> gains{0.0, 0.0, 0.0};
  double eta = 1.0;
};

inline constexpr std::array<AcqTag, 3> kHedgeArms{AcqTag::kEI, AcqTag::kPI, AcqTag::kUCB};

std::array<double, 3> hedge_probabilities(const HedgeState& state);
std::size_t hedge_select(const HedgeState& state, Rng& rng);
HedgeState hedge_update(HedgeState state, const std::array<double, 3>& rewards);

}  // namespace deepbo

#endif  // DEEPBO_ACQUISITION_HPP_
