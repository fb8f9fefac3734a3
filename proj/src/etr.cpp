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

#include "deepbo/etr.hpp"

#include <algorithm>
#include <cmath>

#include "deepbo/common.hpp"

namespace deepbo {
namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta <= 0.5)) throw DomainError("beta must lie in (0, 0.5]");
}

}  // namespace

std::pair<int, int> checkpoints_cr(int max_epoch, double beta) {
  check_beta(beta);
  if (max_epoch < 2) throw DomainError("checkpoints_cr: max epoch must be >= 2");
  const double e = static_cast<double>(max_epoch);
  // Guard the floor against 0.9 * 100 landing on 89.999...
  const int j1 = static_cast<int>(std::floor(0.5 * e + 1e-9));
  const int j2 = static_cast<int>(std::floor((1.0 - beta) * e + 1e-9));
  return {j1, std::max(j1, j2)};
}

double running_average(std::span<const double> curve, int i, int j, AverageMode mode) {
  if (i < 1 || i > j || static_cast<std::size_t>(j) > curve.size()) {
    throw DomainError("running_average: need 1 <= i <= j <= curve length");
  }
  double sum = 0.0;
  for (int k = i; k <= j; ++k) sum += curve[static_cast<std::size_t>(k - 1)];
  const int denom = mode == AverageMode::kMean ? j - i + 1 : j;
  return sum / static_cast<double>(denom);
}

double nearest_rank_percentile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("percentile of an empty population");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("percentile rank must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // Tolerance keeps p * n = 1.0000000000000002 from skipping a rank.
  const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(p * n - 1e-9)));
  return values[std::min(rank, values.size()) - 1];
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty population");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Decision checkpoint_decide(double y_best, const EtrCheckpoint& cp, std::span<const CurveSoFar> history,
                           int min_epochs, AverageMode mode) {
  if (cp.aggressiveness <= 0.0) return Decision::kContinue;
  std::vector<double> reference;
  for (const CurveSoFar& c : history) {
    const int len = static_cast<int>(c.size());
    if (len < min_epochs || len < cp.start) continue;
    reference.push_back(running_average(c, cp.start, std::min(cp.end, len), mode));
  }
  if (reference.empty()) return Decision::kContinue;
  if (cp.aggressiveness >= 1.0) return Decision::kTerminate;
  const double threshold = nearest_rank_percentile(std::move(reference), cp.aggressiveness);
  return y_best < threshold ? Decision::kTerminate : Decision::kContinue;
}

Decision cr_decide(double y_best, int epoch, std::span<const CurveSoFar> history, int max_epoch, double beta,
                   AverageMode mode) {
  const auto [j1, j2] = checkpoints_cr(max_epoch, beta);
  if (epoch == j1) return checkpoint_decide(y_best, {1, j1, j1, beta}, history, j1, mode);
  if (epoch == j2) return checkpoint_decide(y_best, {j1, j2, j2, 1.0 - beta}, history, j1 + 1, mode);
  return Decision::kContinue;
}

Decision msr_decide(double y_best, int epoch, std::span<const CurveSoFar> history, int warmup) {
  if (epoch < 1) throw DomainError("msr_decide: epoch must be >= 1");
  if (epoch < warmup) return Decision::kContinue;
  std::vector<double> reference;
  for (const CurveSoFar& c : history) {
    if (static_cast<int>(c.size()) >= epoch) reference.push_back(running_average(c, 1, epoch));
  }
  if (reference.size() < 3) return Decision::kContinue;
  return y_best < median(std::move(reference)) ? Decision::kTerminate : Decision::kContinue;
}

double throughput_factor(double beta) {
  check_beta(beta);
  const double keep = 1.0 - beta;
  return 1.0 / (0.5 * beta + keep * keep * keep + keep * beta);
}

double survivor_rank_regret(const SurrogateTable& table, std::span<const int> survivor_ids) {
  if (survivor_ids.empty()) throw UndefinedMetricError("survivor rank regret of an empty survivor set");
  // Integer rank gaps with a single division, so the mean is correctly rounded.
  std::uint64_t gaps = 0;
  for (int id : survivor_ids) gaps += static_cast<std::uint64_t>(table.rank(id) - 1);
  return static_cast<double>(gaps) / (static_cast<double>(table.size()) * static_cast<double>(survivor_ids.size()));
}

std::string to_string(EtrKind kind) {
  switch (kind) {
    case EtrKind::kNone: return "none";
    case EtrKind::kCR: return "cr";
    case EtrKind::kMSR: return "msr";
    case EtrKind::kCustom: return "custom";
  }
  return "?";
}

EtrPolicy EtrPolicy::cr(double beta, AverageMode mode) {
  check_beta(beta);
  EtrPolicy p;
  p.kind = EtrKind::kCR;
  p.beta = beta;
  p.mode = mode;
  return p;
}

EtrPolicy EtrPolicy::msr(int warmup) {
  EtrPolicy p;
  p.kind = EtrKind::kMSR;
  p.msr_warmup = warmup;
  return p;
}

EtrPolicy EtrPolicy::custom(std::vector<EtrCheckpoint> checkpoints, AverageMode mode) {
  EtrPolicy p;
  p.kind = EtrKind::kCustom;
  p.checkpoints = std::move(checkpoints);
  p.mode = mode;
  return p;
}

void EtrPolicy::validate(int max_epoch) const {
  switch (kind) {
    case EtrKind::kNone: return;
    case EtrKind::kCR: (void)checkpoints_cr(max_epoch, beta); return;
    case EtrKind::kMSR:
      if (msr_warmup < 0) throw DomainError("msr warm-up must be >= 0");
      return;
    case EtrKind::kCustom: {
      if (checkpoints.empty()) throw DomainError("custom ETR needs at least one checkpoint");
      int previous = 0;
      for (const EtrCheckpoint& cp : checkpoints) {
        if (!(1 <= cp.start && cp.start <= cp.end && cp.end <= cp.at && cp.at <= max_epoch)) {
          throw DomainError("custom ETR checkpoint needs 1 <= s <= e <= j <= E");
        }
        if (!(cp.aggressiveness >= 0.0 && cp.aggressiveness <= 1.0)) {
          throw DomainError("custom ETR aggressiveness must lie in [0, 1]");
        }
        if (cp.at <= previous) throw DomainError("custom ETR checkpoints must have increasing j");
        previous = cp.at;
      }
      return;
    }
  }
}

std::vector<EtrCheckpoint> EtrPolicy::resolved_checkpoints(int max_epoch) const {
  switch (kind) {
    case EtrKind::kCR: {
      const auto [j1, j2] = checkpoints_cr(max_epoch, beta);
      return {{1, j1, j1, beta}, {j1, j2, j2, 1.0 - beta}};
    }
    case EtrKind::kCustom: return checkpoints;
    default: return {};
  }
}

Decision EtrPolicy::decide(double y_best, int epoch, std::span<const CurveSoFar> history, int max_epoch) const {
  switch (kind) {
    case EtrKind::kNone: return Decision::kContinue;
    case EtrKind::kCR: return cr_decide(y_best, epoch, history, max_epoch, beta, mode);
    case EtrKind::kMSR: {
      const int warmup = msr_warmup > 0 ? msr_warmup : (max_epoch + 2) / 3;
      return msr_decide(y_best, epoch, history, warmup);
    }
    case EtrKind::kCustom: {
      for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        const EtrCheckpoint& cp = checkpoints[k];
        if (cp.at != epoch) continue;
        const int min_epochs = k == 0 ? cp.end : checkpoints[k - 1].at + 1;
        return checkpoint_decide(y_best, cp, history, min_epochs, mode);
      }
      return Decision::kContinue;
    }
  }
  return Decision::kContinue;
}

}  // namespace deepbo
