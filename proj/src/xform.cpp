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

#include "deepbo/xform.hpp"

#include <algorithm>
#include <cmath>

#include "deepbo/common.hpp"

namespace deepbo {

double hybrid_transform(double y, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("hybrid_transform: alpha must lie in (0, 1]");
  if (!(y >= 0.0)) throw DomainError("hybrid_transform: accuracy must be >= 0");
  if (!(y < 1.0)) throw DomainError("hybrid_transform: accuracy must be < 1");
  if (y < 1.0 - alpha) return y;
  return 1.0 - std::log1p(-y) + (std::log(alpha) - alpha);
}

double rescale_unit(double value, double lo, double hi, bool higher_is_better) {
  if (!(lo < hi)) throw DomainError("rescale_unit: need lo < hi");
  const double u = std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
  return higher_is_better ? u : 1.0 - u;
}

}  // namespace deepbo
