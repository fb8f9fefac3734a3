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

#ifndef DEEPBO_XFORM_HPP_
#define DEEPBO_XFORM_HPP_

namespace deepbo {

inline constexpr double kDefaultAlpha = 0.3;

// Identity below the knee 1 - alpha; shifted -log(1 - y) above it, offset so
// the two branches meet. Requires 0 <= y < 1 and 0 < alpha <= 1.
double hybrid_transform(double y, double alpha = kDefaultAlpha);

// Min-max map of an objective into [0, 1] so that larger is better.
// Loss-like objectives (perplexity, error) pass higher_is_better = false.
double rescale_unit(double value, double lo, double hi, bool higher_is_better = true);

}  // namespace deepbo

#endif  // DEEPBO_XFORM_HPP_
