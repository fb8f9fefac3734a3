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

#include <array>
#include <cstdint>
#include <string>

#include "deepbo/common.hpp"
#include "deepbo/hpspace.hpp"

namespace deepbo {
namespace {

constexpr int kBits = 32;

struct Primitive {
  int degree;
  std::uint32_t coeffs;  // interior coefficients a_1..a_{s-1}
  std::array<std::uint32_t, 8> init;
};

// Joe & Kuo (new-joe-kuo-6.21201), dimensions 2..32. Dimension 1 is the
// van der Corput sequence in base 2.
constexpr std::array<Primitive, 31> kDirections = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
    {7, 7, {1, 1, 3, 13, 7, 35, 63}},
    {7, 8, {1, 3, 5, 9, 1, 25, 53}},
    {7, 14, {1, 3, 1, 13, 9, 35, 107}},
    {7, 19, {1, 3, 1, 5, 27, 61, 31}},
    {7, 21, {1, 1, 5, 11, 19, 41, 61}},
    {7, 28, {1, 3, 5, 3, 3, 13, 69}},
    {7, 31, {1, 1, 7, 13, 1, 19, 1}},
    {7, 32, {1, 3, 7, 5, 13, 19, 59}},
    {7, 37, {1, 1, 3, 9, 25, 29, 41}},
    {7, 41, {1, 3, 5, 13, 23, 1, 55}},
    {7, 42, {1, 3, 7, 3, 13, 59, 17}},
}};

using DirectionRow = std::array<std::uint32_t, kBits>;

DirectionRow direction_row(std::size_t dim) {
  DirectionRow v{};
  if (dim == 0) {
    for (int k = 0; k < kBits; ++k) v[k] = 1u << (kBits - 1 - k);
    return v;
  }
  const Primitive& p = kDirections[dim - 1];
  const int s = p.degree;
  for (int k = 0; k < s; ++k) v[k] = p.init[k] << (kBits - 1 - k);
  for (int k = s; k < kBits; ++k) {
    v[k] = v[k - s] ^ (v[k - s] >> s);
    for (int i = 1; i < s; ++i) {
      if ((p.coeffs >> (s - 1 - i)) & 1u) v[k] ^= v[k - i];
    }
  }
  return v;
}

}  // namespace

std::size_t sobol_max_dimension() { return kDirections.size() + 1; }

std::vector<Eigen::VectorXd> sobol_points(std::size_t d, std::size_t n, std::size_t skip) {
  if (d < 1) throw DomainError("sobol_points: dimension must be >= 1");
  if (d > sobol_max_dimension()) {
    throw UnsupportedDimensionError("sobol_points: dimension " + std::to_string(d) +
                                    " exceeds supported maximum " +
                                    std::to_string(sobol_max_dimension()));
  }
  if (n < 1) throw DomainError("sobol_points: count must be >= 1");
  if (skip < 1) throw DomainError("sobol_points: skip must be >= 1 (index 0 is all zeros)");
  if (skip + n > (std::size_t{1} << kBits)) throw DomainError("sobol_points: index range exceeds 2^32");

  std::vector<DirectionRow> rows(d);
  for (std::size_t j = 0; j < d; ++j) rows[j] = direction_row(j);

  // State at index `skip` from its Gray code, then one XOR per step.
  std::vector<std::uint32_t> state(d, 0u);
  const std::uint64_t gray = skip ^ (skip >> 1);
  for (int k = 0; k < kBits; ++k) {
    if ((gray >> k) & 1u) {
      for (std::size_t j = 0; j < d; ++j) state[j] ^= rows[j][k];
    }
  }

  constexpr double kScale = 1.0 / 4294967296.0;
  std::vector<Eigen::VectorXd> points;
  points.reserve(n);
  std::uint64_t index = skip;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) p[static_cast<Eigen::Index>(j)] = state[j] * kScale;
    points.push_back(std::move(p));
    // Rightmost zero bit of the current index selects the direction to flip.
    int c = 0;
    while ((index >> c) & 1u) ++c;
    if (c < kBits) {
      for (std::size_t j = 0; j < d; ++j) state[j] ^= rows[j][c];
    }
    ++index;
  }
  return points;
}

}  // namespace deepbo
