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

#ifndef DEEPBO_HPSPACE_HPP_
#define DEEPBO_HPSPACE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace deepbo {

enum class ParamKind { kContinuous, kDiscrete, kCategorical };
enum class Scale { kLinear, kLog };

// One hyperparameter. Numeric kinds use [lo, hi]; categorical uses `choices`.
// Discrete parameters take the integer values lo, lo+1, ..., hi.
struct ParamDef {
  std::string name;
  ParamKind kind = ParamKind::kContinuous;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::string> choices;
  Scale scale = Scale::kLinear;

  static ParamDef continuous(std::string name, double lo, double hi, Scale scale = Scale::kLinear);
  static ParamDef discrete(std::string name, double lo, double hi, Scale scale = Scale::kLinear);
  static ParamDef categorical(std::string name, std::vector<std::string> choices);

  bool is_numeric() const { return kind != ParamKind::kCategorical; }
  // Number of feature columns this parameter occupies after encoding.
  std::size_t feature_width() const { return is_numeric() ? 1 : choices.size(); }
};

// A concrete value: numbers for continuous/discrete, strings for categorical.
using ParamValue = std::variant<double, std::string>;

struct Configuration {
  int id = 0;
  std::vector<ParamValue> values;
};

using FeatureVector = Eigen::VectorXd;

// Ordered list of parameter definitions; validated on construction.
class HyperparameterSpace {
 public:
  HyperparameterSpace() = default;
  explicit HyperparameterSpace(std::vector<ParamDef> params);

  std::size_t dimension() const { return params_.size(); }
  std::size_t feature_dimension() const { return feature_dimension_; }
  const std::vector<ParamDef>& params() const { return params_; }
  const ParamDef& operator[](std::size_t i) const { return params_[i]; }

  bool operator==(const HyperparameterSpace& other) const;

 private:
  std::vector<ParamDef> params_;
  std::size_t feature_dimension_ = 0;
};

// Throws DomainError describing the first violated invariant.
void validate(const ParamDef& param);

// Highest dimension for which direction numbers are embedded.
std::size_t sobol_max_dimension();

// `n` points of the unscrambled Sobol sequence in [0,1)^d, starting at
// sequence index `skip` (Gray-code order, Joe-Kuo direction numbers).
// Index 0 is the all-zeros point, so skip must be at least 1.
std::vector<Eigen::VectorXd> sobol_points(std::size_t d, std::size_t n, std::size_t skip = 1);

// Maps a unit vector onto parameter values.
std::vector<ParamValue> decode(const HyperparameterSpace& space, std::span<const double> unit);
std::vector<ParamValue> decode(const HyperparameterSpace& space, const Eigen::VectorXd& unit);

// Per-parameter unit coordinate of a value (inverse of decode; discrete and
// categorical values map to the centre of their bucket).
double unit_coordinate(const ParamDef& param, const ParamValue& value);
Eigen::VectorXd unit_coordinates(const HyperparameterSpace& space, std::span<const ParamValue> values);

// Model features: numeric params as unit coordinates, categoricals one-hot.
FeatureVector encode(const HyperparameterSpace& space, std::span<const ParamValue> values);
inline FeatureVector encode(const HyperparameterSpace& space, const Configuration& config) {
  return encode(space, config.values);
}

// Throws DomainError if `values` does not fit `space`.
void check_values(const HyperparameterSpace& space, std::span<const ParamValue> values);

}  // namespace deepbo

#endif  // DEEPBO_HPSPACE_HPP_
