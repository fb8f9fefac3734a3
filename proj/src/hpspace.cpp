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

#include "deepbo/hpspace.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "deepbo/common.hpp"

namespace deepbo {
namespace {

std::string describe(const ParamDef& p) { return "parameter '" + p.name + "'"; }

double as_number(const ParamDef& p, const ParamValue& v) {
  if (const double* x = std::get_if<double>(&v)) return *x;
  throw DomainError(describe(p) + " expects a numeric value");
}

const std::string& as_choice(const ParamDef& p, const ParamValue& v) {
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  throw DomainError(describe(p) + " expects a categorical value");
}

std::size_t choice_index(const ParamDef& p, const std::string& value) {
  const auto it = std::find(p.choices.begin(), p.choices.end(), value);
  if (it == p.choices.end()) throw DomainError(describe(p) + " has no choice '" + value + "'");
  return static_cast<std::size_t>(it - p.choices.begin());
}

// Bucket count and the (possibly log-warped) edges used by discrete params.
double discrete_lo_edge(const ParamDef& p) { return p.scale == Scale::kLog ? std::log(p.lo) : p.lo; }
double discrete_hi_edge(const ParamDef& p) {
  return p.scale == Scale::kLog ? std::log(p.hi + 1.0) : p.hi + 1.0;
}

}  // namespace

ParamDef ParamDef::continuous(std::string name, double lo, double hi, Scale scale) {
  ParamDef p{std::move(name), ParamKind::kContinuous, lo, hi, {}, scale};
  validate(p);
  return p;
}

ParamDef ParamDef::discrete(std::string name, double lo, double hi, Scale scale) {
  ParamDef p{std::move(name), ParamKind::kDiscrete, lo, hi, {}, scale};
  validate(p);
  return p;
}

ParamDef ParamDef::categorical(std::string name, std::vector<std::string> choices) {
  ParamDef p{std::move(name), ParamKind::kCategorical, 0.0, 0.0, std::move(choices), Scale::kLinear};
  validate(p);
  return p;
}

void validate(const ParamDef& p) {
  if (p.name.empty()) throw DomainError("parameter name must not be empty");
  if (p.is_numeric()) {
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo < p.hi)) {
      throw DomainError(describe(p) + " needs finite lo < hi");
    }
    if (p.scale == Scale::kLog && !(p.lo > 0.0)) throw DomainError(describe(p) + ": log scale needs lo > 0");
    if (p.kind == ParamKind::kDiscrete && (p.lo != std::floor(p.lo) || p.hi != std::floor(p.hi))) {
      throw DomainError(describe(p) + ": discrete bounds must be integers");
    }
  } else {
    if (p.choices.empty()) throw DomainError(describe(p) + ": categorical needs at least one choice");
    std::set<std::string> unique(p.choices.begin(), p.choices.end());
    if (unique.size() != p.choices.size()) throw DomainError(describe(p) + ": duplicate choices");
    if (p.scale == Scale::kLog) throw DomainError(describe(p) + ": log scale is numeric-only");
  }
}

HyperparameterSpace::HyperparameterSpace(std::vector<ParamDef> params) : params_(std::move(params)) {
  if (params_.empty()) throw DomainError("hyperparameter space needs at least one parameter");
  std::set<std::string> names;
  for (const ParamDef& p : params_) {
    validate(p);
    if (!names.insert(p.name).second) throw DomainError("duplicate parameter name '" + p.name + "'");
    feature_dimension_ += p.feature_width();
  }
}

bool HyperparameterSpace::operator==(const HyperparameterSpace& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const ParamDef& a = params_[i];
    const ParamDef& b = other.params_[i];
    if (a.name != b.name || a.kind != b.kind || a.scale != b.scale || a.choices != b.choices) return false;
    if (a.is_numeric() && (a.lo != b.lo || a.hi != b.hi)) return false;
  }
  return true;
}

std::vector<ParamValue> decode(const HyperparameterSpace& space, std::span<const double> unit) {
  if (unit.size() != space.dimension()) throw DomainError("decode: unit vector length does not match space");
  std::vector<ParamValue> values;
  values.reserve(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const ParamDef& p = space[i];
    const double u = unit[i];
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("decode: coordinate outside [0,1] for " + describe(p));
    switch (p.kind) {
      case ParamKind::kContinuous: {
        double x;
        if (p.scale == Scale::kLog) {
          x = std::exp(std::log(p.lo) + u * (std::log(p.hi) - std::log(p.lo)));
        } else {
          x = p.lo + u * (p.hi - p.lo);
        }
        values.emplace_back(std::clamp(x, p.lo, p.hi));
        break;
      }
      case ParamKind::kDiscrete: {
        const double lo = discrete_lo_edge(p);
        const double hi = discrete_hi_edge(p);
        double x = lo + u * (hi - lo);
        if (p.scale == Scale::kLog) x = std::exp(x);
        values.emplace_back(std::clamp(std::floor(x), p.lo, p.hi));
        break;
      }
      case ParamKind::kCategorical: {
        const std::size_t card = p.choices.size();
        const std::size_t k = std::min(static_cast<std::size_t>(std::floor(u * static_cast<double>(card))), card - 1);
        values.emplace_back(p.choices[k]);
        break;
      }
    }
  }
  return values;
}

std::vector<ParamValue> decode(const HyperparameterSpace& space, const Eigen::VectorXd& unit) {
  return decode(space, std::span<const double>(unit.data(), static_cast<std::size_t>(unit.size())));
}

double unit_coordinate(const ParamDef& p, const ParamValue& value) {
  switch (p.kind) {
    case ParamKind::kContinuous: {
      const double x = as_number(p, value);
      if (!(x >= p.lo && x <= p.hi)) throw DomainError(describe(p) + ": value outside range");
      if (p.scale == Scale::kLog) return (std::log(x) - std::log(p.lo)) / (std::log(p.hi) - std::log(p.lo));
      return (x - p.lo) / (p.hi - p.lo);
    }
    case ParamKind::kDiscrete: {
      const double x = as_number(p, value);
      if (!(x >= p.lo && x <= p.hi) || x != std::floor(x)) {
        throw DomainError(describe(p) + ": value outside integer range");
      }
      const double lo = discrete_lo_edge(p);
      const double hi = discrete_hi_edge(p);
      const double centre = p.scale == Scale::kLog ? 0.5 * (std::log(x) + std::log(x + 1.0)) : x + 0.5;
      return (centre - lo) / (hi - lo);
    }
    case ParamKind::kCategorical: {
      const double card = static_cast<double>(p.choices.size());
      return (static_cast<double>(choice_index(p, as_choice(p, value))) + 0.5) / card;
    }
  }
  return 0.0;
}

Eigen::VectorXd unit_coordinates(const HyperparameterSpace& space, std::span<const ParamValue> values) {
  check_values(space, values);
  Eigen::VectorXd u(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) u[static_cast<Eigen::Index>(i)] = unit_coordinate(space[i], values[i]);
  return u;
}

FeatureVector encode(const HyperparameterSpace& space, std::span<const ParamValue> values) {
  check_values(space, values);
  FeatureVector f = FeatureVector::Zero(static_cast<Eigen::Index>(space.feature_dimension()));
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const ParamDef& p = space[i];
    if (p.is_numeric()) {
      f[col++] = unit_coordinate(p, values[i]);
    } else {
      f[col + static_cast<Eigen::Index>(choice_index(p, as_choice(p, values[i])))] = 1.0;
      col += static_cast<Eigen::Index>(p.choices.size());
    }
  }
  return f;
}

void check_values(const HyperparameterSpace& space, std::span<const ParamValue> values) {
  if (values.size() != space.dimension()) throw DomainError("configuration has wrong number of values");
  for (std::size_t i = 0; i < values.size(); ++i) (void)unit_coordinate(space[i], values[i]);
}

}  // namespace deepbo
