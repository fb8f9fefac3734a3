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

#include "deepbo/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "deepbo/common.hpp"
#include "deepbo/io.hpp"

namespace deepbo {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

SurrogateTable::SurrogateTable(HyperparameterSpace space, int max_epoch, std::vector<TableEntry> entries)
    : space_(std::move(space)), max_epoch_(max_epoch), entries_(std::move(entries)) {
  if (space_.dimension() == 0) throw DomainError("table space is empty");
  if (max_epoch_ < 1) throw DomainError("max_epoch must be >= 1");
  if (entries_.size() < kMinEntries) {
    throw DomainError("need >= " + std::to_string(kMinEntries) + " entries, found " +
                      std::to_string(entries_.size()));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    TableEntry& e = entries_[i];
    const std::string where = "entry " + std::to_string(i);
    if (e.config.id != static_cast<int>(i)) throw DomainError(where + ": ids must be contiguous from 0");
    check_values(space_, e.config.values);
    const LearningCurve& c = e.curve;
    if (c.accuracy.size() != static_cast<std::size_t>(max_epoch_) ||
        c.epoch_seconds.size() != static_cast<std::size_t>(max_epoch_)) {
      throw DomainError(where + ": curve length differs from max_epoch " + std::to_string(max_epoch_));
    }
    for (double a : c.accuracy) {
      if (!(a >= 0.0 && a <= 1.0)) throw DomainError(where + ": accuracy outside [0,1]");
    }
    for (double t : c.epoch_seconds) {
      if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(where + ": epoch_seconds must be positive");
    }
    e.terminal_best = *std::max_element(c.accuracy.begin(), c.accuracy.end());
  }
  by_rank_.resize(entries_.size());
  std::iota(by_rank_.begin(), by_rank_.end(), 0);
  std::stable_sort(by_rank_.begin(), by_rank_.end(), [this](int a, int b) {
    return entries_[static_cast<std::size_t>(a)].terminal_best > entries_[static_cast<std::size_t>(b)].terminal_best;
  });
  rank_of_.resize(entries_.size());
  for (std::size_t r = 0; r < by_rank_.size(); ++r) rank_of_[static_cast<std::size_t>(by_rank_[r])] = r + 1;
}

const TableEntry& SurrogateTable::at(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= entries_.size()) {
    throw LookupError("unknown configuration id " + std::to_string(id));
  }
  return entries_[static_cast<std::size_t>(id)];
}

std::size_t SurrogateTable::rank(int id) const {
  (void)at(id);
  return rank_of_[static_cast<std::size_t>(id)];
}

namespace {

const char* kind_name(ParamKind k) {
  switch (k) {
    case ParamKind::kContinuous: return "continuous";
    case ParamKind::kDiscrete: return "discrete";
    case ParamKind::kCategorical: return "categorical";
  }
  return "";
}

ordered_json param_to_json(const ParamDef& p) {
  ordered_json j;
  j["name"] = p.name;
  j["kind"] = kind_name(p.kind);
  if (p.is_numeric()) {
    j["range"] = {p.lo, p.hi};
    j["scale"] = p.scale == Scale::kLog ? "log" : "linear";
  } else {
    j["range"] = p.choices;
  }
  return j;
}

ordered_json value_to_json(const ParamDef& p, const ParamValue& v) {
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  const double x = std::get<double>(v);
  if (p.kind == ParamKind::kDiscrete) return static_cast<long long>(x);
  return x;
}

}  // namespace

ParamDef param_from_json(const json& j) {
  const std::string name = j.at("name").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  const std::string scale_name = j.value("scale", std::string("linear"));
  if (scale_name != "linear" && scale_name != "log") throw DomainError("unknown scale '" + scale_name + "'");
  const Scale scale = scale_name == "log" ? Scale::kLog : Scale::kLinear;
  const json& range = j.at("range");
  if (kind == "categorical") return ParamDef::categorical(name, range.get<std::vector<std::string>>());
  if (!range.is_array() || range.size() != 2) throw DomainError("parameter '" + name + "': range must be [lo, hi]");
  const double lo = range[0].get<double>();
  const double hi = range[1].get<double>();
  if (kind == "continuous") return ParamDef::continuous(name, lo, hi, scale);
  if (kind == "discrete") return ParamDef::discrete(name, lo, hi, scale);
  throw DomainError("parameter '" + name + "': unknown kind '" + kind + "'");
}

ordered_json space_to_json(const HyperparameterSpace& space) {
  ordered_json arr = ordered_json::array();
  for (const ParamDef& p : space.params()) arr.push_back(param_to_json(p));
  return arr;
}

HyperparameterSpace space_from_json(const json& arr) {
  if (!arr.is_array()) throw DomainError("space must be an array of parameter definitions");
  std::vector<ParamDef> params;
  for (const json& p : arr) params.push_back(param_from_json(p));
  return HyperparameterSpace(std::move(params));
}

SurrogateTable read_table(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  HyperparameterSpace space;
  int max_epoch = 0;
  std::vector<TableEntry> entries;
  std::vector<std::size_t> entry_line;
  std::set<int> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw DomainError("record must be a JSON object");
      if (!have_header) {
        space = space_from_json(j.at("space"));
        max_epoch = j.at("max_epoch").get<int>();
        if (max_epoch < 1) throw DomainError("max_epoch must be >= 1");
        have_header = true;
        continue;
      }
      TableEntry e;
      e.config.id = j.at("id").get<int>();
      if (!seen.insert(e.config.id).second) throw DomainError("duplicate id " + std::to_string(e.config.id));
      const json& params = j.at("params");
      if (!params.is_object() || params.size() != space.dimension()) {
        throw DomainError("params must name every parameter exactly once");
      }
      for (const ParamDef& p : space.params()) {
        const json& v = params.at(p.name);
        if (p.is_numeric()) {
          e.config.values.emplace_back(v.get<double>());
        } else {
          e.config.values.emplace_back(v.get<std::string>());
        }
      }
      check_values(space, e.config.values);
      e.curve.accuracy = j.at("accuracy").get<std::vector<double>>();
      e.curve.epoch_seconds = j.at("epoch_seconds").get<std::vector<double>>();
      if (e.curve.accuracy.size() != static_cast<std::size_t>(max_epoch) ||
          e.curve.epoch_seconds.size() != static_cast<std::size_t>(max_epoch)) {
        throw DomainError("curve length " + std::to_string(e.curve.accuracy.size()) + " does not match max_epoch " +
                          std::to_string(max_epoch));
      }
      entries.push_back(std::move(e));
      entry_line.push_back(line_no);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ParseError(line_no, ex.what());
    }
  }
  if (!have_header || entries.size() < SurrogateTable::kMinEntries) {
    throw ParseError(0, "need >= " + std::to_string(SurrogateTable::kMinEntries) + " entries, found " +
                            std::to_string(entries.size()));
  }
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return entries[a].config.id < entries[b].config.id; });
  std::vector<TableEntry> sorted;
  sorted.reserve(entries.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    TableEntry& e = entries[order[r]];
    if (e.config.id != static_cast<int>(r)) {
      throw ParseError(entry_line[order[r]], "ids must be contiguous from 0 (expected " + std::to_string(r) + ")");
    }
    sorted.push_back(std::move(e));
  }
  try {
    return SurrogateTable(std::move(space), max_epoch, std::move(sorted));
  } catch (const DomainError& ex) {
    throw ParseError(0, ex.what());
  }
}

SurrogateTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open table file " + path.string());
  return read_table(in);
}

void write_table(const SurrogateTable& table, std::ostream& out) {
  ordered_json header;
  header["space"] = space_to_json(table.space());
  header["max_epoch"] = table.max_epoch();
  out << header.dump() << '\n';
  for (const TableEntry& e : table.entries()) {
    ordered_json row;
    row["id"] = e.config.id;
    ordered_json params = ordered_json::object();
    for (std::size_t i = 0; i < table.space().dimension(); ++i) {
      const ParamDef& p = table.space()[i];
      params[p.name] = value_to_json(p, e.config.values[i]);
    }
    row["params"] = std::move(params);
    row["accuracy"] = e.curve.accuracy;
    row["epoch_seconds"] = e.curve.epoch_seconds;
    out << row.dump() << '\n';
  }
}

void write_table(const SurrogateTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write table file " + path.string());
  write_table(table, out);
  if (!out) throw Error("failed writing table file " + path.string());
}

namespace {

// Smooth multimodal landscape over unit coordinates: a sum of anisotropic
// Gaussian bumps plus a broad quadratic bowl around the dominant bump.
class Landscape {
 public:
  Landscape(std::size_t d, int modes, Rng& rng) : relevance_(static_cast<Eigen::Index>(d)) {
    // Log-uniform relevance: as in real tuning problems, only a few axes matter much.
    for (Eigen::Index j = 0; j < relevance_.size(); ++j) relevance_[j] = std::exp(rng.uniform(std::log(0.02), 0.0));
    for (int k = 0; k < std::max(modes, 1); ++k) {
      Eigen::VectorXd c(static_cast<Eigen::Index>(d));
      for (Eigen::Index j = 0; j < c.size(); ++j) c[j] = rng.uniform();
      centres_.push_back(std::move(c));
      widths_.push_back(rng.uniform(0.2, 0.35));
      weights_.push_back(k == 0 ? 1.0 : rng.uniform(0.4, 0.8));
    }
  }

  double operator()(const Eigen::VectorXd& z) const {
    double f = 0.0;
    for (std::size_t k = 0; k < centres_.size(); ++k) {
      const double dist2 = (relevance_.array() * (z - centres_[k]).array().square()).sum();
      f += weights_[k] * std::exp(-dist2 / (2.0 * widths_[k] * widths_[k]));
    }
    const double bowl = (relevance_.array() * (z - centres_[0]).array().square()).sum() / relevance_.sum();
    return f + 0.3 * (1.0 - bowl);
  }

 private:
  Eigen::VectorXd relevance_;
  std::vector<Eigen::VectorXd> centres_;
  std::vector<double> widths_;
  std::vector<double> weights_;
};

}  // namespace

SurrogateTable generate_synthetic(const HyperparameterSpace& space, std::size_t n, std::uint64_t seed,
                                  const CurveModel& m) {
  if (n < SurrogateTable::kMinEntries) {
    throw DomainError("generate_synthetic: need n >= " + std::to_string(SurrogateTable::kMinEntries));
  }
  if (m.max_epoch < 1) throw DomainError("generate_synthetic: max_epoch must be >= 1");
  if (!(m.accuracy_lo >= 0.0 && m.accuracy_lo <= m.accuracy_hi && m.accuracy_hi < 1.0)) {
    throw DomainError("generate_synthetic: need 0 <= accuracy_lo <= accuracy_hi < 1");
  }
  if (!(m.lambda_min > 0.0 && m.lambda_min <= m.lambda_max)) {
    throw DomainError("generate_synthetic: need 0 < lambda_min <= lambda_max");
  }
  if (!(m.noise_sd >= 0.0)) throw DomainError("generate_synthetic: noise_sd must be >= 0");
  if (!(m.late_bloomer_fraction >= 0.0 && m.late_bloomer_fraction <= 1.0)) {
    throw DomainError("generate_synthetic: late_bloomer_fraction must lie in [0,1]");
  }
  if (!(m.epoch_seconds_min > 0.0 && m.epoch_seconds_min <= m.epoch_seconds_max)) {
    throw DomainError("generate_synthetic: need 0 < epoch_seconds_min <= epoch_seconds_max");
  }

  Rng landscape_rng(mix_seed(seed, 0));
  const Landscape landscape(space.dimension(), m.modes, landscape_rng);
  const std::vector<Eigen::VectorXd> points = sobol_points(space.dimension(), n, 1);

  std::vector<TableEntry> entries(n);
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    entries[i].config.id = static_cast<int>(i);
    entries[i].config.values = decode(space, points[i]);
    raw[i] = landscape(unit_coordinates(space, entries[i].config.values));
  }
  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double raw_lo = *lo_it;
  const double raw_span = *hi_it - raw_lo;

  const int E = m.max_epoch;
  const int suppressed = E / 4;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(mix_seed(seed, i + 1));
    const double r = raw_span > 0.0 ? (raw[i] - raw_lo) / raw_span : 0.5;
    const double y_inf = m.accuracy_lo + (m.accuracy_hi - m.accuracy_lo) * r;
    const double lambda = std::exp(rng.uniform(std::log(m.lambda_min), std::log(m.lambda_max)));
    const bool late = rng.uniform() < m.late_bloomer_fraction;
    const double base_seconds = rng.uniform(m.epoch_seconds_min, m.epoch_seconds_max);

    LearningCurve& c = entries[i].curve;
    c.accuracy.resize(static_cast<std::size_t>(E));
    c.epoch_seconds.resize(static_cast<std::size_t>(E));
    for (int j = 1; j <= E; ++j) {
      const double noise = m.noise_sd * rng.normal();
      double a = y_inf * (1.0 - std::exp(-j / lambda)) + noise;
      if (late && j <= suppressed) a = std::min(a - noise, m.floor) - std::abs(noise);
      c.accuracy[static_cast<std::size_t>(j - 1)] = std::clamp(a, 0.0, 0.999);
      c.epoch_seconds[static_cast<std::size_t>(j - 1)] = base_seconds * rng.uniform(0.95, 1.05);
    }
  }
  return SurrogateTable(space, E, std::move(entries));
}

double target_accuracy(const SurrogateTable& table, std::size_t k) {
  if (k < 1 || k > table.size()) throw DomainError("target_accuracy: k must lie in [1, table size]");
  return table.at(table.ids_by_rank()[k - 1]).terminal_best;
}

double rank_regret(const SurrogateTable& table, int id) {
  return static_cast<double>(table.rank(id) - 1) / static_cast<double>(table.size());
}

double best_until(const SurrogateTable& table, int id, int epoch) {
  const TableEntry& e = table.at(id);
  if (epoch < 1 || epoch > table.max_epoch()) throw DomainError("best_until: epoch out of range");
  return *std::max_element(e.curve.accuracy.begin(), e.curve.accuracy.begin() + epoch);
}

HyperparameterSpace convnet_space() {
  return HyperparameterSpace({
      ParamDef::discrete("conv1_kernels", 1, 350),
      ParamDef::discrete("conv2_kernels", 1, 350),
      ParamDef::discrete("fc_neurons", 1, 1024),
      ParamDef::continuous("learning_rate", 1e-4, 0.4, Scale::kLog),
      ParamDef::continuous("l2_factor", 0.0, 1.0),
      ParamDef::continuous("dropout", 0.0, 0.9),
      ParamDef::categorical("activation", {"relu", "tanh", "sigmoid", "elu", "leaky_relu"}),
      ParamDef::categorical("optimizer", {"adadelta", "adagrad", "adam", "gd", "momentum", "rmsprop"}),
  });
}

}  // namespace deepbo
