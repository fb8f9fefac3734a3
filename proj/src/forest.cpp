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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deepbo/common.hpp"
#include "deepbo/surrogate.hpp"

namespace deepbo {
namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int min_split, Rng& rng)
      : x_(x), y_(y), min_split_(min_split), rng_(rng),
        tries_(static_cast<int>(std::ceil(static_cast<double>(x.cols()) / 3.0))) {}

  RfModel::Tree build(std::vector<int> rows) {
    tree_.clear();
    grow(rows);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<int>& rows) {
    const int index = static_cast<int>(tree_.size());
    tree_.emplace_back();
    double sum = 0.0;
    for (int r : rows) sum += y_[r];
    tree_[index].value = sum / static_cast<double>(rows.size());
    tree_[index].count = static_cast<int>(rows.size());

    if (static_cast<int>(rows.size()) < min_split_) return index;
    const bool pure = std::all_of(rows.begin(), rows.end(), [&](int r) { return y_[r] == y_[rows.front()]; });
    if (pure) return index;
    const SplitChoice split = find_split(rows);
    if (split.feature < 0) return index;

    std::vector<int> left;
    std::vector<int> right;
    for (int r : rows) (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree_[index].feature = split.feature;
    tree_[index].threshold = split.threshold;
    const int l = grow(left);
    tree_[index].left = l;
    const int r = grow(right);
    tree_[index].right = r;
    return index;
  }

  // Samples ceil(D/3) candidate features; falls through to the remaining
  // features only when none of the sampled ones can separate the rows.
  SplitChoice find_split(const std::vector<int>& rows) {
    std::vector<int> features(static_cast<std::size_t>(x_.cols()));
    std::iota(features.begin(), features.end(), 0);
    for (std::size_t i = features.size(); i > 1; --i) {
      std::swap(features[i - 1], features[rng_.below(i)]);
    }
    SplitChoice best;
    for (std::size_t k = 0; k < features.size(); ++k) {
      if (static_cast<int>(k) >= tries_ && best.feature >= 0) break;
      consider(rows, features[k], best);
    }
    return best;
  }

  void consider(const std::vector<int>& rows, int feature, SplitChoice& best) const {
    std::vector<int> order = rows;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double xa = x_(a, feature);
      const double xb = x_(b, feature);
      return xa < xb || (xa == xb && a < b);
    });
    const double n = static_cast<double>(order.size());
    double total = 0.0;
    for (int r : order) total += y_[r];
    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      left_sum += y_[order[i]];
      const double lo = x_(order[i], feature);
      const double hi = x_(order[i + 1], feature);
      if (!(lo < hi)) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = n - nl;
      const double right_sum = total - left_sum;
      // SSE reduction relative to the parent.
      const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - total * total / n;
      if (gain > best.gain + 1e-12 * std::abs(total * total / n) || (best.feature < 0 && gain >= 0.0)) {
        best.feature = feature;
        best.threshold = 0.5 * (lo + hi);
        best.gain = gain;
      }
    }
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  int min_split_;
  Rng& rng_;
  int tries_;
  RfModel::Tree tree_;
};

}  // namespace

RfModel fit_rf(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::uint64_t seed, const ForestOptions& options) {
  if (x.rows() < 2) throw DomainError("fit_rf: need at least 2 training points");
  if (x.rows() != y.size()) throw DomainError("fit_rf: X and y disagree on the number of points");
  if (options.trees < 1 || options.min_split < 2) throw DomainError("fit_rf: need trees >= 1 and min_split >= 2");

  RfModel model;
  model.options_ = options;
  const auto n = static_cast<int>(x.rows());
  for (int t = 0; t < options.trees; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<int> rows(static_cast<std::size_t>(n));
    if (options.bootstrap) {
      for (int& r : rows) r = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    TreeBuilder builder(x, y, options.min_split, rng);
    model.trees_.push_back(builder.build(std::move(rows)));
  }
  return model;
}

double RfModel::predict_tree(std::size_t t, const Eigen::VectorXd& x) const {
  const Tree& tree = trees_.at(t);
  int node = 0;
  while (tree[static_cast<std::size_t>(node)].feature >= 0) {
    const Node& nd = tree[static_cast<std::size_t>(node)];
    node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
  return tree[static_cast<std::size_t>(node)].value;
}

Prediction RfModel::predict(const Eigen::VectorXd& x) const {
  Eigen::VectorXd values(static_cast<Eigen::Index>(trees_.size()));
  for (std::size_t t = 0; t < trees_.size(); ++t) values[static_cast<Eigen::Index>(t)] = predict_tree(t, x);
  const double mean = values.mean();
  return {mean, (values.array() - mean).square().mean()};
}

}  // namespace deepbo
