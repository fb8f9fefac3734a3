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

#ifndef DEEPBO_SURROGATE_HPP_
#define DEEPBO_SURROGATE_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace deepbo {

// Posterior (or forest) prediction at one point.
struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

// ARD Matern 5/2: amplitude * (1 + sqrt(5) r + 5 r^2 / 3) * exp(-sqrt(5) r),
// r = || (x1 - x2) / lengthscales ||.
template <typename DerivedA, typename DerivedB, typename DerivedL>
typename DerivedA::Scalar matern52(const Eigen::MatrixBase<DerivedA>& x1, const Eigen::MatrixBase<DerivedB>& x2,
                                   const Eigen::MatrixBase<DerivedL>& lengthscales,
                                   typename DerivedA::Scalar amplitude) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar r = ((x1 - x2).array() / lengthscales.array()).matrix().norm();
  const Scalar s5r = std::sqrt(Scalar(5)) * r;
  return amplitude * (Scalar(1) + s5r + Scalar(5) / Scalar(3) * r * r) * std::exp(-s5r);
}

// Cross-covariance between the rows of `a` and the rows of `b`.
template <typename DerivedA, typename DerivedB, typename DerivedL>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> matern52_cross(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
    const Eigen::MatrixBase<DerivedL>& lengthscales, typename DerivedA::Scalar amplitude) {
  using Scalar = typename DerivedA::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto inv = lengthscales.array().inverse().matrix().asDiagonal();
  const Matrix sa = a * inv;
  const Matrix sb = b * inv;
  const auto na = sa.rowwise().squaredNorm();
  const auto nb = sb.rowwise().squaredNorm();
  Matrix r2 = (-2.0 * sa * sb.transpose()).colwise() + na;
  r2.rowwise() += nb.transpose();
  const auto r = r2.array().max(Scalar(0)).sqrt();
  const auto s5r = std::sqrt(Scalar(5)) * r;
  return (amplitude * (Scalar(1) + s5r + Scalar(5) / Scalar(3) * r * r) * (-s5r).exp()).matrix();
}

template <typename DerivedX, typename DerivedL>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, Eigen::Dynamic> matern52_gram(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedL>& lengthscales,
    typename DerivedX::Scalar amplitude) {
  auto k = matern52_cross(x, x, lengthscales, amplitude);
  // The norm expansion is not bitwise symmetric; mirror the upper triangle.
  k.template triangularView<Eigen::StrictlyLower>() = k.transpose();
  k.diagonal().setConstant(amplitude);
  return k;
}

// One set of GP hyperparameters.
struct GpHyper {
  double amplitude = 1.0;
  Eigen::VectorXd lengthscales;
  double noise = 1e-4;
};

// Log-normal priors, given as medians and log-space standard deviations.
// Zero medians for amplitude/noise mean "derive from var(y)".
struct GpPrior {
  double lengthscale_median = 0.3;
  double amplitude_median = 0.0;
  double noise_median = 0.0;
  double log_sd = 1.0;
  int burn_in = 50;
  int thinning = 10;
};

class GpModel {
 public:
  struct Sample {
    GpHyper hyper;
    Eigen::MatrixXd chol;      // lower factor of K + (noise + jitter) I
    Eigen::VectorXd weights;   // (K + noise I)^-1 (y - prior_mean)
    double jitter = 0.0;
  };

  const Eigen::MatrixXd& train_x() const { return x_; }
  const Eigen::VectorXd& train_y() const { return y_; }
  double prior_mean() const { return prior_mean_; }
  const std::vector<Sample>& samples() const { return samples_; }

  // One prediction per hyper-sample.
  std::vector<Prediction> predict(const Eigen::VectorXd& x) const;
  // Rows of `candidates` are points; result is [candidate][sample].
  std::vector<std::vector<Prediction>> predict_batch(const Eigen::MatrixXd& candidates) const;

  // Conditions on fixed hyperparameters.
  static GpModel condition(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<GpHyper> hypers);

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  double prior_mean_ = 0.0;
  std::vector<Sample> samples_;

  friend GpModel fit_gp(const Eigen::MatrixXd&, const Eigen::VectorXd&, std::size_t, std::uint64_t, const GpPrior&);
};

// Factorizes K(X,X) + noise I, escalating jitter from 1e-8 to 1e-4 times the
// amplitude. Throws SingularKernelError if every level fails.
GpModel::Sample factorize(const Eigen::MatrixXd& x, const Eigen::VectorXd& centred_y, const GpHyper& hyper);

// Draws `samples` hyperparameter sets by random-walk Metropolis over
// log-hyperparameters and conditions a GP on each. Rows of `x` are points.
GpModel fit_gp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t samples, std::uint64_t seed,
               const GpPrior& prior = {});

inline std::vector<Prediction> gp_predict(const GpModel& model, const Eigen::VectorXd& x) {
  return model.predict(x);
}

struct ForestOptions {
  int trees = 50;
  int min_split = 2;
  bool bootstrap = true;
};

// Regression forest; prediction variance is the spread across trees.
class RfModel {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    int count = 0;
  };
  using Tree = std::vector<Node>;

  const std::vector<Tree>& trees() const { return trees_; }
  const ForestOptions& options() const { return options_; }

  double predict_tree(std::size_t t, const Eigen::VectorXd& x) const;
  Prediction predict(const Eigen::VectorXd& x) const;

 private:
  std::vector<Tree> trees_;
  ForestOptions options_;

  friend RfModel fit_rf(const Eigen::MatrixXd&, const Eigen::VectorXd&, std::uint64_t, const ForestOptions&);
};

RfModel fit_rf(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::uint64_t seed,
               const ForestOptions& options = {});

inline Prediction rf_predict(const RfModel& model, const Eigen::VectorXd& x) { return model.predict(x); }

}  // namespace deepbo

#endif  // DEEPBO_SURROGATE_HPP_
