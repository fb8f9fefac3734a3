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
#include <limits>
#include <numbers>

#include "deepbo/common.hpp"
#include "deepbo/surrogate.hpp"

namespace deepbo {
namespace {

constexpr double kJitterStart = 1e-8;
constexpr double kJitterMax = 1e-4;
constexpr double kPivotFloor = 1e-10;

// Log-space parameter vector layout: [log amplitude, log lengthscales..., log noise].
struct Packing {
  Eigen::Index dims;

  Eigen::Index size() const { return dims + 2; }

  Eigen::VectorXd pack(const GpHyper& h) const {
    Eigen::VectorXd theta(size());
    theta[0] = std::log(h.amplitude);
    theta.segment(1, dims) = h.lengthscales.array().log().matrix();
    theta[dims + 1] = std::log(h.noise);
    return theta;
  }

  GpHyper unpack(const Eigen::VectorXd& theta) const {
    GpHyper h;
    h.amplitude = std::exp(theta[0]);
    h.lengthscales = theta.segment(1, dims).array().exp().matrix();
    h.noise = std::exp(theta[dims + 1]);
    return h;
  }
};

struct LogPosterior {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& centred_y;
  Packing packing;
  Eigen::VectorXd prior_mean;  // log-space medians
  double log_sd;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  double operator()(const Eigen::VectorXd& theta) const {
    if ((theta.array() < lower.array()).any() || (theta.array() > upper.array()).any()) {
      return -std::numeric_limits<double>::infinity();
    }
    const double log_prior = -0.5 * ((theta - prior_mean) / log_sd).squaredNorm();
    try {
      const GpModel::Sample s = factorize(x, centred_y, packing.unpack(theta));
      const double n = static_cast<double>(centred_y.size());
      const double log_det = s.chol.diagonal().array().log().sum();
      const double fit = centred_y.dot(s.weights);
      return log_prior - 0.5 * fit - log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
    } catch (const SingularKernelError&) {
      return -std::numeric_limits<double>::infinity();
    }
  }
};

}  // namespace

GpModel::Sample factorize(const Eigen::MatrixXd& x, const Eigen::VectorXd& centred_y, const GpHyper& hyper) {
  if (!(hyper.amplitude > 0.0) || !(hyper.noise > 0.0) || (hyper.lengthscales.array() <= 0.0).any()) {
    throw DomainError("GP hyperparameters must be positive");
  }
  if (hyper.lengthscales.size() != x.cols()) throw DomainError("GP lengthscale count does not match features");
  Eigen::MatrixXd k = matern52_gram(x, hyper.lengthscales, hyper.amplitude);
  k.diagonal().array() += hyper.noise;

  GpModel::Sample s;
  s.hyper = hyper;
  double jitter = 0.0;
  for (;;) {
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    // A factor with vanishing pivots "succeeds" but solves garbage.
    if (llt.info() == Eigen::Success && llt.matrixLLT().allFinite() &&
        llt.matrixLLT().diagonal().array().square().minCoeff() >= kPivotFloor * hyper.amplitude) {
      s.chol = llt.matrixL();
      s.weights = llt.solve(centred_y);
      s.jitter = jitter;
      return s;
    }
    const double next = jitter == 0.0 ? kJitterStart * hyper.amplitude : jitter * 10.0;
    if (next > kJitterMax * hyper.amplitude * (1.0 + 1e-9)) break;
    k.diagonal().array() += next - jitter;
    jitter = next;
  }
  throw SingularKernelError("Cholesky failed after jitter escalation to 1e-4 * amplitude");
}

GpModel GpModel::condition(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<GpHyper> hypers) {
  if (x.rows() < 1 || x.rows() != y.size()) throw DomainError("GP training data shape mismatch");
  if (hypers.empty()) throw DomainError("GP needs at least one hyper-sample");
  GpModel m;
  m.x_ = x;
  m.y_ = y;
  m.prior_mean_ = y.mean();
  const Eigen::VectorXd centred = y.array() - m.prior_mean_;
  for (const GpHyper& h : hypers) m.samples_.push_back(factorize(x, centred, h));
  return m;
}

GpModel fit_gp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t samples, std::uint64_t seed,
               const GpPrior& prior) {
  if (x.rows() < 2) throw DomainError("fit_gp: need at least 2 training points");
  if (x.rows() != y.size()) throw DomainError("fit_gp: X and y disagree on the number of points");
  if (!y.allFinite() || !x.allFinite()) throw DomainError("fit_gp: training data must be finite");
  if (samples < 1) throw DomainError("fit_gp: need at least one hyper-sample");

  const double mean = y.mean();
  const Eigen::VectorXd centred = y.array() - mean;
  const double var = std::max(centred.squaredNorm() / static_cast<double>(y.size()), 1e-6);
  const double amp_median = prior.amplitude_median > 0.0 ? prior.amplitude_median : var;
  const double noise_median = prior.noise_median > 0.0 ? prior.noise_median : 1e-4 * var;

  const Packing packing{x.cols()};
  GpHyper median;
  median.amplitude = amp_median;
  median.lengthscales = Eigen::VectorXd::Constant(x.cols(), prior.lengthscale_median);
  median.noise = noise_median;

  LogPosterior target{x, centred, packing, packing.pack(median), prior.log_sd, {}, {}};
  target.lower = target.prior_mean.array() - 4.0 * prior.log_sd;
  target.upper = target.prior_mean.array() + 4.0 * prior.log_sd;

  // Start from the best shared lengthscale on a coarse grid around the median.
  Eigen::VectorXd theta = target.prior_mean;
  double log_p = target(theta);
  for (double factor : {0.25, 0.5, 2.0, 4.0}) {
    Eigen::VectorXd cand = target.prior_mean;
    cand.segment(1, x.cols()).array() += std::log(factor);
    const double lp = target(cand);
    if (lp > log_p) {
      theta = cand;
      log_p = lp;
    }
  }
  if (!std::isfinite(log_p)) {
    // Even the prior median is singular; the jitter path has been exhausted.
    throw SingularKernelError("fit_gp: kernel matrix singular at every starting point");
  }

  Rng rng(seed);
  double step = 0.5 / std::sqrt(static_cast<double>(packing.size()));
  auto metropolis_step = [&](bool adapt) {
    Eigen::VectorXd proposal(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) proposal[i] = theta[i] + step * rng.normal();
    const double lp = target(proposal);
    const bool accept = std::log(rng.uniform() + 1e-300) < lp - log_p;
    if (accept) {
      theta = proposal;
      log_p = lp;
    }
    if (adapt) step *= accept ? 1.1 : 0.95;
  };

  for (int i = 0; i < prior.burn_in; ++i) metropolis_step(true);
  std::vector<GpHyper> hypers;
  hypers.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < std::max(prior.thinning, 1); ++i) metropolis_step(false);
    hypers.push_back(packing.unpack(theta));
  }
  return GpModel::condition(x, y, std::move(hypers));
}

std::vector<Prediction> GpModel::predict(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd row = x.transpose();
  return predict_batch(row).front();
}

std::vector<std::vector<Prediction>> GpModel::predict_batch(const Eigen::MatrixXd& candidates) const {
  const auto n = static_cast<std::size_t>(candidates.rows());
  std::vector<std::vector<Prediction>> out(n, std::vector<Prediction>(samples_.size()));
  for (std::size_t s = 0; s < samples_.size(); ++s) {
    const Sample& smp = samples_[s];
    const Eigen::MatrixXd cross = matern52_cross(x_, candidates, smp.hyper.lengthscales, smp.hyper.amplitude);
    const Eigen::VectorXd mean = (cross.transpose() * smp.weights).array() + prior_mean_;
    const Eigen::MatrixXd v = smp.chol.triangularView<Eigen::Lower>().solve(cross);
    const Eigen::VectorXd reduction = v.colwise().squaredNorm().transpose();
    for (std::size_t c = 0; c < n; ++c) {
      const auto ci = static_cast<Eigen::Index>(c);
      out[c][s] = {mean[ci], std::max(smp.hyper.amplitude - reduction[ci], 0.0)};
    }
  }
  return out;
}

}  // namespace deepbo
