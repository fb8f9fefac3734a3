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

#include <doctest.h>

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "deepbo/common.hpp"
#include "deepbo/surrogate.hpp"

using namespace deepbo;

namespace {

Eigen::MatrixXd random_points(Rng& rng, int n, int d) {
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.uniform();
  return x;
}

Eigen::VectorXd smooth_targets(const Eigen::MatrixXd& x) {
  Eigen::VectorXd y(x.rows());
  for (int i = 0; i < x.rows(); ++i) y[i] = std::sin(3.0 * x(i, 0)) + 0.5 * x.row(i).squaredNorm();
  return y;
}

GpHyper hyper(int d, double amplitude, double lengthscale, double noise) {
  GpHyper h;
  h.amplitude = amplitude;
  h.lengthscales = Eigen::VectorXd::Constant(d, lengthscale);
  h.noise = noise;
  return h;
}

}  // namespace

TEST_CASE("matern52: worked values and symmetry") {
  const Eigen::Vector2d a(0.1, 0.7), b(0.4, 0.2), ls(0.5, 2.0);
  CHECK(matern52(a, a, ls, 1.7) == 1.7);
  // (1 + sqrt5 + 5/3) exp(-sqrt5), evaluated at 30 digits.
  const Eigen::Matrix<double, 1, 1> z(0.0), one(1.0), l1(1.0);
  CHECK(std::abs(matern52(z, one, l1, 1.0) - 0.523994108831820) < 1e-14);
  CHECK(matern52(a, b, ls, 1.0) == doctest::Approx(matern52(b, a, ls, 1.0)).epsilon(1e-15));
  // Cross matrix agrees with the pointwise form.
  Rng rng(1);
  const Eigen::MatrixXd p = random_points(rng, 6, 3), q = random_points(rng, 4, 3);
  const Eigen::Vector3d l3(0.3, 0.6, 1.2);
  const Eigen::MatrixXd k = matern52_cross(p, q, l3, 2.0);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(k(i, j) == doctest::Approx(matern52(p.row(i).transpose(), q.row(j).transpose(), l3, 2.0)).epsilon(1e-12));
}

TEST_CASE("property: Gram matrices are symmetric positive semidefinite") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = random_points(rng, 20, 4);
    Eigen::VectorXd ls(4);
    for (int j = 0; j < 4; ++j) ls[j] = rng.uniform(0.05, 3.0);
    const double amp = rng.uniform(0.1, 5.0);
    const Eigen::MatrixXd k = matern52_gram(x, ls, amp);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * amp);
  }
}

TEST_CASE("gp: interpolates training points with tiny noise") {
  Rng rng(3);
  const Eigen::MatrixXd x = random_points(rng, 8, 3);
  const Eigen::VectorXd y = smooth_targets(x);
  const GpModel m = GpModel::condition(x, y, {hyper(3, 1.0, 0.5, 1e-8)});
  for (int i = 0; i < 8; ++i) {
    const Prediction p = m.predict(x.row(i).transpose())[0];
    CHECK(std::abs(p.mean - y[i]) < 1e-6);
    CHECK(p.variance < 1e-4);
    CHECK(p.variance >= 0.0);
  }
}

TEST_CASE("gp: far from the data the prior takes over") {
  Rng rng(4);
  const Eigen::MatrixXd x = random_points(rng, 8, 2);
  const Eigen::VectorXd y = smooth_targets(x);
  const GpModel m = GpModel::condition(x, y, {hyper(2, 0.7, 0.1, 1e-6)});
  const Prediction p = m.predict(Eigen::Vector2d(50.0, -50.0))[0];
  CHECK(p.mean == doctest::Approx(y.mean()).epsilon(1e-9));
  CHECK(p.variance == doctest::Approx(0.7).epsilon(0.01));
}

TEST_CASE("gp: scaling amplitude and noise together scales only the variance") {
  Rng rng(5);
  const Eigen::MatrixXd x = random_points(rng, 10, 3);
  const Eigen::VectorXd y = smooth_targets(x);
  const double c = 3.5;
  const GpModel a = GpModel::condition(x, y, {hyper(3, 1.0, 0.4, 1e-3)});
  const GpModel b = GpModel::condition(x, y, {hyper(3, c, 0.4, c * 1e-3)});
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd q = random_points(rng, 1, 3).row(0).transpose();
    const Prediction pa = a.predict(q)[0], pb = b.predict(q)[0];
    CHECK(pb.mean == doctest::Approx(pa.mean).epsilon(1e-9));
    CHECK(pb.variance == doctest::Approx(c * pa.variance).epsilon(1e-7));
  }
}

TEST_CASE("property: GP mean is invariant to the order of training rows") {
  Rng rng(6);
  const Eigen::MatrixXd x = random_points(rng, 12, 3);
  const Eigen::VectorXd y = smooth_targets(x);
  std::vector<int> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[2], perm[7]);
  Eigen::MatrixXd xp(12, 3);
  Eigen::VectorXd yp(12);
  for (int i = 0; i < 12; ++i) {
    xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
    yp[i] = y[perm[static_cast<std::size_t>(i)]];
  }
  const GpModel a = GpModel::condition(x, y, {hyper(3, 1.0, 0.3, 1e-4)});
  const GpModel b = GpModel::condition(xp, yp, {hyper(3, 1.0, 0.3, 1e-4)});
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd q = random_points(rng, 1, 3).row(0).transpose();
    CHECK(a.predict(q)[0].mean == doctest::Approx(b.predict(q)[0].mean).epsilon(1e-9));
  }
}

TEST_CASE("fit_gp: sampler contract") {
  Rng rng(7);
  const Eigen::MatrixXd x = random_points(rng, 15, 3);
  const Eigen::VectorXd y = smooth_targets(x);
  const GpModel a = fit_gp(x, y, 10, 3);
  const GpModel b = fit_gp(x, y, 10, 3);
  REQUIRE(a.samples().size() == 10);
  for (std::size_t k = 0; k < 10; ++k) {
    const GpHyper& h = a.samples()[k].hyper;
    CHECK(h.amplitude == b.samples()[k].hyper.amplitude);
    CHECK(h.noise == b.samples()[k].hyper.noise);
    CHECK(h.lengthscales == b.samples()[k].hyper.lengthscales);
    CHECK(h.amplitude > 0.0);
    CHECK(h.noise > 0.0);
    CHECK(h.lengthscales.minCoeff() > 0.0);
  }
  // Chains are not stuck on one point.
  CHECK(a.samples().front().hyper.lengthscales != a.samples().back().hyper.lengthscales);
  const GpModel c = fit_gp(x, y, 10, 4);
  CHECK(c.samples()[0].hyper.lengthscales != a.samples()[0].hyper.lengthscales);
}

TEST_CASE("property: variance at training points is below variance far away") {
  Rng rng(8);
  const Eigen::MatrixXd x = random_points(rng, 12, 2);
  const Eigen::VectorXd y = smooth_targets(x);
  const GpModel m = fit_gp(x, y, 10, 1);
  for (std::size_t k = 0; k < m.samples().size(); ++k) {
    const GpHyper& h = m.samples()[k].hyper;
    for (int i = 0; i < 12; ++i) {
      const Eigen::VectorXd near = x.row(i).transpose();
      const Eigen::VectorXd far = near + 10.0 * h.lengthscales.cwiseMax(1.0);
      CHECK(m.predict(near)[k].variance <= m.predict(far)[k].variance);
    }
  }
}

TEST_CASE("fit_gp: degenerate inputs") {
  Eigen::MatrixXd x(4, 2);
  x << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.2, 0.1;  // repeated rows
  const Eigen::VectorXd y = Eigen::Vector4d(0.3, 0.3, 0.3, 0.1);
  CHECK_NOTHROW(fit_gp(x, y, 3, 1));
  const GpModel m = GpModel::condition(x, y, {hyper(2, 1.0, 0.3, 1e-12)});
  CHECK(m.samples()[0].jitter > 0.0);
  CHECK_THROWS_AS(fit_gp(x.topRows(1), y.head(1), 3, 1), DomainError);
  Eigen::VectorXd bad = y;
  bad[2] = std::nan("");
  CHECK_THROWS_AS(fit_gp(x, bad, 3, 1), DomainError);
  CHECK_THROWS_AS(fit_gp(x, y, 0, 1), DomainError);
  // Constant targets still produce a usable model.
  CHECK_NOTHROW(fit_gp(x, Eigen::Vector4d::Constant(0.4), 2, 1));
}

TEST_CASE("factorize: singular kernels are reported") {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 1.0;
  x(1, 0) = std::nan("");
  CHECK_THROWS_AS(factorize(x, Eigen::Vector2d(0.0, 0.0), hyper(1, 1.0, 1.0, 1e-6)), SingularKernelError);
  CHECK_THROWS_AS(factorize(x.topRows(1), Eigen::VectorXd::Zero(1), hyper(1, 1.0, 1.0, 0.0)), DomainError);
}

TEST_CASE("forest: constant targets predict exactly") {
  Rng rng(9);
  const Eigen::MatrixXd x = random_points(rng, 30, 4);
  const RfModel m = fit_rf(x, Eigen::VectorXd::Constant(30, 0.42), 1);
  for (int t = 0; t < 10; ++t) {
    const Prediction p = m.predict(random_points(rng, 1, 4).row(0).transpose());
    CHECK(p.mean == doctest::Approx(0.42).epsilon(1e-15));
    CHECK(p.variance == doctest::Approx(0.0).epsilon(1e-20));
  }
}

TEST_CASE("forest: memorizes without bootstrap") {
  Rng rng(10);
  const Eigen::MatrixXd x = random_points(rng, 25, 3);
  const Eigen::VectorXd y = smooth_targets(x);
  ForestOptions o;
  o.bootstrap = false;
  const RfModel m = fit_rf(x, y, 5, o);
  CHECK(m.trees().size() == 50);
  for (int i = 0; i < 25; ++i) CHECK(m.predict(x.row(i).transpose()).mean == doctest::Approx(y[i]).epsilon(1e-12));
}

TEST_CASE("forest: deterministic, bounded, nonnegative variance") {
  Rng rng(11);
  const Eigen::MatrixXd x = random_points(rng, 40, 5);
  const Eigen::VectorXd y = smooth_targets(x);
  const RfModel a = fit_rf(x, y, 5), b = fit_rf(x, y, 5);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd q = random_points(rng, 1, 5).row(0).transpose();
    const Prediction pa = a.predict(q), pb = b.predict(q);
    CHECK(pa.mean == pb.mean);
    CHECK(pa.variance == pb.variance);
    CHECK(pa.mean >= y.minCoeff());
    CHECK(pa.mean <= y.maxCoeff());
    CHECK(pa.variance >= 0.0);
  }
  for (const auto& tree : a.trees())
    for (const auto& node : tree)
      if (node.feature < 0) CHECK(node.count >= 1);
  CHECK_THROWS_AS(fit_rf(x.topRows(1), y.head(1), 1), DomainError);
}
