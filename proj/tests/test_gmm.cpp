// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "flowlps/errors.hpp"
#include "flowlps/gmm.hpp"
#include "test_support.hpp"

using namespace flowlps;

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

TEST_CASE("log density of the standard normal at the origin") {
  const GaussianMixture g = testsup::std_normal(1);
  CHECK(g.log_density(Eigen::VectorXd::Zero(1)) == doctest::Approx(-0.5 * kLog2Pi).epsilon(1e-12));
}

TEST_CASE("log density of an equal pair at +-1 evaluated at zero") {
  // both components contribute N(0; +-1, 1), so the mixture density is
  // exp(-1/2)/sqrt(2 pi) and the log is -log(2 pi)/2 - 1/2
  const GaussianMixture g = testsup::scalar_symmetric(1.0, 1.0);
  CHECK(g.log_density(Eigen::VectorXd::Zero(1)) ==
        doctest::Approx(-0.5 * kLog2Pi - 0.5).epsilon(1e-12));
}

TEST_CASE("construction validates weights, symmetry and dimensions") {
  GaussianMixture::Component c;
  c.weight = 1.0;
  c.mean = Eigen::VectorXd::Zero(2);
  c.cov = Eigen::MatrixXd::Identity(2, 2);

  SUBCASE("negative weight") {
    auto bad = c;
    bad.weight = -0.2;
    GaussianMixture::Component other = c;
    other.weight = 1.2;
    CHECK_THROWS_AS(GaussianMixture({bad, other}), std::invalid_argument);
  }
  SUBCASE("weights must sum to one") {
    auto half = c;
    half.weight = 0.7;
    CHECK_THROWS_AS(GaussianMixture({half}), std::invalid_argument);
  }
  SUBCASE("asymmetric covariance") {
    auto bad = c;
    bad.cov(0, 1) = 0.3;  // (1,0) stays 0
    CHECK_THROWS_AS(GaussianMixture({bad}), std::invalid_argument);
  }
  SUBCASE("mismatched dimensions") {
    auto bad = c;
    bad.weight = 0.5;
    GaussianMixture::Component other;
    other.weight = 0.5;
    other.mean = Eigen::VectorXd::Zero(3);
    other.cov = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(GaussianMixture({bad, other}), std::invalid_argument);
  }
  SUBCASE("no components") {
    CHECK_THROWS_AS(GaussianMixture({}), std::invalid_argument);
  }
  SUBCASE("negative definite covariance") {
    auto bad = c;
    bad.cov = -Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(GaussianMixture({bad}), NumericFailure);
  }
}

TEST_CASE("cholesky_spd applies jitter to a semidefinite matrix") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 1.0, 1.0, 1.0;  // rank one
  const Eigen::MatrixXd l = cholesky_spd(m, "test");
  CHECK(((l * l.transpose()) - m).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("mixture mean and covariance combine component moments") {
  // equal pair at +-1 with unit variances: mean 0, variance 1 + 1 = 2
  const GaussianMixture g = testsup::scalar_symmetric(1.0, 1.0);
  CHECK(g.mean()[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(g.covariance()(0, 0) == doctest::Approx(2.0).epsilon(1e-14));

  const GaussianMixture p = testsup::planar_two_component();
  Eigen::VectorXd mean = 0.45 * p.component(0).mean + 0.55 * p.component(1).mean;
  CHECK((p.mean() - mean).norm() < 1e-14);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(2, 2);
  for (int k = 0; k < 2; ++k) {
    const auto& c = p.component(k);
    second += c.weight * (c.cov + c.mean * c.mean.transpose());
  }
  CHECK((p.covariance() - (second - mean * mean.transpose())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("log_sum_exp of simple values") {
  Eigen::VectorXd v(2);
  v << 0.0, 0.0;
  CHECK(log_sum_exp(v) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  v << -1000.0, 0.0;
  CHECK(log_sum_exp(v) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sample moments converge to mixture moments") {
  const GaussianMixture p = testsup::planar_two_component();
  RandomStream rng(314159);
  const int n = 100000;
  const Eigen::MatrixXd draws = p.sample(rng, n);
  REQUIRE(draws.rows() == n);
  REQUIRE(draws.cols() == 2);
  const Eigen::VectorXd emp_mean = draws.colwise().mean().transpose();
  const Eigen::MatrixXd centered = draws.rowwise() - emp_mean.transpose();
  const Eigen::MatrixXd emp_cov = centered.transpose() * centered / double(n - 1);
  const Eigen::MatrixXd cov = p.covariance();
  for (int i = 0; i < 2; ++i) {
    const double se = std::sqrt(cov(i, i) / n);
    CHECK(std::abs(emp_mean[i] - p.mean()[i]) < 4.0 * se);
  }
  CHECK((emp_cov - cov).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("em with one component recovers sample statistics in closed form") {
  RandomStream rng(17);
  const int n = 500;
  Eigen::MatrixXd data(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) data(i, j) = 0.3 * rng.normal() + (j == 0 ? 1.0 : -2.0);

  const GaussianMixture fit = fit_em(data, 1);
  const Eigen::VectorXd mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / double(n);
  cov.diagonal().array() += 1e-6;  // fitted covariances carry the configured floor

  CHECK((fit.component(0).mean - mean).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((fit.component(0).cov - cov).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(fit.component(0).weight == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("em recovers the mean of a unit gaussian within 0.05") {
  RandomStream rng(20260821);
  const int n = 10000;
  Eigen::MatrixXd data(n, 1);
  for (int i = 0; i < n; ++i) data(i, 0) = 2.0 + rng.normal();
  const GaussianMixture fit = fit_em(data, 1);
  CHECK(std::abs(fit.component(0).mean[0] - 2.0) < 0.05);
  CHECK(std::abs(fit.component(0).cov(0, 0) - 1.0) < 0.1);
}

TEST_CASE("em is invariant under duplicating the dataset") {
  RandomStream rng(8);
  const int n = 40;
  Eigen::MatrixXd data(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) data(i, j) = rng.normal();
  Eigen::MatrixXd doubled(2 * n, 2);
  doubled << data, data;

  const GaussianMixture a = fit_em(data, 1);
  const GaussianMixture b = fit_em(doubled, 1);
  CHECK((a.component(0).mean - b.component(0).mean).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.component(0).cov - b.component(0).cov).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("em separates two well-spaced clusters") {
  RandomStream rng(23);
  const int n = 400;
  Eigen::MatrixXd data(n, 1);
  for (int i = 0; i < n; ++i) data(i, 0) = (i % 2 ? 3.0 : -3.0) + 0.25 * rng.normal();
  const GaussianMixture fit = fit_em(data, 2);
  double lo = fit.component(0).mean[0], hi = fit.component(1).mean[0];
  if (lo > hi) std::swap(lo, hi);
  CHECK(std::abs(lo + 3.0) < 0.15);
  CHECK(std::abs(hi - 3.0) < 0.15);
}

TEST_CASE("em rejects insufficient data") {
  Eigen::MatrixXd tiny(3, 2);
  tiny.setZero();
  CHECK_THROWS_AS(fit_em(tiny, 2), std::invalid_argument);
}
