// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "flowlps/forward.hpp"
#include "flowlps/gmm.hpp"

namespace flowlps {

// Interpolation path: x_t = t * x1 + (1 - t) * x0 with x1 standard normal,
// independent of x0. Every quantity below is closed-form for a GMM prior.

/// Velocity queries at t == 0 are evaluated at this one-sided offset instead.
inline constexpr double kVelocityTimeEpsilon = 1e-6;

/// Mixture of x_t: component k has mean (1-t)*mu_k, cov (1-t)^2*Sigma_k + t^2*I.
GaussianMixture marginal_at(const GaussianMixture& prior, double t);

/// Mixture of x0 | x_t (Gaussian conditioning per component plus posterior
/// reweighting). Requires t in (0, 1]; t == 0 conditions on x0 itself and is
/// rejected.
GaussianMixture conditional_x0_given_xt(const GaussianMixture& prior, double t,
                                        const Eigen::VectorXd& x_t);

/// E[x0 | x_t] without forming conditional covariances.
Eigen::VectorXd conditional_mean_x0(const GaussianMixture& prior, double t,
                                    const Eigen::VectorXd& x_t);

/// Marginal velocity v_t(x) = E[x1 | x_t] - E[x0 | x_t] = (x_t - E[x0|x_t]) / t.
Eigen::VectorXd velocity(const GaussianMixture& prior, double t, const Eigen::VectorXd& x_t);

/// Endpoint estimates recovered from one velocity evaluation:
/// x0_hat = x_t - t*v, x1_hat = x_t + (1-t)*v, so that
/// (1-t)*x0_hat + t*x1_hat reproduces x_t exactly.
struct TweediePair {
  Eigen::VectorXd x0_hat;
  Eigen::VectorXd x1_hat;
  double t = 0.0;
};

TweediePair tweedie_pair(const GaussianMixture& prior, double t, const Eigen::VectorXd& x_t);

/// Mixture of x0 | y for a linear operator and identity decoder:
/// per-component Gaussian conjugacy with evidence-reweighted weights.
GaussianMixture posterior_x0_given_y(const GaussianMixture& prior, const ForwardOperator& op,
                                     const Eigen::VectorXd& y, double sigma_n);

/// Convenience overload; rejects measurements with a non-identity decoder.
GaussianMixture posterior_x0_given_y(const GaussianMixture& prior, const Measurement& meas);

}  // namespace flowlps
