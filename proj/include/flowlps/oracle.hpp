// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "flowlps/gmm.hpp"

namespace flowlps::oracle {

// Brute-force reference implementations used to check the closed-form fast
// paths. They share no solver code with what they verify: densities are
// recomputed from raw component parameters, linear solves use a direct
// factorization of the full normal matrix, expectations use quadrature.

struct Grid1D {
  Eigen::VectorXd nodes;  // strictly increasing, uniform spacing

  static Grid1D uniform(double lo, double hi, int n);
  /// Covers every component mean +- span_sigmas standard deviations.
  static Grid1D for_prior(const GaussianMixture& prior, double span_sigmas = 12.0, int n = 65536);
  double spacing() const;
};

/// Trapezoid-rule E[x0 | x_t] for a scalar prior.
double quadrature_conditional_mean(const GaussianMixture& prior, double t, double x,
                                   const Grid1D& grid);

/// Trapezoid-rule velocity (x - E[x0 | x_t]) / t for a scalar prior.
double quadrature_velocity(const GaussianMixture& prior, double t, double x, const Grid1D& grid);

/// (A^T A + lambda I)^{-1} (A^T y + lambda * anchor), lambda > 0.
Eigen::VectorXd ridge_closed_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double lambda,
                                  const Eigen::VectorXd& anchor);

/// Stationary covariance of the unadjusted Langevin iteration with step zeta
/// on a Gaussian target with the given precision: the fixed point of
/// S = M S M + 2 zeta I with M = I - zeta * P. Requires zeta < 2 / lambda_max(P).
Eigen::MatrixXd ula_stationary_covariance(const Eigen::MatrixXd& precision, double zeta);

/// Central differences, one coordinate at a time.
Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& x, double h);

/// Log-density tabulated on a tensor grid (1-D or 2-D), for normalization
/// checks and visual inspection at desk scale.
struct GridDensity {
  std::vector<Eigen::VectorXd> axes;
  Eigen::VectorXd log_values;  // row-major over the axes
  double cell_volume = 0.0;

  static GridDensity evaluate(const GaussianMixture& mixture,
                              const std::vector<Eigen::VectorXd>& axes);
  double total_mass() const;
  /// Shifts log-values so total_mass() becomes 1.
  void normalize();
};

/// Empirical-vs-analytic moment comparison with per-entry standard errors.
struct MomentReport {
  Eigen::VectorXd mean_error;  // empirical minus analytic
  Eigen::MatrixXd cov_error;
  Eigen::VectorXd mean_se;
  Eigen::MatrixXd cov_se;
  double mean_err_inf = 0.0;
  double cov_err_inf = 0.0;
  double max_mean_sigmas = 0.0;  // max |error| / SE
  double max_cov_sigmas = 0.0;

  bool within(double n_se) const { return max_mean_sigmas <= n_se && max_cov_sigmas <= n_se; }
};

/// samples holds one draw per row; needs at least 1000 rows.
MomentReport moment_distance(const Eigen::MatrixXd& samples, const GaussianMixture& target);

}  // namespace flowlps::oracle
