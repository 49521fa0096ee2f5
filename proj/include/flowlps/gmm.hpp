// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "flowlps/rng.hpp"

namespace flowlps {

double log_sum_exp(const Eigen::VectorXd& v);

/// Lower Cholesky factor of a symmetric positive-definite matrix, with
/// escalating diagonal jitter (0, 1e-12, 1e-9, 1e-6) before giving up.
/// Throws NumericFailure when no jitter level succeeds.
Eigen::MatrixXd cholesky_spd(const Eigen::MatrixXd& m, const char* context);

/// Finite Gaussian mixture with full covariances.
///
/// Invariants enforced at construction: weights nonnegative and summing to 1
/// within 1e-12, every covariance symmetric and admitting a (jittered)
/// Cholesky factorization, all dimensions consistent. Component weights are
/// kept in log space for density work.
class GaussianMixture {
 public:
  struct Component {
    double weight = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
  };

  explicit GaussianMixture(std::vector<Component> components);

  int dim() const { return dim_; }
  int num_components() const { return static_cast<int>(comps_.size()); }
  const std::vector<Component>& components() const { return comps_; }
  const Component& component(int k) const { return comps_[static_cast<size_t>(k)]; }
  /// Lower Cholesky factor of component k's covariance (after any jitter).
  const Eigen::MatrixXd& cholesky_factor(int k) const { return chol_[static_cast<size_t>(k)]; }
  double log_weight(int k) const { return log_weights_[k]; }

  double component_log_density(int k, const Eigen::VectorXd& x) const;
  double log_density(const Eigen::VectorXd& x) const;

  Eigen::VectorXd mean() const;
  Eigen::MatrixXd covariance() const;

  Eigen::VectorXd sample(RandomStream& rng) const;
  /// n independent draws, one per row.
  Eigen::MatrixXd sample(RandomStream& rng, int n) const;

 private:
  std::vector<Component> comps_;
  std::vector<Eigen::MatrixXd> chol_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd log_weights_;
  int dim_ = 0;
};

struct EmOptions {
  int max_iter = 100;
  double rel_tol = 1e-8;      // on log-likelihood change
  double cov_floor = 1e-6;    // added to every fitted covariance diagonal
  int restarts = 3;           // fresh k-means++ inits before declaring failure
  std::uint64_t seed = 0;
};

/// Maximum-likelihood mixture fit: k-means++ initialization followed by EM.
/// data holds one sample per row. Throws FitFailure when every restart ends
/// in an empty or degenerate cluster.
GaussianMixture fit_em(const Eigen::MatrixXd& data, int num_components,
                       const EmOptions& opts = {});

}  // namespace flowlps
