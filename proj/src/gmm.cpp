// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "flowlps/errors.hpp"

namespace flowlps {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf (or a nan) dominates
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::exp(v[i] - m);
  return m + std::log(acc);
}

Eigen::MatrixXd cholesky_spd(const Eigen::MatrixXd& m, const char* context) {
  static const double kJitters[] = {0.0, 1e-12, 1e-9, 1e-6};
  for (double j : kJitters) {
    Eigen::MatrixXd attempt = m;
    if (j > 0.0) attempt.diagonal().array() += j;
    Eigen::LLT<Eigen::MatrixXd> llt(attempt);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw NumericFailure(std::string(context) + ": matrix is not positive definite (jitter up to 1e-6 failed)");
}

GaussianMixture::GaussianMixture(std::vector<Component> components) : comps_(std::move(components)) {
  if (comps_.empty()) throw std::invalid_argument("GaussianMixture: no components");
  dim_ = static_cast<int>(comps_[0].mean.size());
  if (dim_ < 1) throw std::invalid_argument("GaussianMixture: empty mean vector");

  const size_t k = comps_.size();
  weights_.resize(static_cast<Eigen::Index>(k));
  log_weights_.resize(static_cast<Eigen::Index>(k));
  chol_.reserve(k);

  double wsum = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const Component& c = comps_[i];
    if (c.mean.size() != dim_ || c.cov.rows() != dim_ || c.cov.cols() != dim_)
      throw std::invalid_argument("GaussianMixture: inconsistent component dimensions");
    if (!(c.weight >= 0.0)) throw std::invalid_argument("GaussianMixture: negative component weight");
    const double scale = std::max(1.0, c.cov.cwiseAbs().maxCoeff());
    if ((c.cov - c.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("GaussianMixture: covariance not symmetric");
    wsum += c.weight;
    weights_[static_cast<Eigen::Index>(i)] = c.weight;
    chol_.push_back(cholesky_spd(c.cov, "GaussianMixture"));
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("GaussianMixture: weights sum to " + std::to_string(wsum) + ", expected 1");
  for (Eigen::Index i = 0; i < weights_.size(); ++i)
    log_weights_[i] = weights_[i] > 0.0 ? std::log(weights_[i]) : -std::numeric_limits<double>::infinity();
}

double GaussianMixture::component_log_density(int k, const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("log_density: dimension mismatch");
  const Eigen::MatrixXd& l = chol_[static_cast<size_t>(k)];
  const Eigen::VectorXd r = x - comps_[static_cast<size_t>(k)].mean;
  const Eigen::VectorXd z = l.triangularView<Eigen::Lower>().solve(r);
  double log_det_half = 0.0;
  for (int i = 0; i < dim_; ++i) log_det_half += std::log(l(i, i));
  return -0.5 * z.squaredNorm() - 0.5 * dim_ * kLog2Pi - log_det_half;
}

double GaussianMixture::log_density(const Eigen::VectorXd& x) const {
  Eigen::VectorXd terms(num_components());
  for (int k = 0; k < num_components(); ++k)
    terms[k] = log_weights_[k] + component_log_density(k, x);
  return log_sum_exp(terms);
}

Eigen::VectorXd GaussianMixture::mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim_);
  for (int k = 0; k < num_components(); ++k) m += weights_[k] * comps_[static_cast<size_t>(k)].mean;
  return m;
}

Eigen::MatrixXd GaussianMixture::covariance() const {
  const Eigen::VectorXd m = mean();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int k = 0; k < num_components(); ++k) {
    const Component& comp = comps_[static_cast<size_t>(k)];
    const Eigen::VectorXd dm = comp.mean - m;
    c += weights_[k] * (comp.cov + dm * dm.transpose());
  }
  return c;
}

Eigen::VectorXd GaussianMixture::sample(RandomStream& rng) const {
  const int k = rng.categorical(weights_);
  return comps_[static_cast<size_t>(k)].mean +
         chol_[static_cast<size_t>(k)] * rng.normal_vector(dim_);
}

Eigen::MatrixXd GaussianMixture::sample(RandomStream& rng, int n) const {
  if (n < 0) throw std::invalid_argument("sample: negative count");
  Eigen::MatrixXd out(n, dim_);
  for (int i = 0; i < n; ++i) out.row(i) = sample(rng).transpose();
  return out;
}

namespace {

// k-means++ seeding: first center uniform, the rest D^2-weighted.
std::vector<int> kmeanspp_centers(const Eigen::MatrixXd& data, int k, RandomStream& rng) {
  const int n = static_cast<int>(data.rows());
  std::vector<int> centers;
  centers.reserve(static_cast<size_t>(k));
  centers.push_back(std::min(n - 1, static_cast<int>(rng.uniform() * n)));
  Eigen::VectorXd d2 = (data.rowwise() - data.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < k) {
    const double total = d2.sum();
    int pick;
    if (total <= 0.0) {
      pick = std::min(n - 1, static_cast<int>(rng.uniform() * n));
    } else {
      const double u = rng.uniform() * total;
      double cum = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        cum += d2[i];
        if (u < cum) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(pick);
    d2 = d2.cwiseMin((data.rowwise() - data.row(pick)).rowwise().squaredNorm());
  }
  return centers;
}

struct EmState {
  std::vector<GaussianMixture::Component> comps;
  bool degenerate = false;
};

}  // namespace

GaussianMixture fit_em(const Eigen::MatrixXd& data, int num_components, const EmOptions& opts) {
  const int n = static_cast<int>(data.rows());
  const int d = static_cast<int>(data.cols());
  const int k = num_components;
  if (k < 1) throw std::invalid_argument("fit_em: need at least one component");
  if (d < 1) throw std::invalid_argument("fit_em: empty data");
  if (n < k * (d + 1))
    throw std::invalid_argument("fit_em: need at least K*(d+1) samples, got " + std::to_string(n));

  const Eigen::RowVectorXd data_mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - data_mean;
  Eigen::MatrixXd global_cov = (centered.transpose() * centered) / double(n);
  global_cov.diagonal().array() += opts.cov_floor;

  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    RandomStream rng = derive_stream(opts.seed, "em-init", static_cast<std::uint64_t>(attempt));
    const std::vector<int> centers = kmeanspp_centers(data, k, rng);

    std::vector<GaussianMixture::Component> comps(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) {
      comps[static_cast<size_t>(j)].weight = 1.0 / k;
      comps[static_cast<size_t>(j)].mean = data.row(centers[static_cast<size_t>(j)]).transpose();
      comps[static_cast<size_t>(j)].cov = global_cov;
    }

    bool failed = false;
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iter; ++iter) {
      GaussianMixture model(comps);

      Eigen::MatrixXd log_resp(n, k);
      double ll = 0.0;
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd row(k);
        const Eigen::VectorXd xi = data.row(i).transpose();
        for (int j = 0; j < k; ++j)
          row[j] = model.log_weight(j) + model.component_log_density(j, xi);
        const double lse = log_sum_exp(row);
        ll += lse;
        log_resp.row(i) = (row.array() - lse).transpose();
      }

      if (iter > 0 && std::abs(ll - prev_ll) <= opts.rel_tol * std::max(1.0, std::abs(prev_ll)))
        return model;
      prev_ll = ll;

      Eigen::MatrixXd resp = log_resp.array().exp();
      const Eigen::VectorXd nk = resp.colwise().sum().transpose();
      if (nk.minCoeff() < 1e-9) {
        failed = true;  // empty cluster, re-seed
        break;
      }
      for (int j = 0; j < k; ++j) {
        const Eigen::VectorXd mu = (resp.col(j).transpose() * data).transpose() / nk[j];
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < n; ++i) {
          const Eigen::VectorXd dm = data.row(i).transpose() - mu;
          cov.noalias() += resp(i, j) * (dm * dm.transpose());
        }
        cov /= nk[j];
        cov.diagonal().array() += opts.cov_floor;
        comps[static_cast<size_t>(j)].weight = nk[j] / double(n);
        comps[static_cast<size_t>(j)].mean = mu;
        comps[static_cast<size_t>(j)].cov = 0.5 * (cov + cov.transpose());
      }
      double wsum = 0.0;
      for (auto& c : comps) wsum += c.weight;
      for (auto& c : comps) c.weight /= wsum;
    }
    if (!failed) return GaussianMixture(comps);  // hit max_iter without degenerating
  }
  throw FitFailure("fit_em: empty cluster on every restart");
}

}  // namespace flowlps
