// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/flow.hpp"

#include <cmath>
#include <stdexcept>

#include "flowlps/errors.hpp"

namespace flowlps {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_time_range(double t, const char* who) {
  if (!(t >= 0.0) || t > 1.0) throw std::invalid_argument(std::string(who) + ": t must lie in [0, 1]");
}

double log_gaussian(const Eigen::VectorXd& r, const Eigen::MatrixXd& chol_lower) {
  const Eigen::VectorXd z = chol_lower.triangularView<Eigen::Lower>().solve(r);
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < chol_lower.rows(); ++i) log_det_half += std::log(chol_lower(i, i));
  return -0.5 * z.squaredNorm() - 0.5 * double(r.size()) * kLog2Pi - log_det_half;
}

// Per-component conditioning pieces shared by the conditional mixture and the
// plain conditional mean.
struct ConditionalTerms {
  Eigen::VectorXd log_weights;           // unnormalized
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> chols;    // factor of C_k = (1-t)^2 Sigma_k + t^2 I
};

ConditionalTerms conditional_terms(const GaussianMixture& prior, double t,
                                   const Eigen::VectorXd& x_t) {
  const int kn = prior.num_components();
  const int d = prior.dim();
  const double omt = 1.0 - t;
  ConditionalTerms out;
  out.log_weights.resize(kn);
  out.means.reserve(static_cast<size_t>(kn));
  out.chols.reserve(static_cast<size_t>(kn));
  for (int k = 0; k < kn; ++k) {
    const auto& comp = prior.component(k);
    Eigen::MatrixXd c = (omt * omt) * comp.cov;
    c.diagonal().array() += t * t;
    Eigen::MatrixXd l = cholesky_spd(c, "conditional_x0_given_xt");
    const Eigen::VectorXd r = x_t - omt * comp.mean;
    out.log_weights[k] = prior.log_weight(k) + log_gaussian(r, l);
    // mean = mu + (1-t) Sigma C^{-1} r
    Eigen::VectorXd s = l.triangularView<Eigen::Lower>().solve(r);
    s = l.triangularView<Eigen::Lower>().transpose().solve(s);
    out.means.push_back(comp.mean + omt * (comp.cov * s));
    out.chols.push_back(std::move(l));
    (void)d;
  }
  return out;
}

}  // namespace

GaussianMixture marginal_at(const GaussianMixture& prior, double t) {
  check_time_range(t, "marginal_at");
  const double omt = 1.0 - t;
  std::vector<GaussianMixture::Component> comps;
  comps.reserve(static_cast<size_t>(prior.num_components()));
  for (int k = 0; k < prior.num_components(); ++k) {
    const auto& c = prior.component(k);
    GaussianMixture::Component out;
    out.weight = c.weight;
    out.mean = omt * c.mean;
    out.cov = (omt * omt) * c.cov;
    out.cov.diagonal().array() += t * t;
    comps.push_back(std::move(out));
  }
  return GaussianMixture(std::move(comps));
}

GaussianMixture conditional_x0_given_xt(const GaussianMixture& prior, double t,
                                        const Eigen::VectorXd& x_t) {
  if (!(t > 0.0) || t > 1.0)
    throw std::invalid_argument("conditional_x0_given_xt: t must lie in (0, 1]");
  if (x_t.size() != prior.dim())
    throw std::invalid_argument("conditional_x0_given_xt: dimension mismatch");

  ConditionalTerms terms = conditional_terms(prior, t, x_t);
  const double lse = log_sum_exp(terms.log_weights);
  Eigen::VectorXd w = (terms.log_weights.array() - lse).exp();
  w /= w.sum();

  std::vector<GaussianMixture::Component> comps(static_cast<size_t>(prior.num_components()));
  for (int k = 0; k < prior.num_components(); ++k) {
    const auto& sigma = prior.component(k).cov;
    const Eigen::MatrixXd& l = terms.chols[static_cast<size_t>(k)];
    // cond cov = t^2 * Sigma C^{-1}; Sigma and C commute, so this is symmetric
    // and, unlike the textbook subtraction form, free of cancellation at small t.
    Eigen::MatrixXd cinv_sigma = l.triangularView<Eigen::Lower>().solve(sigma);
    cinv_sigma = l.triangularView<Eigen::Lower>().transpose().solve(cinv_sigma);
    Eigen::MatrixXd cov = (t * t) * cinv_sigma;
    comps[static_cast<size_t>(k)].weight = w[k];
    comps[static_cast<size_t>(k)].mean = terms.means[static_cast<size_t>(k)];
    comps[static_cast<size_t>(k)].cov = 0.5 * (cov + cov.transpose());
  }
  return GaussianMixture(std::move(comps));
}

Eigen::VectorXd conditional_mean_x0(const GaussianMixture& prior, double t,
                                    const Eigen::VectorXd& x_t) {
  if (!(t > 0.0) || t > 1.0)
    throw std::invalid_argument("conditional_mean_x0: t must lie in (0, 1]");
  if (x_t.size() != prior.dim())
    throw std::invalid_argument("conditional_mean_x0: dimension mismatch");
  ConditionalTerms terms = conditional_terms(prior, t, x_t);
  const double lse = log_sum_exp(terms.log_weights);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(prior.dim());
  for (int k = 0; k < prior.num_components(); ++k)
    m += std::exp(terms.log_weights[k] - lse) * terms.means[static_cast<size_t>(k)];
  return m;
}

Eigen::VectorXd velocity(const GaussianMixture& prior, double t, const Eigen::VectorXd& x_t) {
  check_time_range(t, "velocity");
  const double te = (t == 0.0) ? kVelocityTimeEpsilon : t;
  const Eigen::VectorXd m0 = conditional_mean_x0(prior, te, x_t);
  return (x_t - m0) / te;
}

TweediePair tweedie_pair(const GaussianMixture& prior, double t, const Eigen::VectorXd& x_t) {
  check_time_range(t, "tweedie_pair");
  const Eigen::VectorXd v = velocity(prior, t, x_t);
  TweediePair pair;
  pair.t = t;
  pair.x0_hat = x_t - t * v;
  pair.x1_hat = x_t + (1.0 - t) * v;
  return pair;
}

GaussianMixture posterior_x0_given_y(const GaussianMixture& prior, const ForwardOperator& op,
                                     const Eigen::VectorXd& y, double sigma_n) {
  if (!(sigma_n > 0.0)) throw std::invalid_argument("posterior_x0_given_y: sigma_n must be positive");
  if (op.in_dim() != prior.dim()) throw std::invalid_argument("posterior_x0_given_y: operator/prior dimension mismatch");
  if (y.size() != op.out_dim()) throw std::invalid_argument("posterior_x0_given_y: y dimension mismatch");

  const Eigen::MatrixXd a = op.materialize();
  const Eigen::MatrixXd ata = a.transpose() * a;
  const Eigen::VectorXd aty = a.transpose() * y;
  const double inv_s2 = 1.0 / (sigma_n * sigma_n);
  const int kn = prior.num_components();
  const int d = prior.dim();

  Eigen::VectorXd logw(kn);
  std::vector<GaussianMixture::Component> comps(static_cast<size_t>(kn));
  for (int k = 0; k < kn; ++k) {
    const auto& c = prior.component(k);
    // precision-form conjugate update
    const Eigen::MatrixXd& l_prior = prior.cholesky_factor(k);
    Eigen::MatrixXd sigma_inv = Eigen::MatrixXd::Identity(d, d);
    sigma_inv = l_prior.triangularView<Eigen::Lower>().solve(sigma_inv);
    sigma_inv = l_prior.triangularView<Eigen::Lower>().transpose().solve(sigma_inv);
    Eigen::MatrixXd lambda = sigma_inv + inv_s2 * ata;
    const Eigen::MatrixXd l_post = cholesky_spd(lambda, "posterior_x0_given_y");
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(d, d);
    s = l_post.triangularView<Eigen::Lower>().solve(s);
    s = l_post.triangularView<Eigen::Lower>().transpose().solve(s);
    const Eigen::VectorXd mean = s * (sigma_inv * c.mean + inv_s2 * aty);

    // evidence N(y; A mu, A Sigma A^T + sigma^2 I)
    Eigen::MatrixXd ev = a * c.cov * a.transpose();
    ev.diagonal().array() += sigma_n * sigma_n;
    const Eigen::MatrixXd l_ev = cholesky_spd(ev, "posterior_x0_given_y evidence");
    logw[k] = prior.log_weight(k) + log_gaussian(y - a * c.mean, l_ev);

    comps[static_cast<size_t>(k)].mean = mean;
    comps[static_cast<size_t>(k)].cov = 0.5 * (s + s.transpose());
  }
  const double lse = log_sum_exp(logw);
  Eigen::VectorXd w = (logw.array() - lse).exp();
  w /= w.sum();
  for (int k = 0; k < kn; ++k) comps[static_cast<size_t>(k)].weight = w[k];
  return GaussianMixture(std::move(comps));
}

GaussianMixture posterior_x0_given_y(const GaussianMixture& prior, const Measurement& meas) {
  if (!meas.decoder.is_identity())
    throw UnsupportedOperation("posterior_x0_given_y: closed form requires the identity decoder");
  return posterior_x0_given_y(prior, meas.op, meas.y, meas.sigma_n);
}

}  // namespace flowlps
