// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "flowlps/errors.hpp"

namespace flowlps::oracle {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

Grid1D Grid1D::uniform(double lo, double hi, int n) {
  if (!(hi > lo)) throw std::invalid_argument("Grid1D: hi must exceed lo");
  if (n < 2) throw std::invalid_argument("Grid1D: need at least two nodes");
  Grid1D g;
  g.nodes.resize(n);
  const double h = (hi - lo) / double(n - 1);
  for (int i = 0; i < n; ++i) g.nodes[i] = lo + h * i;
  return g;
}

Grid1D Grid1D::for_prior(const GaussianMixture& prior, double span_sigmas, int n) {
  if (prior.dim() != 1) throw std::invalid_argument("Grid1D::for_prior: scalar priors only");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < prior.num_components(); ++k) {
    const double mu = prior.component(k).mean[0];
    const double sd = std::sqrt(prior.component(k).cov(0, 0));
    lo = std::min(lo, mu - span_sigmas * sd);
    hi = std::max(hi, mu + span_sigmas * sd);
  }
  return uniform(lo, hi, n);
}

double Grid1D::spacing() const { return nodes[1] - nodes[0]; }

namespace {

// log prior density at a scalar point, from raw component parameters
double scalar_log_prior(const GaussianMixture& prior, double x0) {
  double best = -std::numeric_limits<double>::infinity();
  const int kn = prior.num_components();
  Eigen::VectorXd terms(kn);
  for (int k = 0; k < kn; ++k) {
    const double w = prior.component(k).weight;
    if (w <= 0.0) {
      terms[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    const double mu = prior.component(k).mean[0];
    const double var = prior.component(k).cov(0, 0);
    const double r = x0 - mu;
    terms[k] = std::log(w) - 0.5 * (r * r / var + std::log(var) + kLog2Pi);
    best = std::max(best, terms[k]);
  }
  if (!std::isfinite(best)) return best;
  double acc = 0.0;
  for (int k = 0; k < kn; ++k) acc += std::exp(terms[k] - best);
  return best + std::log(acc);
}

}  // namespace

double quadrature_conditional_mean(const GaussianMixture& prior, double t, double x,
                                   const Grid1D& grid) {
  if (prior.dim() != 1) throw std::invalid_argument("quadrature_conditional_mean: scalar priors only");
  if (!(t > 0.0) || t > 1.0) throw std::invalid_argument("quadrature_conditional_mean: t must lie in (0, 1]");
  const int n = static_cast<int>(grid.nodes.size());
  const double omt = 1.0 - t;

  // log integrand: log q(x0) + log N(x; (1-t) x0, t^2)
  Eigen::VectorXd logf(n);
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x0 = grid.nodes[i];
    const double r = x - omt * x0;
    logf[i] = scalar_log_prior(prior, x0) - 0.5 * (r * r / (t * t) + 2.0 * std::log(t) + kLog2Pi);
    peak = std::max(peak, logf[i]);
  }
  double mass = 0.0, first = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;  // trapezoid weights
    const double f = std::exp(logf[i] - peak);
    mass += w * f;
    first += w * f * grid.nodes[i];
  }
  if (mass <= 0.0) throw NumericFailure("quadrature_conditional_mean: vanishing posterior mass on grid");
  return first / mass;
}

double quadrature_velocity(const GaussianMixture& prior, double t, double x, const Grid1D& grid) {
  const double m0 = quadrature_conditional_mean(prior, t, x, grid);
  return (x - m0) / t;
}

Eigen::VectorXd ridge_closed_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double lambda,
                                  const Eigen::VectorXd& anchor) {
  if (!(lambda > 0.0)) throw std::invalid_argument("ridge_closed_form: lambda must be positive");
  if (y.size() != a.rows() || anchor.size() != a.cols())
    throw std::invalid_argument("ridge_closed_form: dimension mismatch");
  Eigen::MatrixXd normal = a.transpose() * a;
  normal.diagonal().array() += lambda;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success) throw NumericFailure("ridge_closed_form: factorization failed");
  return ldlt.solve(a.transpose() * y + lambda * anchor);
}

Eigen::MatrixXd ula_stationary_covariance(const Eigen::MatrixXd& precision, double zeta) {
  const Eigen::Index d = precision.rows();
  if (d < 1 || precision.cols() != d) throw std::invalid_argument("ula_stationary_covariance: square matrix required");
  const double scale = std::max(1.0, precision.cwiseAbs().maxCoeff());
  if ((precision - precision.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("ula_stationary_covariance: precision not symmetric");
  if (!(zeta > 0.0)) throw std::invalid_argument("ula_stationary_covariance: zeta must be positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(precision);
  const double lam_max = es.eigenvalues().maxCoeff();
  const double lam_min = es.eigenvalues().minCoeff();
  if (!(lam_min > 0.0)) throw std::invalid_argument("ula_stationary_covariance: precision not positive definite");
  if (!(zeta < 2.0 / lam_max))
    throw std::invalid_argument("ula_stationary_covariance: unstable step (zeta >= 2/lambda_max)");

  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d) - zeta * precision;
  Eigen::MatrixXd s = 2.0 * zeta * Eigen::MatrixXd::Identity(d, d);
  for (int iter = 0; iter < 1000000; ++iter) {
    Eigen::MatrixXd next = m * s * m;
    next.diagonal().array() += 2.0 * zeta;
    const double delta = (next - s).cwiseAbs().maxCoeff();
    s = 0.5 * (next + next.transpose());
    if (delta <= 1e-12) return s;
  }
  throw NumericFailure("ula_stationary_covariance: fixed point did not converge");
}

Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: h must be positive");
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

GridDensity GridDensity::evaluate(const GaussianMixture& mixture,
                                  const std::vector<Eigen::VectorXd>& axes) {
  if (axes.empty() || axes.size() > 2) throw std::invalid_argument("GridDensity: 1-D or 2-D only");
  if (static_cast<int>(axes.size()) != mixture.dim())
    throw std::invalid_argument("GridDensity: axis count must match mixture dimension");
  for (const auto& ax : axes)
    if (ax.size() < 2) throw std::invalid_argument("GridDensity: axis needs at least two nodes");

  GridDensity g;
  g.axes = axes;
  g.cell_volume = 1.0;
  for (const auto& ax : axes) g.cell_volume *= ax[1] - ax[0];

  if (axes.size() == 1) {
    const Eigen::Index n = axes[0].size();
    g.log_values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) g.log_values[i] = scalar_log_prior(mixture, axes[0][i]);
    return g;
  }

  // 2-D: direct per-component evaluation via the 2x2 inverse
  const Eigen::Index nr = axes[0].size(), nc = axes[1].size();
  g.log_values.resize(nr * nc);
  const int kn = mixture.num_components();
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      Eigen::VectorXd terms(kn);
      double best = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < kn; ++k) {
        const auto& c = mixture.component(k);
        if (c.weight <= 0.0) {
          terms[k] = -std::numeric_limits<double>::infinity();
          continue;
        }
        const double dx = axes[0][i] - c.mean[0];
        const double dy = axes[1][j] - c.mean[1];
        const double s00 = c.cov(0, 0), s01 = c.cov(0, 1), s11 = c.cov(1, 1);
        const double det = s00 * s11 - s01 * s01;
        if (!(det > 0.0)) throw NumericFailure("GridDensity: singular 2x2 covariance");
        const double quad = (s11 * dx * dx - 2.0 * s01 * dx * dy + s00 * dy * dy) / det;
        terms[k] = std::log(c.weight) - 0.5 * (quad + std::log(det)) - kLog2Pi;
        best = std::max(best, terms[k]);
      }
      double acc = 0.0;
      for (int k = 0; k < kn; ++k) acc += std::exp(terms[k] - best);
      g.log_values[i * nc + j] = best + std::log(acc);
    }
  }
  return g;
}

double GridDensity::total_mass() const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < log_values.size(); ++i) acc += std::exp(log_values[i]);
  return acc * cell_volume;
}

void GridDensity::normalize() {
  const double mass = total_mass();
  if (!(mass > 0.0)) throw NumericFailure("GridDensity: vanishing mass");
  const double shift = std::log(mass);
  log_values.array() -= shift;
}

MomentReport moment_distance(const Eigen::MatrixXd& samples, const GaussianMixture& target) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index d = samples.cols();
  if (n < 1000) throw std::invalid_argument("moment_distance: need at least 1000 samples");
  if (static_cast<int>(d) != target.dim()) throw std::invalid_argument("moment_distance: dimension mismatch");

  const Eigen::RowVectorXd emp_mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - emp_mean;
  const Eigen::MatrixXd emp_cov = (centered.transpose() * centered) / double(n - 1);

  MomentReport rep;
  rep.mean_error = emp_mean.transpose() - target.mean();
  rep.cov_error = emp_cov - target.covariance();

  rep.mean_se.resize(d);
  for (Eigen::Index i = 0; i < d; ++i)
    rep.mean_se[i] = std::sqrt(emp_cov(i, i) / double(n));

  // SE of each covariance entry from the empirical fourth moments
  rep.cov_se.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const Eigen::ArrayXd prod = centered.col(i).array() * centered.col(j).array();
      const double pm = prod.mean();
      const double var = (prod - pm).square().sum() / double(n - 1);
      rep.cov_se(i, j) = std::sqrt(var / double(n));
    }
  }

  rep.mean_err_inf = rep.mean_error.cwiseAbs().maxCoeff();
  rep.cov_err_inf = rep.cov_error.cwiseAbs().maxCoeff();

  auto sigmas = [](double err, double se) {
    if (se > 0.0) return std::abs(err) / se;
    return err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  for (Eigen::Index i = 0; i < d; ++i)
    rep.max_mean_sigmas = std::max(rep.max_mean_sigmas, sigmas(rep.mean_error[i], rep.mean_se[i]));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      rep.max_cov_sigmas = std::max(rep.max_cov_sigmas, sigmas(rep.cov_error(i, j), rep.cov_se(i, j)));
  return rep;
}

}  // namespace flowlps::oracle
