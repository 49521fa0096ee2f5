// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/sampler.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <set>
#include <stdexcept>

#include "flowlps/errors.hpp"

namespace flowlps {

std::vector<double> time_schedule(int n_steps, int alpha) {
  if (n_steps < 1) throw std::invalid_argument("time_schedule: n_steps must be positive");
  if (alpha < 0) throw std::invalid_argument("time_schedule: alpha must be nonnegative");
  const double grid = double(n_steps + alpha);
  std::vector<double> ts(static_cast<size_t>(n_steps) + 1);
  for (int i = 0; i <= n_steps; ++i) ts[static_cast<size_t>(i)] = 1.0 - double(i) / grid;
  return ts;
}

double resolve_rho(const RhoSchedule& schedule, double t_next) {
  if (!(t_next >= 0.0) || t_next > 1.0) throw std::invalid_argument("resolve_rho: t_next outside [0, 1]");
  switch (schedule.kind) {
    case RhoKind::Zero:
      return 0.0;
    case RhoKind::Const:
      if (schedule.value < 0.0 || schedule.value > 1.0)
        throw std::invalid_argument("resolve_rho: const value outside [0, 1]");
      return schedule.value;
    case RhoKind::OneMinusSigma:
      return 1.0 - t_next;
    case RhoKind::SqrtOneMinusSigma:
      return std::sqrt(1.0 - t_next);
  }
  throw std::logic_error("resolve_rho: unreachable");
}

std::string rho_schedule_name(const RhoSchedule& schedule) {
  switch (schedule.kind) {
    case RhoKind::Zero:
      return "zero";
    case RhoKind::Const:
      return "const(" + std::to_string(schedule.value) + ")";
    case RhoKind::OneMinusSigma:
      return "one-minus-sigma";
    case RhoKind::SqrtOneMinusSigma:
      return "sqrt-one-minus-sigma";
  }
  return "?";
}

int resolve_n_langevin(const LangevinSchedule& schedule, int step_index, int n_steps) {
  if (schedule.start < 0 || schedule.end < 0)
    throw std::invalid_argument("resolve_n_langevin: negative step count");
  if (step_index < 0 || step_index >= n_steps)
    throw std::invalid_argument("resolve_n_langevin: step index outside schedule");
  if (schedule.is_fixed() || n_steps == 1) return schedule.start;
  const double frac = double(step_index) / double(n_steps - 1);
  return static_cast<int>(std::lround(schedule.start + (schedule.end - schedule.start) * frac));
}

std::string langevin_schedule_name(const LangevinSchedule& schedule) {
  if (schedule.is_fixed()) return std::to_string(schedule.start);
  return std::to_string(schedule.start) + "->" + std::to_string(schedule.end);
}

Eigen::VectorXd pcn_renoise(const Eigen::VectorXd& x1_hat, double rho, RandomStream& rng) {
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("pcn_renoise: rho outside [0, 1]");
  if (rho == 1.0) return x1_hat;
  if (rho == 0.0) return rng.normal_vector(x1_hat.size());
  return rho * x1_hat + std::sqrt(1.0 - rho * rho) * rng.normal_vector(x1_hat.size());
}

Eigen::VectorXd langevin_phase(const Measurement& meas, const Eigen::VectorXd& anchor,
                               const Eigen::VectorXd& z_init, double t, int n_steps, double zeta,
                               RandomStream& rng) {
  if (n_steps < 0) throw std::invalid_argument("langevin_phase: negative step count");
  if (n_steps == 0) return z_init;
  if (!(t > 0.0)) throw std::invalid_argument("langevin_phase: t must be positive");
  if (!(zeta > 0.0)) throw std::invalid_argument("langevin_phase: zeta must be positive");
  if (!(meas.sigma_n > 0.0))
    throw std::invalid_argument("langevin_phase: sigma_n must be positive (the likelihood score is undefined at zero noise)");
  if (anchor.size() != z_init.size() || z_init.size() != meas.latent_dim())
    throw std::invalid_argument("langevin_phase: dimension mismatch");

  const double inv_s2 = 1.0 / (meas.sigma_n * meas.sigma_n);
  const double noise_scale = std::sqrt(2.0 * zeta);
  Eigen::VectorXd z = z_init;
  for (int k = 0; k < n_steps; ++k) {
    const Eigen::VectorXd r = meas.y - meas.op.apply(meas.decoder.decode(z));
    const Eigen::VectorXd likelihood_score = inv_s2 * meas.decoder.vjp(z, meas.op.adjoint(r));
    const Eigen::VectorXd drift = likelihood_score - (z - anchor) / t;
    z += zeta * drift + noise_scale * rng.normal_vector(z.size());
  }
  return z;
}

namespace {

Eigen::VectorXd proximal_linear(const Measurement& meas, const Eigen::VectorXd& anchor,
                                double lambda) {
  const Eigen::MatrixXd a = meas.op.materialize();
  Eigen::MatrixXd normal = a.transpose() * a;
  normal.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = a.transpose() * meas.y + lambda * anchor;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) throw NumericFailure("proximal_phase: normal equations not positive definite");
  return llt.solve(rhs);
}

Eigen::VectorXd proximal_cg(const Measurement& meas, const Eigen::VectorXd& anchor, double lambda,
                            double tol, int max_iter) {
  const auto matvec = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return meas.op.adjoint(meas.op.apply(v)) + lambda * v;
  };
  const Eigen::VectorXd b = meas.op.adjoint(meas.y) + lambda * anchor;
  Eigen::VectorXd x = anchor;
  Eigen::VectorXd r = b - matvec(x);
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();
  const double stop = tol * tol * std::max(b.squaredNorm(), 1e-300);
  if (max_iter <= 0) max_iter = 10 * static_cast<int>(b.size());
  for (int it = 0; it < max_iter && rs > stop; ++it) {
    const Eigen::VectorXd ap = matvec(p);
    const double alpha = rs / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  return x;
}

Eigen::VectorXd proximal_gd(const Measurement& meas, const Eigen::VectorXd& anchor, double lambda,
                            const ProximalSolver& solver, int n_iters) {
  Eigen::VectorXd z = anchor;
  double lr = solver.lr0;
  for (int i = 0; i < n_iters; ++i) {
    if (i > 0 && solver.decay_every > 0 && i % solver.decay_every == 0) lr *= solver.decay_factor;
    const Eigen::VectorXd g = data_fidelity_grad(meas, z) + 2.0 * lambda * (z - anchor);
    z -= lr * g;
  }
  return z;
}

}  // namespace

Eigen::VectorXd proximal_phase(const Measurement& meas, const Eigen::VectorXd& anchor, double t,
                               const ProximalSolver& solver, int n_iters) {
  if (!(t > 0.0)) throw std::invalid_argument("proximal_phase: t must be positive");
  if (anchor.size() != meas.latent_dim()) throw std::invalid_argument("proximal_phase: dimension mismatch");
  const double lambda = meas.sigma_n * meas.sigma_n / t;
  switch (solver.kind) {
    case ProximalKind::ExactRidge:
      if (!meas.decoder.is_identity())
        throw UnsupportedOperation("proximal_phase: exact-ridge requires the identity decoder");
      if (!(lambda > 0.0)) throw std::invalid_argument("proximal_phase: exact-ridge needs sigma_n > 0");
      return proximal_linear(meas, anchor, lambda);
    case ProximalKind::ConjugateGradient:
      if (!meas.decoder.is_identity())
        throw UnsupportedOperation("proximal_phase: conjugate-gradient requires the identity decoder");
      return proximal_cg(meas, anchor, lambda, solver.cg_tol, solver.cg_max_iter);
    case ProximalKind::GradientDescent:
      if (n_iters < 0) throw std::invalid_argument("proximal_phase: negative iteration count");
      return proximal_gd(meas, anchor, lambda, solver, n_iters);
  }
  throw std::logic_error("proximal_phase: unreachable");
}

void LPSConfig::validate() const {
  if (n_steps < 1) throw std::invalid_argument("LPSConfig: n_steps must be positive");
  if (alpha < 0) throw std::invalid_argument("LPSConfig: alpha must be nonnegative");
  if (!(zeta > 0.0)) throw std::invalid_argument("LPSConfig: zeta must be positive");
  if (n_langevin.start < 0 || n_langevin.end < 0)
    throw std::invalid_argument("LPSConfig: negative Langevin step count");
  if (n_total < n_langevin.max_steps())
    throw std::invalid_argument("LPSConfig: n_total smaller than the Langevin schedule maximum");
  if (rho.kind == RhoKind::Const && (rho.value < 0.0 || rho.value > 1.0))
    throw std::invalid_argument("LPSConfig: const rho outside [0, 1]");
  if (proximal.kind == ProximalKind::GradientDescent) {
    if (!(proximal.lr0 > 0.0)) throw std::invalid_argument("LPSConfig: lr0 must be positive");
    if (!(proximal.decay_factor > 0.0) || proximal.decay_factor > 1.0)
      throw std::invalid_argument("LPSConfig: decay factor outside (0, 1]");
    if (proximal.decay_every < 1) throw std::invalid_argument("LPSConfig: decay_every must be positive");
  }
}

int Trajectory::num_steps() const {
  std::set<int> steps;
  for (const auto& r : records) steps.insert(r.step);
  return static_cast<int>(steps.size());
}

namespace {

void record_phase(Trajectory* traj, const Measurement& meas, int step, double t, const char* phase,
                  const Eigen::VectorXd& z, const Eigen::VectorXd& anchor,
                  std::optional<double> mse_true = std::nullopt) {
  if (traj == nullptr) return;
  PhaseRecord rec;
  rec.step = step;
  rec.t = t;
  rec.phase = phase;
  rec.residual_sq = residual_sq(meas, z);
  rec.anchor_dist_sq = (z - anchor).squaredNorm();
  rec.mse_true = mse_true;
  traj->records.push_back(std::move(rec));
}

}  // namespace

SamplerState flow_step(const SamplerState& state, const GaussianMixture& prior,
                       const Measurement& meas, const LPSConfig& cfg, RandomStream& rng,
                       Trajectory* trajectory, const Eigen::VectorXd* x_true) {
  const int i = state.step_index;
  if (i < 0 || i >= cfg.n_steps) throw std::invalid_argument("flow_step: step index outside schedule");
  const double grid = double(cfg.n_steps + cfg.alpha);
  const double t = state.t;
  const double t_next = 1.0 - double(i + 1) / grid;

  const Eigen::VectorXd v = velocity(prior, t, state.z);
  const Eigen::VectorXd z0_hat = state.z - t * v;
  const Eigen::VectorXd z1_hat = state.z + (1.0 - t) * v;
  record_phase(trajectory, meas, i, t, "tweedie", z0_hat, z0_hat);

  const double rho = resolve_rho(cfg.rho, t_next);
  const Eigen::VectorXd eps_hat = pcn_renoise(z1_hat, rho, rng);
  record_phase(trajectory, meas, i, t, "pcn", eps_hat, z0_hat);

  const int nl = resolve_n_langevin(cfg.n_langevin, i, cfg.n_steps);
  const Eigen::VectorXd z0_refined = langevin_phase(meas, z0_hat, z0_hat, t, nl, cfg.zeta, rng);
  record_phase(trajectory, meas, i, t, "langevin", z0_refined, z0_hat);

  // remaining budget goes to the proximal consolidation; zero budget skips it
  const int n_prox = cfg.n_total - nl;
  const Eigen::VectorXd z_star =
      n_prox <= 0 ? z0_refined : proximal_phase(meas, z0_refined, t, cfg.proximal, n_prox);
  std::optional<double> mse;
  if (x_true != nullptr)
    mse = (meas.decoder.decode(z_star) - *x_true).squaredNorm() / double(x_true->size());
  record_phase(trajectory, meas, i, t, "proximal", z_star, z0_refined, mse);

  SamplerState next;
  next.t = t_next;
  next.z = (1.0 - t_next) * z_star + t_next * eps_hat;
  next.x0_anchor = z0_refined;
  next.x1_hat = eps_hat;
  next.z_star = z_star;
  next.step_index = i + 1;
  record_phase(trajectory, meas, i, t, "interp", next.z, z0_refined);
  return next;
}

SolveResult solve(const Measurement& meas, const GaussianMixture& prior, const LPSConfig& cfg,
                  std::uint64_t instance_index, const Eigen::VectorXd* x_true) {
  cfg.validate();
  if (prior.dim() != meas.latent_dim()) throw std::invalid_argument("solve: prior/measurement dimension mismatch");
  if (!(meas.sigma_n > 0.0)) throw std::invalid_argument("solve: sigma_n must be positive (use a small value for noiseless problems)");
  if (x_true != nullptr && x_true->size() != meas.decoder.dim())
    throw std::invalid_argument("solve: x_true dimension mismatch");

  RandomStream rng = derive_stream(cfg.seed, "sampler", instance_index);
  SamplerState state;
  state.t = 1.0;
  state.z = rng.normal_vector(prior.dim());
  state.x0_anchor = state.z;
  state.x1_hat = state.z;
  state.z_star = state.z;
  state.step_index = 0;

  SolveResult out;
  for (int i = 0; i < cfg.n_steps; ++i)
    state = flow_step(state, prior, meas, cfg, rng, &out.trajectory, x_true);

  out.z_star = state.z_star;
  out.reconstruction = meas.decoder.decode(state.z_star);
  return out;
}

}  // namespace flowlps
