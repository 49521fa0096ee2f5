// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowlps/flow.hpp"
#include "flowlps/forward.hpp"

namespace flowlps {

/// Uniform reverse-time grid t_i = 1 - i/(n_steps + alpha), i = 0..n_steps.
/// The trailing alpha/(n_steps + alpha) of the interval is deliberately never
/// integrated: the final state stays at t = alpha/(n_steps + alpha) > 0.
std::vector<double> time_schedule(int n_steps, int alpha);

/// Mixing coefficient for the per-step re-noising of the predicted noise.
///   zero                 -> 0 (full fresh noise)
///   const(c)             -> c
///   one-minus-sigma      -> 1 - t_next
///   sqrt-one-minus-sigma -> sqrt(1 - t_next)   (default)
/// The noise deviation at time t is t itself, so schedules are written
/// directly in terms of the next grid time.
enum class RhoKind { Zero, Const, OneMinusSigma, SqrtOneMinusSigma };

struct RhoSchedule {
  RhoKind kind = RhoKind::SqrtOneMinusSigma;
  double value = 0.0;  // Const only

  static RhoSchedule zero() { return {RhoKind::Zero, 0.0}; }
  static RhoSchedule constant(double c) { return {RhoKind::Const, c}; }
  static RhoSchedule one_minus_sigma() { return {RhoKind::OneMinusSigma, 0.0}; }
  static RhoSchedule sqrt_one_minus_sigma() { return {RhoKind::SqrtOneMinusSigma, 0.0}; }
};

double resolve_rho(const RhoSchedule& schedule, double t_next);
std::string rho_schedule_name(const RhoSchedule& schedule);

/// Langevin iteration count per flow step: fixed, or rounded linear decay
/// from `start` at step 0 to `end` at the last step.
struct LangevinSchedule {
  int start = 6;
  int end = 6;

  static LangevinSchedule fixed(int k) { return {k, k}; }
  static LangevinSchedule linear_decay(int from, int to) { return {from, to}; }
  bool is_fixed() const { return start == end; }
  int max_steps() const { return start > end ? start : end; }
};

int resolve_n_langevin(const LangevinSchedule& schedule, int step_index, int n_steps);
std::string langevin_schedule_name(const LangevinSchedule& schedule);

/// One pCN step around the predicted noise: rho * x1_hat + sqrt(1-rho^2) * eps.
/// Leaves N(0, I) invariant for every rho; rho == 1 returns x1_hat unchanged
/// and rho == 0 returns a fresh draw.
Eigen::VectorXd pcn_renoise(const Eigen::VectorXd& x1_hat, double rho, RandomStream& rng);

/// Unadjusted Langevin iterations on the measurement-tilted Gaussian surrogate
/// around `anchor` (deviation^2 = t):
///   z += zeta * [ J^T A^T (y - A D(z)) / sigma_n^2 - (z - anchor)/t ]
///        + sqrt(2 zeta) * eps.
/// The anchor is frozen for the whole phase. n_steps == 0 returns z_init.
Eigen::VectorXd langevin_phase(const Measurement& meas, const Eigen::VectorXd& anchor,
                               const Eigen::VectorXd& z_init, double t, int n_steps, double zeta,
                               RandomStream& rng);

enum class ProximalKind { ExactRidge, ConjugateGradient, GradientDescent };

struct ProximalSolver {
  ProximalKind kind = ProximalKind::ExactRidge;
  double cg_tol = 1e-10;
  int cg_max_iter = 0;        // 0 -> 10 * latent dim
  double lr0 = 0.1;
  double decay_factor = 0.65;
  int decay_every = 10;

  static ProximalSolver exact_ridge() { return {}; }
  static ProximalSolver conjugate_gradient(double tol = 1e-10, int max_iter = 0) {
    ProximalSolver s;
    s.kind = ProximalKind::ConjugateGradient;
    s.cg_tol = tol;
    s.cg_max_iter = max_iter;
    return s;
  }
  static ProximalSolver gradient_descent(double lr0 = 0.1, double factor = 0.65, int every = 10) {
    ProximalSolver s;
    s.kind = ProximalKind::GradientDescent;
    s.lr0 = lr0;
    s.decay_factor = factor;
    s.decay_every = every;
    return s;
  }
};

/// argmin_z ||y - A D(z)||^2 + (sigma_n^2 / t) ||z - anchor||^2.
/// exact-ridge and conjugate-gradient solve the linear normal equations and
/// require the identity decoder; gradient-descent runs n_iters steps from the
/// anchor with the solver's step-decay schedule and handles any decoder.
Eigen::VectorXd proximal_phase(const Measurement& meas, const Eigen::VectorXd& anchor, double t,
                               const ProximalSolver& solver, int n_iters);

struct LPSConfig {
  int n_steps = 40;
  int alpha = 3;
  LangevinSchedule n_langevin = LangevinSchedule::fixed(6);
  int n_total = 15;  // per-step refinement budget: Langevin steps + descent iterations
  double zeta = 1e-4;
  RhoSchedule rho;
  ProximalSolver proximal;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One line per phase per flow step.
struct PhaseRecord {
  int step = 0;
  double t = 0.0;
  std::string phase;  // tweedie | pcn | langevin | proximal | interp
  double residual_sq = 0.0;
  double anchor_dist_sq = 0.0;
  std::optional<double> mse_true;
};

struct Trajectory {
  std::vector<PhaseRecord> records;
  int num_steps() const;
};

struct SamplerState {
  double t = 1.0;
  Eigen::VectorXd z;          // current interpolation-path state
  Eigen::VectorXd x0_anchor;  // Langevin-refined endpoint estimate of the last step
  Eigen::VectorXd x1_hat;     // re-noised noise estimate of the last step
  Eigen::VectorXd z_star;     // last proximal solution
  int step_index = 0;
};

/// One flow step: velocity -> endpoint estimates -> pCN re-noise -> Langevin
/// refinement -> proximal consolidation -> re-interpolation at the next grid
/// time. Records one trajectory line per phase when a sink is given.
SamplerState flow_step(const SamplerState& state, const GaussianMixture& prior,
                       const Measurement& meas, const LPSConfig& cfg, RandomStream& rng,
                       Trajectory* trajectory = nullptr, const Eigen::VectorXd* x_true = nullptr);

struct SolveResult {
  Eigen::VectorXd reconstruction;  // decoded final proximal solution
  Eigen::VectorXd z_star;
  Trajectory trajectory;
};

/// Full reverse pass from a fresh standard-normal state at t = 1. The
/// reconstruction decodes the final proximal solution (the state never reaches
/// t = 0). Randomness comes from derive_stream(cfg.seed, "sampler", instance).
SolveResult solve(const Measurement& meas, const GaussianMixture& prior, const LPSConfig& cfg,
                  std::uint64_t instance_index = 0, const Eigen::VectorXd* x_true = nullptr);

}  // namespace flowlps
