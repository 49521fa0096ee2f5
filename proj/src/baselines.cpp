// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/baselines.hpp"

#include <stdexcept>

namespace flowlps {

LPSConfig preset_pure_proximal(LPSConfig base) {
  base.n_langevin = LangevinSchedule::fixed(0);
  return base;
}

LPSConfig preset_pure_langevin(LPSConfig base) {
  base.n_langevin = LangevinSchedule::fixed(base.n_total);
  base.rho = RhoSchedule::zero();
  return base;
}

LPSConfig preset_unconditional(LPSConfig base) {
  base.n_langevin = LangevinSchedule::fixed(0);
  base.n_total = 0;
  base.rho = RhoSchedule::constant(1.0);
  return base;
}

SingleGradientResult single_gradient_solve(const Measurement& meas, const GaussianMixture& prior,
                                           int n_steps, double step_size, int alpha,
                                           std::uint64_t seed, std::uint64_t instance_index,
                                           const Eigen::VectorXd* x_true) {
  if (step_size < 0.0) throw std::invalid_argument("single_gradient_solve: negative step size");
  if (prior.dim() != meas.latent_dim())
    throw std::invalid_argument("single_gradient_solve: prior/measurement dimension mismatch");
  const std::vector<double> ts = time_schedule(n_steps, alpha);

  RandomStream rng = derive_stream(seed, "sampler", instance_index);
  Eigen::VectorXd z = rng.normal_vector(prior.dim());
  SingleGradientResult out;
  Eigen::VectorXd x0_hat = z;

  for (int i = 0; i < n_steps; ++i) {
    const double t = ts[static_cast<size_t>(i)];
    const double t_next = ts[static_cast<size_t>(i) + 1];
    const Eigen::VectorXd v = velocity(prior, t, z);
    x0_hat = z - t * v;
    const Eigen::VectorXd x1_hat = z + (1.0 - t) * v;

    auto push = [&](const char* phase, const Eigen::VectorXd& state, const Eigen::VectorXd& anchor) {
      PhaseRecord rec;
      rec.step = i;
      rec.t = t;
      rec.phase = phase;
      rec.residual_sq = residual_sq(meas, state);
      rec.anchor_dist_sq = (state - anchor).squaredNorm();
      out.trajectory.records.push_back(std::move(rec));
    };
    push("tweedie", x0_hat, x0_hat);

    const Eigen::VectorXd g = data_fidelity_grad(meas, x0_hat);
    x0_hat -= step_size * g;
    if (x_true != nullptr) {
      PhaseRecord rec;
      rec.step = i;
      rec.t = t;
      rec.phase = "proximal";
      rec.residual_sq = residual_sq(meas, x0_hat);
      rec.anchor_dist_sq = (step_size * g).squaredNorm();
      rec.mse_true = (meas.decoder.decode(x0_hat) - *x_true).squaredNorm() / double(x_true->size());
      out.trajectory.records.push_back(std::move(rec));
    } else {
      push("proximal", x0_hat, x0_hat);
    }

    z = (1.0 - t_next) * x0_hat + t_next * x1_hat;
    push("interp", z, x0_hat);
  }

  out.x0_hat = x0_hat;
  out.reconstruction = meas.decoder.decode(x0_hat);
  return out;
}

}  // namespace flowlps
