// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowlps/sampler.hpp"

namespace flowlps {

// Ablation presets. Each differs from the full sampler only through its
// configuration, so comparisons isolate one mechanism at a time.

/// All refinement budget on the proximal solve (no Langevin exploration).
LPSConfig preset_pure_proximal(LPSConfig base);

/// All refinement budget on Langevin (proximal skipped), with full re-noising.
LPSConfig preset_pure_langevin(LPSConfig base);

/// No measurement coupling at all: plain flow integration of the prior.
LPSConfig preset_unconditional(LPSConfig base);

struct SingleGradientResult {
  Eigen::VectorXd reconstruction;
  Eigen::VectorXd x0_hat;
  Trajectory trajectory;
};

/// Guidance-style baseline: per flow step, one explicit gradient step on the
/// data term applied to the endpoint estimate, then re-interpolation with the
/// model-predicted noise (no re-noising). step_size == 0 reduces to the plain
/// flow integration bit-for-bit.
SingleGradientResult single_gradient_solve(const Measurement& meas, const GaussianMixture& prior,
                                           int n_steps, double step_size, int alpha = 3,
                                           std::uint64_t seed = 0, std::uint64_t instance_index = 0,
                                           const Eigen::VectorXd* x_true = nullptr);

}  // namespace flowlps
