// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowlps/forward.hpp"
#include "flowlps/gmm.hpp"
#include "flowlps/rng.hpp"
#include "flowlps/sampler.hpp"

namespace flowlps {

struct PriorSpec {
  enum class Mode { Blob, File, Inline, Fit };
  Mode mode = Mode::Blob;
  std::string path;  // File: mixture JSON. Fit: optional sample CSV.
  int fit_k = 3;
  int fit_n = 500;  // Fit without a data file: this many generated samples
  std::optional<GaussianMixture> inline_gmm;
};

struct OperatorSpec {
  // identity | mask | random-mask | box-mask | gaussian-blur | motion-blur | downsample
  std::string kind = "identity";
  std::vector<int> keep;   // mask: explicit observed coordinates
  double keep_frac = 0.3;  // random-mask: observed fraction (0.3 keeps 30%)
  int kernel_size = 5;
  double kernel_sigma = 1.0;
  int factor = 2;
};

struct DecoderSpec {
  std::string kind = "identity";  // identity | smooth
  double gain = 0.5;
  std::uint64_t seed = 0;  // smooth: fixed weights derived from this seed
};

struct SolverSpec {
  std::string name;  // CSV label; defaults to the preset name
  // flowlps | pure-proximal | pure-langevin | unconditional | single-gradient
  std::string preset = "flowlps";
  LPSConfig lps;
  int sg_steps = 40;  // single-gradient only
  double sg_step_size = 1.0;
  int sg_alpha = 3;
};

struct SweepSpec {
  std::vector<LangevinSchedule> n_langevin;
  std::vector<RhoSchedule> rho;
  std::vector<int> n_total;
  bool empty() const { return n_langevin.empty() && rho.empty() && n_total.empty(); }
};

struct ExperimentConfig {
  std::string task = "random-inpaint";
  SignalShape shape = SignalShape::image(8, 8);
  PriorSpec prior;
  OperatorSpec op;
  DecoderSpec decoder;
  double sigma_n = 0.03;
  std::vector<SolverSpec> solvers;  // empty: one solver with the task defaults
  SweepSpec sweep;
  int instances = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  double peak = 1.0;
  bool timing = false;  // false writes wall_s = 0 so artifacts stay byte-stable

  void validate() const;
};

// Task defaults. Recognized tasks: box-inpaint, random-inpaint, gaussian-deblur,
// motion-deblur, super-resolution.
ExperimentConfig default_config_for_task(const std::string& task);
LPSConfig default_lps_for_task(const std::string& task);

// JSON with // comments allowed; unknown keys are rejected.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

// "zero" | "const:<v>" | "one-minus-sigma" | "sqrt-one-minus-sigma"
RhoSchedule parse_rho(const std::string& text);
// "6" -> fixed, "6->1" -> linear decay
LangevinSchedule parse_langevin(const std::string& text);

// {"dim": d, "components": [{"weight", "mean", "cov" (row-major)}]}
void save_prior_json(const std::string& path, const GaussianMixture& gmm);
GaussianMixture load_prior_json(const std::string& path);

// mask_rng feeds random-mask coordinate choice only; required for that kind.
ForwardOperator build_operator(const OperatorSpec& spec, const SignalShape& shape,
                               RandomStream* mask_rng);
Decoder build_decoder(const DecoderSpec& spec, int dim);

// Smooth decoder with fixed pseudo-random weights: rows of W scale like
// 1/sqrt(dim) so the tanh stays in its active range.
Decoder make_smooth_decoder(int dim, double gain, std::uint64_t seed);

struct ResolvedPriors {
  GaussianMixture truth;   // generates ground-truth signals
  GaussianMixture solver;  // handed to solvers (differs only in fit mode)
};
ResolvedPriors resolve_priors(const ExperimentConfig& cfg);

// Cross product of the sweep axes applied to every base solver; names gain
// one "/axis=value" suffix per swept axis. Empty sweep returns base unchanged.
std::vector<SolverSpec> expand_sweep(const std::vector<SolverSpec>& base, const SweepSpec& sweep);

}  // namespace flowlps
