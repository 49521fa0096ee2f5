// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <string>

#include "flowlps/forward.hpp"
#include "flowlps/gmm.hpp"
#include "flowlps/rng.hpp"

namespace flowlps {

// Synthetic signal family used by the benchmark harness. The generating
// mixture has three components, one per template:
//   1. a single smooth bump,
//   2. a smooth step edge,
//   3. a ramp with a secondary bump (1D) / two separated bumps (2D).
// Template values stay inside [0.1, 0.9]; fluctuations around each template
// follow a squared-exponential kernel in normalized coordinates with a small
// diagonal nugget, so each coordinate is marginally N(template_i, sigma^2)
// with sigma = sqrt(kBlobMarginalStd^2 + kBlobNugget).
inline constexpr int kBlobComponents = 3;
inline constexpr double kBlobMarginalStd = 0.06;
inline constexpr double kBlobLengthScale = 0.15;
inline constexpr double kBlobNugget = 1e-4;
inline constexpr int kMaxSignalDim = 256;

// The exact mixture behind generate_blob_dataset. Total dimension <= 256.
GaussianMixture make_blob_prior(const SignalShape& shape);

struct BlobDataset {
  Eigen::MatrixXd samples;  // n rows, one signal per row
  GaussianMixture prior;    // exact generating mixture
  SignalShape shape;
};

// Draw n signals from the blob mixture. n = 0 yields an empty sample matrix
// with a still-valid prior. Identical stream state gives identical output.
BlobDataset generate_blob_dataset(const SignalShape& shape, int n, RandomStream& rng);

// Plain CSV of raw rows (no header), one signal per line.
void save_dataset_csv(const std::string& path, const Eigen::MatrixXd& samples);
Eigen::MatrixXd load_dataset_csv(const std::string& path);

}  // namespace flowlps
