// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <string>

#include "flowlps/forward.hpp"

namespace flowlps {

// Binary 8-bit graymap (P5, maxval 255). Values are clamped to [0, peak] and
// scaled so that peak maps to 255. 1-D signals render as a single-row image.
// Identical inputs produce identical bytes.
void write_pgm(const std::string& path, const Eigen::VectorXd& values, const SignalShape& shape,
               double peak);

}  // namespace flowlps
