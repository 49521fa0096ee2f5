// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace flowlps {

// Numerical breakdown: non-SPD matrix after jitter, divergent fixed-point iteration.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// EM could not produce a valid mixture within its restart budget.
struct FitFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation requested on inputs it is not defined for
// (e.g. a closed-form ridge solve through a nonlinear decoder).
struct UnsupportedOperation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem error while reading or writing artifacts.
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace flowlps
