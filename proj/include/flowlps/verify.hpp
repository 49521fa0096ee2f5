// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace flowlps {

enum class VerifyLevel { Fast, Full };

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Oracle-backed invariant battery. Fast runs the deterministic algebraic
// checks; Full adds the large-sample distributional ones. Every check is
// self-contained and reports a one-line diagnostic.
std::vector<CheckResult> verify_suite(VerifyLevel level);

}  // namespace flowlps
