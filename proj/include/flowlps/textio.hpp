// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace flowlps {

// Shortest round-trip decimal form; identical bytes for identical doubles,
// which the reproducibility guarantees of the artifact writers rely on.
std::string format_double(double v);

// Strict full-token parse; throws std::invalid_argument on trailing garbage.
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace flowlps
