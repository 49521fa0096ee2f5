// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/pgm.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "flowlps/errors.hpp"

namespace flowlps {

void write_pgm(const std::string& path, const Eigen::VectorXd& values, const SignalShape& shape,
               double peak) {
  if (values.size() != shape.total())
    throw std::invalid_argument("write_pgm: value count does not match shape");
  if (!(peak > 0.0)) throw std::invalid_argument("write_pgm: peak must be positive");

  const int h = shape.is_2d ? shape.height : 1;
  const int w = shape.is_2d ? shape.width : shape.total();

  std::vector<std::uint8_t> bytes(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    double v = values[i];
    if (v < 0.0) v = 0.0;
    if (v > peak) v = peak;
    bytes[i] = static_cast<std::uint8_t>(std::lround(v / peak * 255.0));
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("write_pgm: cannot open " + path);
  out << "P5\n" << w << ' ' << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("write_pgm: write failed for " + path);
}

}  // namespace flowlps
