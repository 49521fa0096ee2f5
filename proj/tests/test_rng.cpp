// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "flowlps/rng.hpp"

using flowlps::RandomStream;
using flowlps::derive_stream;

TEST_CASE("identical seeds give identical streams") {
  RandomStream a(123456789);
  RandomStream b(123456789);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  for (int i = 0; i < 1000; ++i) CHECK(a.normal() == b.normal());
  {
    const Eigen::VectorXd va = a.normal_vector(16);
    const Eigen::VectorXd vb = b.normal_vector(16);
    CHECK((va.array() == vb.array()).all());
  }
}

TEST_CASE("uniform stays inside [0, 1)") {
  RandomStream rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal draws have standard moments") {
  RandomStream rng(2026);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  // 4 standard errors of the respective estimators
  CHECK(std::abs(mean) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / double(n)));
}

TEST_CASE("categorical frequencies follow the probabilities") {
  RandomStream rng(99);
  Eigen::VectorXd p(3);
  p << 0.2, 0.3, 0.5;
  const int n = 100000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) ++counts[rng.categorical(p)];
  for (int k = 0; k < 3; ++k) {
    const double freq = double(counts[k]) / n;
    const double se = std::sqrt(p[k] * (1.0 - p[k]) / n);
    CHECK(std::abs(freq - p[k]) < 4.0 * se);
  }
}

TEST_CASE("derived streams separate by role and index") {
  RandomStream a = derive_stream(42, "noise", 0);
  RandomStream b = derive_stream(42, "noise", 0);
  CHECK(a.next_u64() == b.next_u64());

  RandomStream c = derive_stream(42, "noise", 1);
  RandomStream d = derive_stream(42, "sampler", 0);
  RandomStream e = derive_stream(43, "noise", 0);
  RandomStream base = derive_stream(42, "noise", 0);
  const std::uint64_t v = base.next_u64();
  CHECK(c.next_u64() != v);
  CHECK(d.next_u64() != v);
  CHECK(e.next_u64() != v);
}

TEST_CASE("normal_vector matches scalar draws") {
  RandomStream a(5);
  RandomStream b(5);
  const Eigen::VectorXd v = a.normal_vector(9);
  for (int i = 0; i < 9; ++i) CHECK(v[i] == b.normal());
}
