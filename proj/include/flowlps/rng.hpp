// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace flowlps {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Deterministic random stream. All randomness in the library flows through
/// streams derived from a master seed, so any run is reproducible bit-for-bit
/// from its seed alone. Normal draws use Box-Muller on top of mt19937_64 to
/// keep the byte sequence independent of standard-library internals.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal draw (Box-Muller, second value cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // first uniform shifted into (0, 1] so the log is finite
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Eigen::VectorXd normal_vector(Eigen::Index d) {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

  /// Index draw from already-normalized probabilities.
  int categorical(const Eigen::VectorXd& probs) {
    const double u = uniform();
    double cum = 0.0;
    for (Eigen::Index k = 0; k < probs.size(); ++k) {
      cum += probs[k];
      if (u < cum) return static_cast<int>(k);
    }
    return static_cast<int>(probs.size() - 1);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Hierarchical derivation: (master seed, role tag, instance index) -> stream.
/// Distinct roles or indices give statistically independent streams, so e.g.
/// measurement noise and sampler noise never share state.
inline RandomStream derive_stream(std::uint64_t master_seed, std::string_view role,
                                  std::uint64_t index = 0) {
  const std::uint64_t mixed =
      detail::splitmix64(detail::splitmix64(master_seed ^ detail::fnv1a64(role)) ^
                         detail::splitmix64(index + 0x51ed2701ULL));
  return RandomStream(mixed);
}

}  // namespace flowlps
