// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <vector>

#include "flowlps/rng.hpp"

namespace flowlps {

/// Layout of a flattened signal: a 1-D signal of length n is vec(n), a 2-D
/// image is image(h, w) stored row-major.
struct SignalShape {
  int height = 0;
  int width = 1;
  bool is_2d = false;

  static SignalShape vec(int n) { return {1, n, false}; }
  static SignalShape image(int h, int w) { return {h, w, true}; }
  int total() const { return height * width; }
  bool operator==(const SignalShape& o) const {
    return height == o.height && width == o.width && is_2d == o.is_2d;
  }
};

/// Normalized Gaussian kernel of odd length (sums to 1).
Eigen::VectorXd gaussian_kernel(int size, double sigma);

/// Linear measurement operator with matched adjoint.
///
/// Kinds: identity, coordinate mask, circular (wrap-around) blur applied
/// separably on each axis, block-average downsampling, and an arbitrary dense
/// matrix. apply/adjoint are exact adjoints of one another; materialize()
/// builds the dense matrix from the operator's structure.
class ForwardOperator {
 public:
  enum class Kind { Identity, Mask, CircularBlur, Downsample, Dense };

  static ForwardOperator identity(int dim);
  /// keep lists the observed coordinates; must be nonempty, in range, no duplicates.
  static ForwardOperator mask(int dim, std::vector<int> keep);
  static ForwardOperator circular_blur(const Eigen::VectorXd& kernel, const SignalShape& shape);
  static ForwardOperator downsample(int factor, const SignalShape& shape);
  static ForwardOperator dense(const Eigen::MatrixXd& a);

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd adjoint(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd materialize() const;

  Kind kind() const { return kind_; }
  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  const std::vector<int>& mask_keep() const { return keep_; }
  const SignalShape& shape() const { return shape_; }

 private:
  ForwardOperator() = default;

  Kind kind_ = Kind::Identity;
  int in_dim_ = 0;
  int out_dim_ = 0;
  SignalShape shape_;
  std::vector<int> keep_;     // Mask
  Eigen::VectorXd kernel_;    // CircularBlur
  int factor_ = 1;            // Downsample
  Eigen::MatrixXd a_;         // Dense
};

/// Latent-to-signal decoder. identity passes z through; smooth adds a bounded
/// elementwise nonlinearity z + gain * tanh(W z + b), whose Jacobian
/// I + gain * diag(1 - tanh^2) W stays well conditioned for moderate gain.
class Decoder {
 public:
  static Decoder identity(int dim);
  static Decoder smooth(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, double gain);

  Eigen::VectorXd decode(const Eigen::VectorXd& z) const;
  /// Vector-Jacobian product J(z)^T u (analytic).
  Eigen::VectorXd vjp(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const;

  bool is_identity() const { return identity_; }
  int dim() const { return dim_; }
  double gain() const { return gain_; }

 private:
  Decoder() = default;

  bool identity_ = true;
  int dim_ = 0;
  double gain_ = 0.0;
  Eigen::MatrixXd w_;
  Eigen::VectorXd b_;
};

/// One inverse problem: y observed through op after decoding, with isotropic
/// Gaussian noise of deviation sigma_n.
struct Measurement {
  Eigen::VectorXd y;
  ForwardOperator op;
  Decoder decoder;
  double sigma_n = 0.0;

  Measurement(Eigen::VectorXd y_in, ForwardOperator op_in, Decoder dec_in, double sigma);
  int latent_dim() const { return decoder.dim(); }
};

/// y = op(decoder(x0_true)) + sigma_n * eps with eps standard normal.
Measurement simulate_measurement(const Eigen::VectorXd& x0_true, const ForwardOperator& op,
                                 const Decoder& decoder, double sigma_n, RandomStream& rng);

/// Squared data residual ||y - op(decoder(z))||^2.
double residual_sq(const Measurement& meas, const Eigen::VectorXd& z);

/// Gradient of the squared residual with respect to z:
/// -2 J(z)^T A^T (y - A D(z)). Note the objective carries no 1/2 factor.
Eigen::VectorXd data_fidelity_grad(const Measurement& meas, const Eigen::VectorXd& z);

}  // namespace flowlps
