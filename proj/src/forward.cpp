// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/forward.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "flowlps/errors.hpp"

namespace flowlps {

namespace {

inline int wrap(int a, int n) { return ((a % n) + n) % n; }

// Circular 1-D pass shared by apply (convolution) and adjoint (correlation).
void blur_line(const Eigen::VectorXd& kernel, const double* x, int n, int stride, double* out,
               bool adjoint) {
  const int len = static_cast<int>(kernel.size());
  const int c = (len - 1) / 2;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < len; ++j) {
      const int src = adjoint ? wrap(i + j - c, n) : wrap(i - j + c, n);
      acc += kernel[j] * x[src * stride];
    }
    out[i * stride] = acc;
  }
}

Eigen::VectorXd blur_signal(const Eigen::VectorXd& kernel, const SignalShape& shape,
                            const Eigen::VectorXd& x, bool adjoint) {
  if (!shape.is_2d) {
    Eigen::VectorXd out(x.size());
    blur_line(kernel, x.data(), static_cast<int>(x.size()), 1, out.data(), adjoint);
    return out;
  }
  const int h = shape.height, w = shape.width;
  Eigen::VectorXd tmp(x.size()), out(x.size());
  for (int r = 0; r < h; ++r)  // along rows (contiguous)
    blur_line(kernel, x.data() + r * w, w, 1, tmp.data() + r * w, adjoint);
  for (int col = 0; col < w; ++col)  // along columns (strided)
    blur_line(kernel, tmp.data() + col, h, w, out.data() + col, adjoint);
  return out;
}

}  // namespace

Eigen::VectorXd gaussian_kernel(int size, double sigma) {
  if (size < 1 || size % 2 == 0) throw std::invalid_argument("gaussian_kernel: size must be odd and positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  Eigen::VectorXd k(size);
  const int c = (size - 1) / 2;
  for (int i = 0; i < size; ++i) {
    const double d = i - c;
    k[i] = std::exp(-0.5 * d * d / (sigma * sigma));
  }
  return k / k.sum();
}

ForwardOperator ForwardOperator::identity(int dim) {
  if (dim < 1) throw std::invalid_argument("identity operator: dim must be positive");
  ForwardOperator op;
  op.kind_ = Kind::Identity;
  op.in_dim_ = op.out_dim_ = dim;
  op.shape_ = SignalShape::vec(dim);
  return op;
}

ForwardOperator ForwardOperator::mask(int dim, std::vector<int> keep) {
  if (dim < 1) throw std::invalid_argument("mask operator: dim must be positive");
  if (keep.empty()) throw std::invalid_argument("mask operator: empty keep set observes nothing");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw std::invalid_argument("mask operator: duplicate keep index");
  if (keep.front() < 0 || keep.back() >= dim)
    throw std::invalid_argument("mask operator: keep index out of range");
  ForwardOperator op;
  op.kind_ = Kind::Mask;
  op.in_dim_ = dim;
  op.out_dim_ = static_cast<int>(keep.size());
  op.shape_ = SignalShape::vec(dim);
  op.keep_ = std::move(keep);
  return op;
}

ForwardOperator ForwardOperator::circular_blur(const Eigen::VectorXd& kernel,
                                               const SignalShape& shape) {
  if (kernel.size() < 1 || kernel.size() % 2 == 0)
    throw std::invalid_argument("circular_blur: kernel length must be odd and positive");
  const int min_axis = shape.is_2d ? std::min(shape.height, shape.width) : shape.total();
  if (shape.total() < 1 || kernel.size() > min_axis)
    throw std::invalid_argument("circular_blur: kernel longer than signal axis");
  ForwardOperator op;
  op.kind_ = Kind::CircularBlur;
  op.in_dim_ = op.out_dim_ = shape.total();
  op.shape_ = shape;
  op.kernel_ = kernel;
  return op;
}

ForwardOperator ForwardOperator::downsample(int factor, const SignalShape& shape) {
  if (factor < 1) throw std::invalid_argument("downsample: factor must be positive");
  if (shape.total() < 1) throw std::invalid_argument("downsample: empty shape");
  if (shape.is_2d) {
    if (shape.height % factor != 0 || shape.width % factor != 0)
      throw std::invalid_argument("downsample: shape not divisible by factor");
  } else if (shape.total() % factor != 0) {
    throw std::invalid_argument("downsample: length not divisible by factor");
  }
  ForwardOperator op;
  op.kind_ = Kind::Downsample;
  op.in_dim_ = shape.total();
  op.out_dim_ = shape.is_2d ? (shape.height / factor) * (shape.width / factor)
                            : shape.total() / factor;
  op.shape_ = shape;
  op.factor_ = factor;
  return op;
}

ForwardOperator ForwardOperator::dense(const Eigen::MatrixXd& a) {
  if (a.rows() < 1 || a.cols() < 1) throw std::invalid_argument("dense operator: empty matrix");
  ForwardOperator op;
  op.kind_ = Kind::Dense;
  op.in_dim_ = static_cast<int>(a.cols());
  op.out_dim_ = static_cast<int>(a.rows());
  op.shape_ = SignalShape::vec(op.in_dim_);
  op.a_ = a;
  return op;
}

Eigen::VectorXd ForwardOperator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != in_dim_) throw std::invalid_argument("apply: dimension mismatch");
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Mask: {
      Eigen::VectorXd out(out_dim_);
      for (int i = 0; i < out_dim_; ++i) out[i] = x[keep_[static_cast<size_t>(i)]];
      return out;
    }
    case Kind::CircularBlur:
      return blur_signal(kernel_, shape_, x, false);
    case Kind::Downsample: {
      Eigen::VectorXd out(out_dim_);
      if (shape_.is_2d) {
        const int w = shape_.width, ow = shape_.width / factor_;
        const double inv = 1.0 / (factor_ * factor_);
        const int oh = shape_.height / factor_;
        for (int r = 0; r < oh; ++r)
          for (int c = 0; c < ow; ++c) {
            double acc = 0.0;
            for (int dr = 0; dr < factor_; ++dr)
              for (int dc = 0; dc < factor_; ++dc)
                acc += x[(r * factor_ + dr) * w + c * factor_ + dc];
            out[r * ow + c] = acc * inv;
          }
      } else {
        const double inv = 1.0 / factor_;
        for (int i = 0; i < out_dim_; ++i) {
          double acc = 0.0;
          for (int j = 0; j < factor_; ++j) acc += x[i * factor_ + j];
          out[i] = acc * inv;
        }
      }
      return out;
    }
    case Kind::Dense:
      return a_ * x;
  }
  throw std::logic_error("apply: unreachable");
}

Eigen::VectorXd ForwardOperator::adjoint(const Eigen::VectorXd& u) const {
  if (u.size() != out_dim_) throw std::invalid_argument("adjoint: dimension mismatch");
  switch (kind_) {
    case Kind::Identity:
      return u;
    case Kind::Mask: {
      Eigen::VectorXd out = Eigen::VectorXd::Zero(in_dim_);
      for (int i = 0; i < out_dim_; ++i) out[keep_[static_cast<size_t>(i)]] = u[i];
      return out;
    }
    case Kind::CircularBlur:
      return blur_signal(kernel_, shape_, u, true);
    case Kind::Downsample: {
      Eigen::VectorXd out(in_dim_);
      if (shape_.is_2d) {
        const int w = shape_.width, ow = shape_.width / factor_;
        const double inv = 1.0 / (factor_ * factor_);
        for (int r = 0; r < shape_.height; ++r)
          for (int c = 0; c < w; ++c)
            out[r * w + c] = u[(r / factor_) * ow + c / factor_] * inv;
      } else {
        const double inv = 1.0 / factor_;
        for (int i = 0; i < in_dim_; ++i) out[i] = u[i / factor_] * inv;
      }
      return out;
    }
    case Kind::Dense:
      return a_.transpose() * u;
  }
  throw std::logic_error("adjoint: unreachable");
}

Eigen::MatrixXd ForwardOperator::materialize() const {
  switch (kind_) {
    case Kind::Identity:
      return Eigen::MatrixXd::Identity(out_dim_, in_dim_);
    case Kind::Mask: {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(out_dim_, in_dim_);
      for (int i = 0; i < out_dim_; ++i) a(i, keep_[static_cast<size_t>(i)]) = 1.0;
      return a;
    }
    case Kind::CircularBlur: {
      const int len = static_cast<int>(kernel_.size());
      const int c = (len - 1) / 2;
      if (!shape_.is_2d) {
        const int n = in_dim_;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < len; ++j) a(i, wrap(i - j + c, n)) += kernel_[j];
        return a;
      }
      const int h = shape_.height, w = shape_.width;
      Eigen::MatrixXd bh = Eigen::MatrixXd::Zero(h, h), bw = Eigen::MatrixXd::Zero(w, w);
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < len; ++j) bh(i, wrap(i - j + c, h)) += kernel_[j];
      for (int i = 0; i < w; ++i)
        for (int j = 0; j < len; ++j) bw(i, wrap(i - j + c, w)) += kernel_[j];
      Eigen::MatrixXd a(in_dim_, in_dim_);  // kron(bh, bw) for row-major flattening
      for (int r = 0; r < h; ++r)
        for (int rp = 0; rp < h; ++rp)
          for (int col = 0; col < w; ++col)
            for (int cp = 0; cp < w; ++cp) a(r * w + col, rp * w + cp) = bh(r, rp) * bw(col, cp);
      return a;
    }
    case Kind::Downsample: {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(out_dim_, in_dim_);
      if (shape_.is_2d) {
        const int w = shape_.width, ow = shape_.width / factor_;
        const double inv = 1.0 / (factor_ * factor_);
        const int oh = shape_.height / factor_;
        for (int r = 0; r < oh; ++r)
          for (int c = 0; c < ow; ++c)
            for (int dr = 0; dr < factor_; ++dr)
              for (int dc = 0; dc < factor_; ++dc)
                a(r * ow + c, (r * factor_ + dr) * w + c * factor_ + dc) = inv;
      } else {
        const double inv = 1.0 / factor_;
        for (int i = 0; i < out_dim_; ++i)
          for (int j = 0; j < factor_; ++j) a(i, i * factor_ + j) = inv;
      }
      return a;
    }
    case Kind::Dense:
      return a_;
  }
  throw std::logic_error("materialize: unreachable");
}

Decoder Decoder::identity(int dim) {
  if (dim < 1) throw std::invalid_argument("identity decoder: dim must be positive");
  Decoder d;
  d.identity_ = true;
  d.dim_ = dim;
  return d;
}

Decoder Decoder::smooth(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, double gain) {
  if (w.rows() < 1 || w.rows() != w.cols()) throw std::invalid_argument("smooth decoder: W must be square");
  if (b.size() != w.rows()) throw std::invalid_argument("smooth decoder: b dimension mismatch");
  Decoder d;
  d.identity_ = false;
  d.dim_ = static_cast<int>(w.rows());
  d.gain_ = gain;
  d.w_ = w;
  d.b_ = b;
  return d;
}

Eigen::VectorXd Decoder::decode(const Eigen::VectorXd& z) const {
  if (z.size() != dim_) throw std::invalid_argument("decode: dimension mismatch");
  if (identity_) return z;
  return z + gain_ * (w_ * z + b_).array().tanh().matrix();
}

Eigen::VectorXd Decoder::vjp(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const {
  if (z.size() != dim_ || u.size() != dim_) throw std::invalid_argument("vjp: dimension mismatch");
  if (identity_) return u;
  const Eigen::ArrayXd th = (w_ * z + b_).array().tanh();
  const Eigen::VectorXd scaled = ((1.0 - th * th) * u.array()).matrix();
  return u + gain_ * (w_.transpose() * scaled);
}

Measurement::Measurement(Eigen::VectorXd y_in, ForwardOperator op_in, Decoder dec_in, double sigma)
    : y(std::move(y_in)), op(std::move(op_in)), decoder(std::move(dec_in)), sigma_n(sigma) {
  if (y.size() != op.out_dim()) throw std::invalid_argument("Measurement: y/operator dimension mismatch");
  if (op.in_dim() != decoder.dim()) throw std::invalid_argument("Measurement: operator/decoder dimension mismatch");
  if (!(sigma_n >= 0.0)) throw std::invalid_argument("Measurement: sigma_n must be nonnegative");
}

Measurement simulate_measurement(const Eigen::VectorXd& x0_true, const ForwardOperator& op,
                                 const Decoder& decoder, double sigma_n, RandomStream& rng) {
  if (!(sigma_n >= 0.0)) throw std::invalid_argument("simulate_measurement: sigma_n must be nonnegative");
  Eigen::VectorXd y = op.apply(decoder.decode(x0_true));
  if (sigma_n > 0.0) y += sigma_n * rng.normal_vector(y.size());
  return Measurement(std::move(y), op, decoder, sigma_n);
}

double residual_sq(const Measurement& meas, const Eigen::VectorXd& z) {
  return (meas.y - meas.op.apply(meas.decoder.decode(z))).squaredNorm();
}

Eigen::VectorXd data_fidelity_grad(const Measurement& meas, const Eigen::VectorXd& z) {
  const Eigen::VectorXd r = meas.y - meas.op.apply(meas.decoder.decode(z));
  return -2.0 * meas.decoder.vjp(z, meas.op.adjoint(r));
}

}  // namespace flowlps
