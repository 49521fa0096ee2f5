// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/dataset.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "flowlps/errors.hpp"
#include "flowlps/textio.hpp"

namespace flowlps {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double bump(double r2, double width) { return std::exp(-r2 / (2.0 * width * width)); }

// Normalized coordinates of every grid point, row-major for 2-D shapes.
std::vector<Eigen::Vector2d> grid_coords(const SignalShape& shape) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(shape.total());
  auto axis = [](int i, int n) { return n > 1 ? double(i) / double(n - 1) : 0.5; };
  if (shape.is_2d) {
    for (int r = 0; r < shape.height; ++r)
      for (int c = 0; c < shape.width; ++c)
        pts.emplace_back(axis(r, shape.height), axis(c, shape.width));
  } else {
    for (int i = 0; i < shape.total(); ++i) pts.emplace_back(axis(i, shape.total()), 0.0);
  }
  return pts;
}

double template_value(int which, const SignalShape& shape, const Eigen::Vector2d& p) {
  const double u = p[0], v = p[1];
  if (!shape.is_2d) {
    switch (which) {
      case 0: return 0.15 + 0.70 * bump((u - 0.35) * (u - 0.35), 0.12);
      case 1: return 0.20 + 0.60 * logistic((u - 0.55) / 0.06);
      default: return 0.10 + 0.50 * u + 0.30 * bump((u - 0.20) * (u - 0.20), 0.07);
    }
  }
  switch (which) {
    case 0:
      return 0.15 + 0.70 * bump((u - 0.35) * (u - 0.35) + (v - 0.40) * (v - 0.40), 0.18);
    case 1:
      return 0.20 + 0.60 * logistic((0.5 * (u + v) - 0.5) / 0.08);
    default:
      return 0.12 + 0.55 * bump((u - 0.30) * (u - 0.30) + (v - 0.70) * (v - 0.70), 0.13) +
             0.55 * bump((u - 0.72) * (u - 0.72) + (v - 0.28) * (v - 0.28), 0.13);
  }
}

}  // namespace

GaussianMixture make_blob_prior(const SignalShape& shape) {
  const int d = shape.total();
  if (d < 1) throw std::invalid_argument("make_blob_prior: empty shape");
  if (d > kMaxSignalDim) throw std::invalid_argument("make_blob_prior: total dimension exceeds 256");

  const auto pts = grid_coords(shape);

  // Shared squared-exponential covariance with a diagonal nugget.
  Eigen::MatrixXd cov(d, d);
  const double s2 = kBlobMarginalStd * kBlobMarginalStd;
  const double inv2l2 = 1.0 / (2.0 * kBlobLengthScale * kBlobLengthScale);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double r2 = (pts[i] - pts[j]).squaredNorm();
      const double k = s2 * std::exp(-r2 * inv2l2);
      cov(i, j) = k;
      cov(j, i) = k;
    }
    cov(i, i) += kBlobNugget;
  }

  const double weights[kBlobComponents] = {0.40, 0.35, 0.25};
  std::vector<GaussianMixture::Component> comps;
  comps.reserve(kBlobComponents);
  for (int k = 0; k < kBlobComponents; ++k) {
    Eigen::VectorXd mean(d);
    for (int i = 0; i < d; ++i) mean[i] = template_value(k, shape, pts[i]);
    comps.push_back({weights[k], std::move(mean), cov});
  }
  return GaussianMixture(std::move(comps));
}

BlobDataset generate_blob_dataset(const SignalShape& shape, int n, RandomStream& rng) {
  if (n < 0) throw std::invalid_argument("generate_blob_dataset: negative count");
  GaussianMixture prior = make_blob_prior(shape);
  Eigen::MatrixXd samples(n, shape.total());
  if (n > 0) samples = prior.sample(rng, n);
  return BlobDataset{std::move(samples), std::move(prior), shape};
}

void save_dataset_csv(const std::string& path, const Eigen::MatrixXd& samples) {
  std::ofstream out(path);
  if (!out) throw IoFailure("save_dataset_csv: cannot open " + path);
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
      if (c) out << ',';
      out << format_double(samples(r, c));
    }
    out << '\n';
  }
  if (!out) throw IoFailure("save_dataset_csv: write failed for " + path);
}

Eigen::MatrixXd load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("load_dataset_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& tok : split_csv_line(line)) row.push_back(parse_double(tok));
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoFailure("load_dataset_csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

}  // namespace flowlps
