// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flowlps/sampler.hpp"

namespace flowlps {

double compute_mse(const Eigen::VectorXd& x, const Eigen::VectorXd& ref);

// 10 log10(peak^2 / MSE). Equal inputs would be +inf; those are reported as a
// capped 99.0 dB so downstream tables stay finite.
inline constexpr double kPsnrCapDb = 99.0;
double compute_psnr(const Eigen::VectorXd& x, const Eigen::VectorXd& ref, double peak);

struct MetricsRecord {
  int instance = 0;
  std::string solver;
  std::string n_langevin;    // "6" or "6->1"; "-" when not applicable
  int n_total = 0;
  std::string rho_schedule;  // "-" when not applicable
  double mse = 0.0;
  double psnr_db = 0.0;
  double residual_sq = 0.0;
  double wall_s = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kMetricsHeader =
    "instance,solver,n_langevin,n_total,rho_schedule,mse,psnr_db,residual_sq,wall_s,seed";

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> read_metrics_csv(const std::string& path);

// One JSON object per line, keys sorted, one line per recorded phase.
void trajectory_to_jsonl(const Trajectory& trajectory, std::ostream& out);
void save_trajectory_jsonl(const std::string& path, const Trajectory& trajectory);

}  // namespace flowlps
