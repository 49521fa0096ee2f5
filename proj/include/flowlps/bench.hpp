// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "flowlps/config.hpp"
#include "flowlps/metrics.hpp"

namespace flowlps {

struct SolverSummary {
  std::string solver;
  std::string n_langevin;
  int n_total = 0;
  std::string rho_schedule;
  int n_instances = 0;
  double median_mse = 0.0;
  double mean_mse = 0.0;
  double median_psnr_db = 0.0;
  double median_residual_sq = 0.0;
  // Median squared distance (per coordinate) between the reconstruction and
  // the exact posterior mean under the solver's prior; NaN when the decoder
  // is not the identity (no closed-form posterior there).
  double median_post_mean_dist_sq = 0.0;
};

inline constexpr const char* kSummaryHeader =
    "solver,n_langevin,n_total,rho_schedule,n_instances,median_mse,mean_mse,median_psnr_db,"
    "median_residual_sq,median_post_mean_dist_sq";

struct BenchResult {
  std::vector<SolverSpec> solvers;  // after sweep expansion
  std::vector<MetricsRecord> records;
  std::vector<SolverSummary> summaries;
};

// Runs every solver on every instance and writes metrics.csv, summary.csv,
// traj/*.jsonl, and img/*.pgm under cfg.out_dir. Rows are ordered by instance
// then solver regardless of the worker count (LPS_THREADS caps it, 0 = auto).
BenchResult run_benchmark(const ExperimentConfig& cfg);

// Single-instance convenience used by the solve subcommand: identical to a
// one-instance benchmark with the same seed.
BenchResult run_solve(const ExperimentConfig& cfg);

int resolve_thread_count();
std::string sanitize_filename(const std::string& name);
void write_summary_csv(const std::string& path, const std::vector<SolverSummary>& rows);

}  // namespace flowlps
