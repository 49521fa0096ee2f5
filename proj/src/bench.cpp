// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "flowlps/baselines.hpp"
#include "flowlps/errors.hpp"
#include "flowlps/flow.hpp"
#include "flowlps/pgm.hpp"
#include "flowlps/textio.hpp"

namespace flowlps {

namespace fs = std::filesystem;

int resolve_thread_count() {
  const char* env = std::getenv("LPS_THREADS");
  if (env != nullptr && *env != '\0') {
    try {
      const long long v = parse_int(env);
      if (v > 0) return static_cast<int>(std::min<long long>(v, 64));
    } catch (const std::invalid_argument&) {
      // fall through to auto
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    out.push_back(ok ? c : '-');
  }
  return out;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Per-instance work product; files are written by the worker, rows are merged
// in instance order afterwards.
struct InstanceRows {
  std::vector<MetricsRecord> rows;                    // one per solver
  std::vector<double> post_mean_dist;                 // one per solver (may be NaN)
};

}  // namespace

void write_summary_csv(const std::string& path, const std::vector<SolverSummary>& rows) {
  std::ofstream out(path);
  if (!out) throw IoFailure("write_summary_csv: cannot open " + path);
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.solver << ',' << r.n_langevin << ',' << r.n_total << ',' << r.rho_schedule << ','
        << r.n_instances << ',' << format_double(r.median_mse) << ',' << format_double(r.mean_mse)
        << ',' << format_double(r.median_psnr_db) << ',' << format_double(r.median_residual_sq)
        << ',' << format_double(r.median_post_mean_dist_sq) << '\n';
  }
  if (!out) throw IoFailure("write_summary_csv: write failed for " + path);
}

BenchResult run_benchmark(const ExperimentConfig& cfg) {
  cfg.validate();

  BenchResult result;
  result.solvers = expand_sweep(cfg.solvers, cfg.sweep);
  {
    std::set<std::string> names, files;
    for (const auto& s : result.solvers) {
      if (!names.insert(s.name).second)
        throw std::invalid_argument("run_benchmark: duplicate solver name '" + s.name + "'");
      if (!files.insert(sanitize_filename(s.name)).second)
        throw std::invalid_argument("run_benchmark: solver names collide after sanitizing: '" +
                                    s.name + "'");
    }
  }

  const ResolvedPriors priors = resolve_priors(cfg);
  const int d = cfg.shape.total();
  const Decoder decoder = build_decoder(cfg.decoder, d);

  std::error_code ec;
  fs::create_directories(fs::path(cfg.out_dir) / "traj", ec);
  fs::create_directories(fs::path(cfg.out_dir) / "img", ec);
  if (ec) throw IoFailure("run_benchmark: cannot create output directory " + cfg.out_dir);

  std::vector<InstanceRows> per_instance(cfg.instances);
  std::atomic<int> next_instance{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto work = [&]() {
    while (true) {
      const int inst = next_instance.fetch_add(1);
      if (inst >= cfg.instances) return;
      try {
        RandomStream truth_rng = derive_stream(cfg.seed, "truth", inst);
        RandomStream mask_rng = derive_stream(cfg.seed, "mask", inst);
        RandomStream noise_rng = derive_stream(cfg.seed, "noise", inst);

        const Eigen::VectorXd z_true = priors.truth.sample(truth_rng);
        const Eigen::VectorXd x_true = decoder.decode(z_true);
        const ForwardOperator op = build_operator(cfg.op, cfg.shape, &mask_rng);
        const Measurement meas = simulate_measurement(z_true, op, decoder, cfg.sigma_n, noise_rng);

        // Shared reference for the summary column: exact posterior mean under
        // the solver-facing prior (identity decoder only).
        Eigen::VectorXd post_mean;
        if (decoder.is_identity())
          post_mean = posterior_x0_given_y(priors.solver, op, meas.y, cfg.sigma_n).mean();

        write_pgm((fs::path(cfg.out_dir) / "img" / ("truth_i" + std::to_string(inst) + ".pgm"))
                      .string(),
                  x_true, cfg.shape, cfg.peak);

        InstanceRows& slot = per_instance[inst];
        for (const auto& solver : result.solvers) {
          MetricsRecord row;
          row.instance = inst;
          row.solver = solver.name;
          row.seed = cfg.seed;

          Eigen::VectorXd recon, z_hat;
          Trajectory traj;
          const auto tic = std::chrono::steady_clock::now();
          if (solver.preset == "single-gradient") {
            auto r = single_gradient_solve(meas, priors.solver, solver.sg_steps,
                                           solver.sg_step_size, solver.sg_alpha, cfg.seed, inst,
                                           &x_true);
            recon = std::move(r.reconstruction);
            z_hat = std::move(r.x0_hat);
            traj = std::move(r.trajectory);
            row.n_langevin = "-";
            row.n_total = 0;
            row.rho_schedule = "-";
          } else {
            LPSConfig lps = solver.lps;
            lps.seed = cfg.seed;
            auto r = solve(meas, priors.solver, lps, inst, &x_true);
            recon = std::move(r.reconstruction);
            z_hat = std::move(r.z_star);
            traj = std::move(r.trajectory);
            row.n_langevin = langevin_schedule_name(lps.n_langevin);
            row.n_total = lps.n_total;
            row.rho_schedule = rho_schedule_name(lps.rho);
          }
          const auto toc = std::chrono::steady_clock::now();
          row.wall_s = cfg.timing ? std::chrono::duration<double>(toc - tic).count() : 0.0;
          row.mse = compute_mse(recon, x_true);
          row.psnr_db = compute_psnr(recon, x_true, cfg.peak);
          row.residual_sq = residual_sq(meas, z_hat);
          slot.post_mean_dist.push_back(
              post_mean.size() > 0 ? (recon - post_mean).squaredNorm() / double(d) : std::nan(""));

          const std::string stem =
              sanitize_filename(solver.name) + "_i" + std::to_string(inst);
          save_trajectory_jsonl((fs::path(cfg.out_dir) / "traj" / (stem + ".jsonl")).string(),
                                traj);
          write_pgm((fs::path(cfg.out_dir) / "img" / (stem + ".pgm")).string(), recon, cfg.shape,
                    cfg.peak);
          slot.rows.push_back(std::move(row));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::min(resolve_thread_count(), cfg.instances);
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (const auto& slot : per_instance)
    for (const auto& row : slot.rows) result.records.push_back(row);

  for (size_t s = 0; s < result.solvers.size(); ++s) {
    const auto& spec = result.solvers[s];
    SolverSummary sum;
    sum.solver = spec.name;
    if (spec.preset == "single-gradient") {
      sum.n_langevin = "-";
      sum.n_total = 0;
      sum.rho_schedule = "-";
    } else {
      sum.n_langevin = langevin_schedule_name(spec.lps.n_langevin);
      sum.n_total = spec.lps.n_total;
      sum.rho_schedule = rho_schedule_name(spec.lps.rho);
    }
    sum.n_instances = cfg.instances;
    std::vector<double> mse, psnr, res, pmd;
    for (const auto& slot : per_instance) {
      mse.push_back(slot.rows[s].mse);
      psnr.push_back(slot.rows[s].psnr_db);
      res.push_back(slot.rows[s].residual_sq);
      if (!std::isnan(slot.post_mean_dist[s])) pmd.push_back(slot.post_mean_dist[s]);
    }
    sum.median_mse = median(mse);
    sum.mean_mse = mse.empty() ? std::nan("") :
        std::accumulate(mse.begin(), mse.end(), 0.0) / double(mse.size());
    sum.median_psnr_db = median(psnr);
    sum.median_residual_sq = median(res);
    sum.median_post_mean_dist_sq = median(pmd);
    result.summaries.push_back(std::move(sum));
  }

  write_metrics_csv((fs::path(cfg.out_dir) / "metrics.csv").string(), result.records);
  write_summary_csv((fs::path(cfg.out_dir) / "summary.csv").string(), result.summaries);
  return result;
}

BenchResult run_solve(const ExperimentConfig& cfg) {
  ExperimentConfig single = cfg;
  single.instances = 1;
  return run_benchmark(single);
}

}  // namespace flowlps
