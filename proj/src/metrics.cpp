// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/metrics.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

#include "flowlps/errors.hpp"
#include "flowlps/textio.hpp"

namespace flowlps {

double compute_mse(const Eigen::VectorXd& x, const Eigen::VectorXd& ref) {
  if (x.size() != ref.size() || x.size() == 0)
    throw std::invalid_argument("compute_mse: dimension mismatch");
  return (x - ref).squaredNorm() / double(x.size());
}

double compute_psnr(const Eigen::VectorXd& x, const Eigen::VectorXd& ref, double peak) {
  if (!(peak > 0.0)) throw std::invalid_argument("compute_psnr: peak must be positive");
  const double mse = compute_mse(x, ref);
  if (mse == 0.0) return kPsnrCapDb;
  const double db = 10.0 * std::log10(peak * peak / mse);
  return db > kPsnrCapDb ? kPsnrCapDb : db;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoFailure("write_metrics_csv: cannot open " + path);
  out << kMetricsHeader << '\n';
  for (const auto& r : records) {
    if (r.solver.find(',') != std::string::npos || r.n_langevin.find(',') != std::string::npos ||
        r.rho_schedule.find(',') != std::string::npos)
      throw std::invalid_argument("write_metrics_csv: field contains a comma");
    out << r.instance << ',' << r.solver << ',' << r.n_langevin << ',' << r.n_total << ','
        << r.rho_schedule << ',' << format_double(r.mse) << ',' << format_double(r.psnr_db) << ','
        << format_double(r.residual_sq) << ',' << format_double(r.wall_s) << ',' << r.seed << '\n';
  }
  if (!out) throw IoFailure("write_metrics_csv: write failed for " + path);
}

std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("read_metrics_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw IoFailure("read_metrics_csv: bad header in " + path);
  std::vector<MetricsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10) throw IoFailure("read_metrics_csv: bad row in " + path);
    MetricsRecord r;
    r.instance = static_cast<int>(parse_int(f[0]));
    r.solver = f[1];
    r.n_langevin = f[2];
    r.n_total = static_cast<int>(parse_int(f[3]));
    r.rho_schedule = f[4];
    r.mse = parse_double(f[5]);
    r.psnr_db = parse_double(f[6]);
    r.residual_sq = parse_double(f[7]);
    r.wall_s = parse_double(f[8]);
    r.seed = static_cast<std::uint64_t>(parse_int(f[9]));
    records.push_back(std::move(r));
  }
  return records;
}

void trajectory_to_jsonl(const Trajectory& trajectory, std::ostream& out) {
  for (const auto& rec : trajectory.records) {
    nlohmann::json j;
    j["step"] = rec.step;
    j["t"] = rec.t;
    j["phase"] = rec.phase;
    j["residual_sq"] = rec.residual_sq;
    j["anchor_dist_sq"] = rec.anchor_dist_sq;
    if (rec.mse_true) j["mse_true"] = *rec.mse_true;
    out << j.dump() << '\n';
  }
}

void save_trajectory_jsonl(const std::string& path, const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw IoFailure("save_trajectory_jsonl: cannot open " + path);
  trajectory_to_jsonl(trajectory, out);
  if (!out) throw IoFailure("save_trajectory_jsonl: write failed for " + path);
}

}  // namespace flowlps
