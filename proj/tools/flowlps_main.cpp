// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: solve / bench / verify / make-data / fit-prior.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "flowlps/bench.hpp"
#include "flowlps/config.hpp"
#include "flowlps/dataset.hpp"
#include "flowlps/verify.hpp"

namespace fs = std::filesystem;
using namespace flowlps;

namespace {

int cmd_solve(const std::string& config_path, const std::optional<std::uint64_t>& seed,
              const std::optional<std::string>& out_dir) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (seed) cfg.seed = *seed;
  if (out_dir) cfg.out_dir = *out_dir;
  const BenchResult result = run_solve(cfg);
  for (const auto& row : result.records) {
    std::cout << row.solver << ": mse=" << row.mse << " psnr_db=" << row.psnr_db
              << " residual_sq=" << row.residual_sq << '\n';
  }
  std::cout << "artifacts in " << cfg.out_dir << '\n';
  return 0;
}

int cmd_bench(const std::string& config_path) {
  const ExperimentConfig cfg = load_experiment_config(config_path);
  const BenchResult result = run_benchmark(cfg);
  std::cout << kSummaryHeader << '\n';
  for (const auto& s : result.summaries) {
    std::cout << s.solver << ',' << s.n_langevin << ',' << s.n_total << ',' << s.rho_schedule
              << ',' << s.n_instances << ',' << s.median_mse << ',' << s.mean_mse << ','
              << s.median_psnr_db << ',' << s.median_residual_sq << ','
              << s.median_post_mean_dist_sq << '\n';
  }
  std::cout << result.records.size() << " rows written to " << cfg.out_dir << '\n';
  return 0;
}

int cmd_verify(const std::string& level) {
  const VerifyLevel lvl = level == "full" ? VerifyLevel::Full : VerifyLevel::Fast;
  const auto results = verify_suite(lvl);
  int failures = 0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << ' ' << r.name;
    if (!r.detail.empty()) std::cout << " (" << r.detail << ')';
    std::cout << '\n';
    if (!r.pass) ++failures;
  }
  std::cout << (results.size() - failures) << '/' << results.size() << " checks passed\n";
  return failures == 0 ? 0 : 1;
}

int cmd_make_data(const std::vector<int>& shape_dims, int n, std::uint64_t seed,
                  const std::string& out_dir) {
  const SignalShape shape = shape_dims.size() == 1
                                ? SignalShape::vec(shape_dims[0])
                                : SignalShape::image(shape_dims[0], shape_dims[1]);
  RandomStream rng = derive_stream(seed, "make-data");
  const BlobDataset ds = generate_blob_dataset(shape, n, rng);
  fs::create_directories(out_dir);
  save_dataset_csv((fs::path(out_dir) / "data.csv").string(), ds.samples);
  save_prior_json((fs::path(out_dir) / "prior.json").string(), ds.prior);
  std::cout << n << " samples of dim " << shape.total() << " written to " << out_dir << '\n';
  return 0;
}

int cmd_fit_prior(const std::string& data_path, int k, std::uint64_t seed,
                  const std::string& out_path) {
  const Eigen::MatrixXd data = load_dataset_csv(data_path);
  EmOptions opts;
  opts.seed = seed;
  const GaussianMixture fitted = fit_em(data, k, opts);
  save_prior_json(out_path, fitted);
  std::cout << "fitted " << k << "-component mixture (dim " << fitted.dim() << ") to "
            << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Langevin-proximal posterior sampling for linear inverse problems"};
  app.require_subcommand(1);

  std::string config_path, level = "fast", data_path, out_path;
  std::optional<std::uint64_t> seed_opt;
  std::optional<std::string> out_opt;
  std::vector<int> shape_dims;
  int n = 100, k = 3;
  std::uint64_t seed = 0;

  auto* solve = app.add_subcommand("solve", "run every configured solver on one instance");
  solve->add_option("--config", config_path, "experiment config (JSON)")->required();
  solve->add_option("--seed", seed_opt, "master seed override");
  solve->add_option("--out", out_opt, "output directory override");

  auto* bench = app.add_subcommand("bench", "run the configured benchmark sweep");
  bench->add_option("--config", config_path, "experiment config (JSON)")->required();

  auto* verify = app.add_subcommand("verify", "run the oracle-backed invariant suite");
  verify->add_option("--level", level, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}));

  auto* make_data = app.add_subcommand("make-data", "generate a synthetic dataset");
  make_data->add_option("--shape", shape_dims, "signal shape: length or height width")
      ->required()
      ->expected(1, 2);
  make_data->add_option("--n", n, "sample count");
  make_data->add_option("--seed", seed, "master seed");
  make_data->add_option("--out", out_path, "output directory")->required();

  auto* fit_prior = app.add_subcommand("fit-prior", "fit a mixture to a sample CSV");
  fit_prior->add_option("--data", data_path, "sample CSV (one signal per row)")->required();
  fit_prior->add_option("--k", k, "component count");
  fit_prior->add_option("--seed", seed, "initialization seed");
  fit_prior->add_option("--out", out_path, "output prior JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(solve)) return cmd_solve(config_path, seed_opt, out_opt);
    if (app.got_subcommand(bench)) return cmd_bench(config_path);
    if (app.got_subcommand(verify)) return cmd_verify(level);
    if (app.got_subcommand(make_data)) return cmd_make_data(shape_dims, n, seed, out_path);
    if (app.got_subcommand(fit_prior)) return cmd_fit_prior(data_path, k, seed, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
