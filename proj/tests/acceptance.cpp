// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Each criterion prints exactly one line,
//   criterion N: PASS (detail)
// or
//   criterion N: FAIL (detail)
// and the process exits nonzero if any executed criterion failed.
// --only N restricts the run to a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "flowlps/baselines.hpp"
#include "flowlps/bench.hpp"
#include "flowlps/config.hpp"
#include "flowlps/dataset.hpp"
#include "flowlps/flow.hpp"
#include "flowlps/forward.hpp"
#include "flowlps/gmm.hpp"
#include "flowlps/metrics.hpp"
#include "flowlps/oracle.hpp"
#include "flowlps/rng.hpp"
#include "flowlps/sampler.hpp"
#include "test_support.hpp"

using namespace flowlps;
namespace fs = std::filesystem;

namespace {

struct CriterionFailure {
  std::string detail;
};

void require(bool cond, const std::string& detail) {
  if (!cond) throw CriterionFailure{detail};
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Every proximal solver agrees with the closed-form ridge solution.

std::string criterion_1() {
  const int d = 16, m = 8;
  const double sigma = 0.03;
  const double ts[] = {0.1, 0.5, 0.9};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    RandomStream rng = derive_stream(20260821, "acc1", static_cast<std::uint64_t>(i));
    const Eigen::MatrixXd a = testsup::conditioned_matrix(m, d, 1.5, 2.5, rng);
    const Eigen::VectorXd y = rng.normal_vector(m);
    const Eigen::VectorXd anchor = rng.normal_vector(d);
    const double t = ts[i % 3];
    const Measurement meas(y, ForwardOperator::dense(a), Decoder::identity(d), sigma);
    const double lambda = sigma * sigma / t;
    const Eigen::VectorXd ref = oracle::ridge_closed_form(a, y, lambda, anchor);
    const double scale = std::max(ref.norm(), 1e-12);

    const Eigen::VectorXd ridge =
        proximal_phase(meas, anchor, t, ProximalSolver::exact_ridge(), 0);
    const Eigen::VectorXd cg =
        proximal_phase(meas, anchor, t, ProximalSolver::conjugate_gradient(), 0);
    const Eigen::VectorXd gd =
        proximal_phase(meas, anchor, t, ProximalSolver::gradient_descent(0.1, 0.65, 10), 200);

    worst = std::max(worst, (ridge - ref).norm() / scale);
    worst = std::max(worst, (cg - ref).norm() / scale);
    worst = std::max(worst, (gd - ref).norm() / scale);
  }
  require(worst <= 1e-4, "relative error " + fmt(worst) + " above 1e-4");
  return "100 instances, worst relative error " + fmt(worst);
}

// ---------------------------------------------------------------------------
// 2. Interpolating posterior draws with a re-noised endpoint reproduces the
//    analytic intermediate-time mixture.

std::string criterion_2() {
  const GaussianMixture prior = testsup::planar_two_component();
  Eigen::VectorXd y(1);
  y << 0.3;
  const ForwardOperator op = ForwardOperator::mask(2, {0});
  const double sigma = 0.1;
  const GaussianMixture post = posterior_x0_given_y(prior, op, y, sigma);

  const int n = 100000;
  double worst_sigmas = 0.0;
  RandomStream rng = derive_stream(20260821, "acc2");
  for (double t_next : {0.2, 0.5, 0.8}) {
    const double rho = resolve_rho(RhoSchedule::sqrt_one_minus_sigma(), t_next);

    std::vector<GaussianMixture::Component> comps;
    for (int k = 0; k < post.num_components(); ++k) {
      GaussianMixture::Component c;
      c.weight = post.component(k).weight;
      c.mean = (1.0 - t_next) * post.component(k).mean;
      c.cov = (1.0 - t_next) * (1.0 - t_next) * post.component(k).cov +
              t_next * t_next * Eigen::MatrixXd::Identity(2, 2);
      comps.push_back(std::move(c));
    }
    const GaussianMixture target(std::move(comps));

    Eigen::MatrixXd samples(n, 2);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd x1 = rng.normal_vector(2);
      const Eigen::VectorXd eps_hat = pcn_renoise(x1, rho, rng);
      const Eigen::VectorXd x0 = post.sample(rng);
      samples.row(i) = ((1.0 - t_next) * x0 + t_next * eps_hat).transpose();
    }
    const oracle::MomentReport rep = oracle::moment_distance(samples, target);
    worst_sigmas = std::max(worst_sigmas,
                            std::max(rep.max_mean_sigmas, rep.max_cov_sigmas));
    require(rep.within(3.0), "t'=" + fmt(t_next) + " moments off by " +
                                 fmt(std::max(rep.max_mean_sigmas, rep.max_cov_sigmas)) +
                                 " standard errors");
  }
  return "3 interpolation times x 100000 draws, worst deviation " + fmt(worst_sigmas) +
         " standard errors";
}

// ---------------------------------------------------------------------------
// 3. The Langevin phase equilibrates to the discrete-step stationary
//    covariance of its Gaussian surrogate target.

std::string criterion_3() {
  Eigen::MatrixXd a(2, 2);
  a << 3.0, 1.0, 0.5, 2.0;
  const double sigma = 0.2, t = 0.5, zeta = 1e-3;
  Eigen::VectorXd y(2);
  y << 0.4, -0.1;
  const Measurement meas(y, ForwardOperator::dense(a), Decoder::identity(2), sigma);
  Eigen::VectorXd anchor(2);
  anchor << 0.3, -0.2;

  const Eigen::MatrixXd precision =
      a.transpose() * a / (sigma * sigma) + Eigen::MatrixXd::Identity(2, 2) / t;
  const Eigen::MatrixXd target = oracle::ula_stationary_covariance(precision, zeta);

  RandomStream rng = derive_stream(20260821, "acc3");
  Eigen::VectorXd z = anchor;
  for (int i = 0; i < 2000; ++i) z = langevin_phase(meas, anchor, z, t, 1, zeta, rng);

  const int n = 100000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    z = langevin_phase(meas, anchor, z, t, 1, zeta, rng);
    mean += z;
    second += z * z.transpose();
  }
  mean /= double(n);
  const Eigen::MatrixXd cov = second / double(n) - mean * mean.transpose();

  const double rel = (cov - target).norm() / target.norm();
  require(rel <= 0.05, "covariance off by " + fmt(100.0 * rel) + "%");
  return "100000 iterates, stationary covariance within " + fmt(100.0 * rel) + "%";
}

// ---------------------------------------------------------------------------
// 4. The re-noise step preserves the standard normal law and its implied
//    Metropolis correction is exactly neutral.

std::string criterion_4() {
  const int d = 4, n = 100000;
  const GaussianMixture std_normal = testsup::std_normal(d);

  RandomStream rng = derive_stream(20260821, "acc4");
  double worst_sigmas = 0.0;
  for (double rho : {0.0, 0.5, std::sqrt(40.0 / 43.0)}) {
    Eigen::MatrixXd samples(n, d);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd x = rng.normal_vector(d);
      samples.row(i) = pcn_renoise(x, rho, rng).transpose();
    }
    const oracle::MomentReport rep = oracle::moment_distance(samples, std_normal);
    worst_sigmas =
        std::max(worst_sigmas, std::max(rep.max_mean_sigmas, rep.max_cov_sigmas));
    require(rep.within(3.0), "rho=" + fmt(rho) + " moments off by " +
                                 fmt(std::max(rep.max_mean_sigmas, rep.max_cov_sigmas)) +
                                 " standard errors");
  }

  // log acceptance ratio of the move as a Metropolis proposal for N(0, I):
  // log pi(x') + log q(x | x') - log pi(x) - log q(x' | x) == 0 exactly.
  double worst_log = 0.0;
  for (double rho : {0.3, 0.7, 0.95}) {
    const double prop_var = 1.0 - rho * rho;
    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd x = rng.normal_vector(d);
      const Eigen::VectorXd xp = pcn_renoise(x, rho, rng);
      const double log_pi_x = -0.5 * x.squaredNorm();
      const double log_pi_xp = -0.5 * xp.squaredNorm();
      const double log_q_fwd = -0.5 * (xp - rho * x).squaredNorm() / prop_var;
      const double log_q_rev = -0.5 * (x - rho * xp).squaredNorm() / prop_var;
      const double log_ratio = log_pi_xp + log_q_rev - log_pi_x - log_q_fwd;
      worst_log = std::max(worst_log, std::abs(log_ratio));
    }
  }
  require(worst_log <= 1e-12,
          "log acceptance ratio " + fmt(worst_log) + " above 1e-12");
  return "3 rho values invariant within " + fmt(worst_sigmas) +
         " standard errors; worst |log ratio| " + fmt(worst_log);
}

// ---------------------------------------------------------------------------
// 5. The closed-form velocity matches scalar quadrature across priors,
//    times, and states.

std::string criterion_5() {
  const GaussianMixture priors[] = {testsup::scalar_gaussian(0.7, 0.36),
                                    testsup::scalar_two_component(),
                                    testsup::scalar_three_component()};
  RandomStream rng = derive_stream(20260821, "acc5");
  double worst = 0.0;
  for (const auto& prior : priors) {
    const oracle::Grid1D grid = oracle::Grid1D::for_prior(prior);
    for (int i = 0; i < 20; ++i) {
      const double t = 0.05 + 0.9 * rng.uniform();
      const double x = -2.5 + 5.0 * rng.uniform();
      Eigen::VectorXd xv(1);
      xv << x;
      const double closed = velocity(prior, t, xv)[0];
      const double quad = oracle::quadrature_velocity(prior, t, x, grid);
      worst = std::max(worst, std::abs(closed - quad));
    }
  }
  require(worst <= 1e-6, "velocity mismatch " + fmt(worst) + " above 1e-6");
  return "3 priors x 20 random (t, x) points, worst |closed - quadrature| " + fmt(worst);
}

// ---------------------------------------------------------------------------
// 6. With no refinement budget and rho = 1 the sampler collapses bitwise to
//    the plain endpoint-interpolation flow, which is Euler integration.

std::string criterion_6() {
  const GaussianMixture prior = testsup::planar_two_component();
  Eigen::VectorXd y(1);
  y << 0.3;
  const Measurement meas(y, ForwardOperator::mask(2, {0}), Decoder::identity(2), 0.1);

  LPSConfig cfg;
  cfg.n_steps = 40;
  cfg.alpha = 3;
  cfg.n_langevin = LangevinSchedule::fixed(0);
  cfg.n_total = 0;
  cfg.rho = RhoSchedule::constant(1.0);
  cfg.seed = 5;

  const std::vector<double> ts = time_schedule(cfg.n_steps, cfg.alpha);

  // reference: endpoint interpolation from the same initial state
  RandomStream ref_rng = derive_stream(cfg.seed, "sampler", 0);
  Eigen::VectorXd zr = ref_rng.normal_vector(2);
  Eigen::VectorXd last_x0;

  // sampler: the full per-step state machine
  RandomStream samp_rng = derive_stream(cfg.seed, "sampler", 0);
  SamplerState state;
  state.t = 1.0;
  state.z = samp_rng.normal_vector(2);
  state.x0_anchor = state.z;
  state.x1_hat = state.z;
  state.z_star = state.z;

  double worst_euler = 0.0;
  for (int i = 0; i < cfg.n_steps; ++i) {
    const double t = ts[static_cast<size_t>(i)];
    const double t_next = ts[static_cast<size_t>(i) + 1];
    const TweediePair pair = tweedie_pair(prior, t, zr);
    last_x0 = pair.x0_hat;
    const Eigen::VectorXd euler = zr - (t - t_next) * velocity(prior, t, zr);
    zr = (1.0 - t_next) * pair.x0_hat + t_next * pair.x1_hat;
    worst_euler = std::max(worst_euler, (zr - euler).lpNorm<Eigen::Infinity>());

    state = flow_step(state, prior, meas, cfg, samp_rng);
    require(testsup::bitwise_equal(state.z, zr),
            "state diverged from the interpolation flow at step " + std::to_string(i));
  }
  require(worst_euler <= 1e-12,
          "interpolation differs from the Euler update by " + fmt(worst_euler));

  const SolveResult full = solve(meas, prior, cfg);
  require(testsup::bitwise_equal(full.z_star, last_x0),
          "full solve returned a different endpoint estimate");
  return "40 steps bitwise equal; Euler gap " + fmt(worst_euler);
}

// ---------------------------------------------------------------------------
// 7. The shipped task defaults are exactly the documented table.

std::string criterion_7() {
  const auto expect = [](const std::string& task, int alpha, int nl_fixed, double lr0,
                         double factor, int every) {
    const LPSConfig lps = default_lps_for_task(task);
    require(lps.n_steps == 40, task + ": n_steps");
    require(lps.n_total == 15, task + ": n_total");
    require(lps.zeta == 1e-4, task + ": zeta");
    require(lps.rho.kind == RhoKind::SqrtOneMinusSigma, task + ": rho schedule");
    require(lps.alpha == alpha, task + ": alpha");
    require(lps.n_langevin.is_fixed() && lps.n_langevin.start == nl_fixed,
            task + ": langevin schedule");
    require(lps.proximal.kind == ProximalKind::GradientDescent, task + ": proximal kind");
    require(lps.proximal.lr0 == lr0 && lps.proximal.decay_factor == factor &&
                lps.proximal.decay_every == every,
            task + ": proximal step schedule");
  };
  expect("box-inpaint", 3, 4, 0.1, 0.65, 10);
  expect("random-inpaint", 3, 5, 0.1, 0.65, 10);
  expect("gaussian-deblur", 3, 6, 0.1, 0.65, 10);
  expect("motion-deblur", 3, 6, 0.1, 0.65, 10);
  expect("super-resolution", 5, 4, 0.5, 0.85, 5);

  const std::vector<double> t3 = time_schedule(40, 3);
  require(std::abs(t3.front() - 1.0) <= 1e-15 && std::abs(t3.back() - 3.0 / 43.0) <= 1e-15,
          "alpha=3 schedule endpoints");
  const std::vector<double> t5 = time_schedule(40, 5);
  require(std::abs(t5.back() - 1.0 / 9.0) <= 1e-15, "alpha=5 schedule endpoint");
  require(rho_schedule_name(default_lps_for_task("box-inpaint").rho) == "sqrt-one-minus-sigma",
          "default rho name");
  return "5 tasks and both schedule endpoints match";
}

// ---------------------------------------------------------------------------
// 8. On the synthetic inpainting benchmark the Langevin budget earns its
//    keep and the decaying schedule matches the fixed one.

std::string criterion_8() {
  const fs::path out = fs::temp_directory_path() / "flowlps-acc8";
  fs::remove_all(out);

  ExperimentConfig cfg = default_config_for_task("random-inpaint");
  cfg.shape = SignalShape::vec(16);
  cfg.instances = 50;
  cfg.seed = 1234;
  cfg.out_dir = (out / "run").string();

  cfg.solvers.clear();
  {
    SolverSpec s;
    s.name = "flowlps";
    s.preset = "flowlps";
    s.lps = default_lps_for_task("random-inpaint");
    cfg.solvers.push_back(s);
  }
  {
    SolverSpec s;
    s.name = "pure-proximal";
    s.preset = "pure-proximal";
    s.lps = preset_pure_proximal(default_lps_for_task("random-inpaint"));
    cfg.solvers.push_back(s);
  }
  {
    SolverSpec s;
    s.name = "fixed6";
    s.preset = "flowlps";
    s.lps = default_lps_for_task("random-inpaint");
    s.lps.n_langevin = LangevinSchedule::fixed(6);
    cfg.solvers.push_back(s);
  }
  {
    SolverSpec s;
    s.name = "decay6to1";
    s.preset = "flowlps";
    s.lps = default_lps_for_task("random-inpaint");
    s.lps.n_langevin = LangevinSchedule::linear_decay(6, 1);
    cfg.solvers.push_back(s);
  }

  const BenchResult res = run_benchmark(cfg);
  fs::remove_all(out);
  require(res.summaries.size() == 4, "expected 4 summaries");
  const double med_lps = res.summaries[0].median_mse;
  const double med_prox = res.summaries[1].median_mse;
  const double med_fixed = res.summaries[2].median_mse;
  const double med_decay = res.summaries[3].median_mse;

  require(med_lps <= med_prox, "langevin budget lost: median MSE " + fmt(med_lps) +
                                   " vs pure-proximal " + fmt(med_prox));
  const double gap = std::abs(med_decay - med_fixed);
  require(gap <= 0.05 * med_fixed, "decaying schedule off by " +
                                       fmt(100.0 * gap / med_fixed) + "% of the fixed median");
  return "50 instances: median MSE " + fmt(med_lps) + " (flowlps) vs " + fmt(med_prox) +
         " (pure-proximal); schedule gap " + fmt(100.0 * gap / med_fixed) + "%";
}

// ---------------------------------------------------------------------------
// 9. Repeated runs with the same configuration produce byte-identical
//    artifacts.

std::vector<std::pair<std::string, std::string>> dir_contents(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out.emplace_back(fs::relative(entry.path(), root).string(), ss.str());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string criterion_9() {
  const fs::path out = fs::temp_directory_path() / "flowlps-acc9";
  fs::remove_all(out);

  ExperimentConfig cfg = default_config_for_task("random-inpaint");
  cfg.shape = SignalShape::vec(8);
  cfg.instances = 2;
  cfg.seed = 31;
  for (auto& s : cfg.solvers) s.lps.n_steps = 12;

  cfg.out_dir = (out / "a").string();
  run_benchmark(cfg);
  cfg.out_dir = (out / "b").string();
  run_benchmark(cfg);

  const auto a = dir_contents(out / "a");
  const auto b = dir_contents(out / "b");
  require(!a.empty(), "no artifacts written");
  require(a.size() == b.size(), "artifact sets differ in size");
  for (size_t i = 0; i < a.size(); ++i) {
    require(a[i].first == b[i].first, "artifact names differ: " + a[i].first);
    require(a[i].second == b[i].second, "artifact bytes differ: " + a[i].first);
  }

  cfg.instances = 1;
  cfg.out_dir = (out / "c").string();
  run_solve(cfg);
  cfg.out_dir = (out / "d").string();
  run_solve(cfg);
  const auto c = dir_contents(out / "c");
  const auto d = dir_contents(out / "d");
  require(!c.empty() && c.size() == d.size(), "solve artifact sets differ");
  for (size_t i = 0; i < c.size(); ++i)
    require(c[i] == d[i], "solve artifact differs: " + c[i].first);

  const size_t total = a.size() + c.size();
  fs::remove_all(out);
  return std::to_string(total) + " artifacts byte-identical across reruns";
}

struct Criterion {
  int id;
  double budget_s;  // 0 = unenforced
  std::function<std::string()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (arg.rfind("--only=", 0) == 0) {
      only = std::atoi(arg.c_str() + 7);
    } else {
      std::cerr << "usage: " << argv[0] << " [--only N]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, 10.0, criterion_1},  {2, 60.0, criterion_2}, {3, 60.0, criterion_3},
      {4, 10.0, criterion_4},  {5, 10.0, criterion_5}, {6, 0.0, criterion_6},
      {7, 0.0, criterion_7},   {8, 300.0, criterion_8}, {9, 0.0, criterion_9},
  };

  bool all_pass = true;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = true;
    try {
      detail = c.run();
    } catch (const CriterionFailure& f) {
      pass = false;
      detail = f.detail;
    } catch (const std::exception& e) {
      pass = false;
      detail = std::string("unexpected error: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (pass && c.budget_s > 0.0 && elapsed > c.budget_s) {
      pass = false;
      detail = "over time budget: " + fmt(elapsed) + "s > " + fmt(c.budget_s) + "s";
    }
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << " (" << detail
              << "; " << fmt(elapsed) << "s)" << std::endl;
    all_pass = all_pass && pass;
  }
  return all_pass ? 0 : 1;
}
