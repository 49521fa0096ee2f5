// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include "flowlps/verify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "flowlps/baselines.hpp"
#include "flowlps/bench.hpp"
#include "flowlps/config.hpp"
#include "flowlps/dataset.hpp"
#include "flowlps/flow.hpp"
#include "flowlps/metrics.hpp"
#include "flowlps/oracle.hpp"
#include "flowlps/sampler.hpp"
#include "flowlps/textio.hpp"

namespace flowlps {

namespace {

namespace fs = std::filesystem;
constexpr double kLog2Pi = 1.8378770664093454836;

GaussianMixture scalar_two_component() {
  std::vector<GaussianMixture::Component> comps(2);
  comps[0] = {0.4, Eigen::VectorXd::Constant(1, -1.2), Eigen::MatrixXd::Constant(1, 1, 0.09)};
  comps[1] = {0.6, Eigen::VectorXd::Constant(1, 0.8), Eigen::MatrixXd::Constant(1, 1, 0.0625)};
  return GaussianMixture(std::move(comps));
}

GaussianMixture planar_two_component() {
  std::vector<GaussianMixture::Component> comps(2);
  Eigen::MatrixXd c0(2, 2), c1(2, 2);
  c0 << 0.3, 0.1, 0.1, 0.2;
  c1 << 0.2, -0.05, -0.05, 0.25;
  Eigen::VectorXd m0(2), m1(2);
  m0 << -0.8, 0.5;
  m1 << 0.8, -0.5;
  comps[0] = {0.45, m0, c0};
  comps[1] = {0.55, m1, c1};
  return GaussianMixture(std::move(comps));
}

GaussianMixture standard_normal(int d) {
  std::vector<GaussianMixture::Component> comps(1);
  comps[0] = {1.0, Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d)};
  return GaussianMixture(std::move(comps));
}

// Well-conditioned wide operator with singular values in [1.5, 2].
Eigen::MatrixXd conditioned_operator(int m, int d, RandomStream& rng) {
  Eigen::MatrixXd gu(m, m), gv(d, d);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) gu(r, c) = rng.normal();
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) gv(r, c) = rng.normal();
  const Eigen::MatrixXd u = Eigen::HouseholderQR<Eigen::MatrixXd>(gu).householderQ();
  const Eigen::MatrixXd v = Eigen::HouseholderQR<Eigen::MatrixXd>(gv).householderQ();
  Eigen::VectorXd s(m);
  for (int i = 0; i < m; ++i) s[i] = 1.5 + 0.5 * (m > 1 ? double(i) / double(m - 1) : 0.0);
  return u * s.asDiagonal() * v.leftCols(m).transpose();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Runner {
  std::vector<CheckResult> results;

  void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    CheckResult r;
    r.name = name;
    try {
      auto [pass, detail] = body();
      r.pass = pass;
      r.detail = std::move(detail);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  }
};

void add_fast_checks(Runner& runner) {
  runner.run("schedule-grid", [] {
    const auto ts = time_schedule(40, 3);
    bool ok = ts.size() == 41 && ts.front() == 1.0;
    ok = ok && std::abs(ts.back() - 3.0 / 43.0) <= 1e-15;
    for (size_t i = 0; i + 1 < ts.size(); ++i) ok = ok && ts[i] > ts[i + 1];
    return std::make_pair(ok, "end=" + format_double(ts.back()));
  });

  runner.run("tweedie-affine", [] {
    const GaussianMixture prior = planar_two_component();
    RandomStream rng = derive_stream(11, "verify-tweedie");
    double worst = 0.0;
    for (double t : {0.1, 0.4, 0.8, 1.0}) {
      for (int rep = 0; rep < 5; ++rep) {
        const Eigen::VectorXd x = rng.normal_vector(2) * 1.5;
        const TweediePair pair = tweedie_pair(prior, t, x);
        const double err =
            ((1.0 - t) * pair.x0_hat + t * pair.x1_hat - x).cwiseAbs().maxCoeff();
        worst = std::max(worst, err / std::max(1.0, x.cwiseAbs().maxCoeff()));
      }
    }
    return std::make_pair(worst <= 1e-12, "max rel err=" + format_double(worst));
  });

  runner.run("velocity-quadrature", [] {
    const GaussianMixture prior = scalar_two_component();
    const oracle::Grid1D grid = oracle::Grid1D::for_prior(prior);
    double worst = 0.0;
    for (double t : {0.1, 0.5, 0.9}) {
      for (double x : {-2.0, -0.3, 0.7, 1.5}) {
        const double ref = oracle::quadrature_velocity(prior, t, x, grid);
        const double got = velocity(prior, t, Eigen::VectorXd::Constant(1, x))[0];
        worst = std::max(worst, std::abs(got - ref) / std::max(1.0, std::abs(ref)));
      }
    }
    return std::make_pair(worst <= 1e-6, "max rel err=" + format_double(worst));
  });

  runner.run("grid-density-mass", [] {
    const GaussianMixture prior2 = planar_two_component();
    std::vector<Eigen::VectorXd> axes{oracle::Grid1D::uniform(-6.0, 6.0, 601).nodes,
                                      oracle::Grid1D::uniform(-6.0, 6.0, 601).nodes};
    const double mass2 = oracle::GridDensity::evaluate(prior2, axes).total_mass();
    const GaussianMixture prior1 = scalar_two_component();
    std::vector<Eigen::VectorXd> axis{oracle::Grid1D::uniform(-6.0, 6.0, 4001).nodes};
    const double mass1 = oracle::GridDensity::evaluate(prior1, axis).total_mass();
    const double err = std::max(std::abs(mass1 - 1.0), std::abs(mass2 - 1.0));
    return std::make_pair(err <= 1e-8, "max |mass-1|=" + format_double(err));
  });

  runner.run("posterior-grid-mean", [] {
    const GaussianMixture prior = planar_two_component();
    const ForwardOperator op = ForwardOperator::mask(2, {0});
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 0.3);
    const double sigma = 0.1;
    const GaussianMixture post = posterior_x0_given_y(prior, op, y, sigma);

    const Eigen::VectorXd axis = oracle::Grid1D::uniform(-5.0, 5.0, 801).nodes;
    const double h = axis[1] - axis[0];
    double mass = 0.0;
    Eigen::Vector2d first = Eigen::Vector2d::Zero();
    Eigen::VectorXd pt(2);
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
      const double wi = (i == 0 || i == axis.size() - 1) ? 0.5 : 1.0;
      for (Eigen::Index j = 0; j < axis.size(); ++j) {
        const double wj = (j == 0 || j == axis.size() - 1) ? 0.5 : 1.0;
        pt << axis[i], axis[j];
        const double r = (y[0] - pt[0]) / sigma;
        const double f =
            std::exp(prior.log_density(pt) - 0.5 * (r * r + kLog2Pi) - std::log(sigma));
        mass += wi * wj * f;
        first += wi * wj * f * pt;
      }
    }
    first /= mass;
    (void)h;  // common factor h^2 cancels in the ratio
    const double err = (post.mean() - first).cwiseAbs().maxCoeff();
    return std::make_pair(err <= 1e-8, "max mean err=" + format_double(err));
  });

  runner.run("ridge-solvers", [] {
    RandomStream rng = derive_stream(42, "verify-ridge");
    const Eigen::MatrixXd a = conditioned_operator(8, 16, rng);
    const Eigen::VectorXd y = rng.normal_vector(8);
    const Eigen::VectorXd anchor = rng.normal_vector(16);
    const double sigma = 0.03, t = 0.5;
    const double lambda = sigma * sigma / t;
    const Eigen::VectorXd ref = oracle::ridge_closed_form(a, y, lambda, anchor);

    const Measurement meas(y, ForwardOperator::dense(a), Decoder::identity(16), sigma);
    const Eigen::VectorXd z_cg =
        proximal_phase(meas, anchor, t, ProximalSolver::conjugate_gradient(), 1);
    const Eigen::VectorXd z_gd =
        proximal_phase(meas, anchor, t, ProximalSolver::gradient_descent(0.1, 0.65, 10), 150);
    const double cg_err = (z_cg - ref).norm() / ref.norm();
    const double gd_err = (z_gd - ref).norm() / ref.norm();
    return std::make_pair(cg_err <= 1e-8 && gd_err <= 1e-4,
                          "cg=" + format_double(cg_err) + " gd=" + format_double(gd_err));
  });

  runner.run("pcn-detailed-balance", [] {
    RandomStream rng = derive_stream(5, "verify-pcn");
    const int d = 8;
    double worst = 0.0;
    for (double rho : {0.3, 0.9}) {
      const double q_var = 1.0 - rho * rho;
      for (int rep = 0; rep < 100; ++rep) {
        const Eigen::VectorXd x = rng.normal_vector(d);
        const Eigen::VectorXd xp = pcn_renoise(x, rho, rng);
        auto log_pi = [](const Eigen::VectorXd& v) { return -0.5 * v.squaredNorm(); };
        auto log_q = [&](const Eigen::VectorXd& to, const Eigen::VectorXd& from) {
          return -0.5 * (to - rho * from).squaredNorm() / q_var;
        };
        const double log_ratio = log_pi(xp) + log_q(x, xp) - log_pi(x) - log_q(xp, x);
        worst = std::max(worst, std::abs(log_ratio));
      }
    }
    return std::make_pair(worst <= 1e-12, "max |log ratio|=" + format_double(worst));
  });

  runner.run("operator-adjoints", [] {
    RandomStream rng = derive_stream(9, "verify-ops");
    std::vector<ForwardOperator> ops;
    ops.push_back(ForwardOperator::mask(16, {0, 3, 7, 11}));
    ops.push_back(ForwardOperator::circular_blur(gaussian_kernel(5, 1.0), SignalShape::vec(16)));
    ops.push_back(ForwardOperator::circular_blur(gaussian_kernel(3, 0.8), SignalShape::image(4, 6)));
    ops.push_back(ForwardOperator::downsample(2, SignalShape::image(4, 6)));
    {
      Eigen::MatrixXd a(3, 5);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 5; ++c) a(r, c) = rng.normal();
      ops.push_back(ForwardOperator::dense(a));
    }
    double worst = 0.0;
    for (const auto& op : ops) {
      const Eigen::MatrixXd a = op.materialize();
      for (int rep = 0; rep < 4; ++rep) {
        const Eigen::VectorXd x = rng.normal_vector(op.in_dim());
        const Eigen::VectorXd u = rng.normal_vector(op.out_dim());
        const double lhs = op.apply(x).dot(u);
        const double rhs = x.dot(op.adjoint(u));
        worst = std::max(worst, std::abs(lhs - rhs));
        worst = std::max(worst, (op.apply(x) - a * x).cwiseAbs().maxCoeff());
      }
    }
    return std::make_pair(worst <= 1e-12, "max err=" + format_double(worst));
  });

  runner.run("em-duplicate-invariance", [] {
    RandomStream rng = derive_stream(21, "verify-em");
    Eigen::MatrixXd data(40, 2);
    for (int r = 0; r < 40; ++r) {
      data(r, 0) = 0.3 + rng.normal();
      data(r, 1) = -0.2 + 0.5 * rng.normal();
    }
    Eigen::MatrixXd twice(80, 2);
    twice << data, data;
    const GaussianMixture f1 = fit_em(data, 1);
    const GaussianMixture f2 = fit_em(twice, 1);
    const double err =
        std::max((f1.component(0).mean - f2.component(0).mean).cwiseAbs().maxCoeff(),
                 (f1.component(0).cov - f2.component(0).cov).cwiseAbs().maxCoeff());
    return std::make_pair(err <= 1e-12, "max param err=" + format_double(err));
  });

  runner.run("metrics-roundtrip", [] {
    const fs::path dir = fs::temp_directory_path() / "flowlps-verify";
    fs::create_directories(dir);
    const std::string path = (dir / "roundtrip.csv").string();
    std::vector<MetricsRecord> recs(2);
    recs[0] = {0, "flowlps/nl=6->1", "6->1", 15, "sqrt-one-minus-sigma",
               0.0123456789012345, 19.087, 0.25, 0.0, 77};
    recs[1] = {1, "pure-proximal", "0", 15, "zero", 3.5e-4, 34.5, 1.0 / 3.0, 0.0, 77};
    write_metrics_csv(path, recs);
    const auto back = read_metrics_csv(path);
    bool ok = back.size() == recs.size();
    for (size_t i = 0; ok && i < recs.size(); ++i) {
      ok = back[i].instance == recs[i].instance && back[i].solver == recs[i].solver &&
           back[i].n_langevin == recs[i].n_langevin && back[i].n_total == recs[i].n_total &&
           back[i].rho_schedule == recs[i].rho_schedule && back[i].mse == recs[i].mse &&
           back[i].psnr_db == recs[i].psnr_db && back[i].residual_sq == recs[i].residual_sq &&
           back[i].wall_s == recs[i].wall_s && back[i].seed == recs[i].seed;
    }
    return std::make_pair(ok, ok ? "exact round trip" : "mismatch after round trip");
  });

  runner.run("solve-repeatable", [] {
    const GaussianMixture prior = planar_two_component();
    const ForwardOperator op = ForwardOperator::mask(2, {0});
    const Decoder dec = Decoder::identity(2);
    RandomStream noise = derive_stream(3, "verify-noise");
    const Eigen::VectorXd x_true = Eigen::Vector2d(0.4, -0.6);
    const Measurement meas = simulate_measurement(x_true, op, dec, 0.05, noise);
    LPSConfig cfg;
    cfg.n_steps = 10;
    cfg.alpha = 3;
    cfg.n_langevin = LangevinSchedule::fixed(2);
    cfg.n_total = 5;
    cfg.proximal = ProximalSolver::exact_ridge();
    cfg.seed = 99;
    const SolveResult a = solve(meas, prior, cfg, 0);
    const SolveResult b = solve(meas, prior, cfg, 0);
    const bool same = a.z_star == b.z_star && a.reconstruction == b.reconstruction &&
                      a.trajectory.records.size() == b.trajectory.records.size();
    return std::make_pair(same, same ? "bitwise identical" : "runs diverged");
  });

  runner.run("bench-repeatable", [] {
    const fs::path base = fs::temp_directory_path() / "flowlps-verify" / "bench";
    fs::remove_all(base);
    ExperimentConfig cfg = default_config_for_task("random-inpaint");
    cfg.shape = SignalShape::vec(12);
    cfg.instances = 2;
    cfg.seed = 7;
    cfg.solvers[0].lps.n_steps = 8;
    SolverSpec pp;
    pp.name = "pure-proximal";
    pp.preset = "pure-proximal";
    pp.lps = preset_pure_proximal(cfg.solvers[0].lps);
    cfg.solvers.push_back(pp);

    cfg.out_dir = (base / "a").string();
    run_benchmark(cfg);
    cfg.out_dir = (base / "b").string();
    run_benchmark(cfg);

    size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
      if (!entry.is_regular_file()) continue;
      ++files;
      const fs::path rel = fs::relative(entry.path(), base / "a");
      if (slurp(entry.path()) != slurp(base / "b" / rel))
        return std::make_pair(false, "byte mismatch in " + rel.string());
    }
    return std::make_pair(files > 0, "files compared=" + std::to_string(files));
  });
}

void add_full_checks(Runner& runner) {
  runner.run("prior-sample-moments", [] {
    const GaussianMixture prior = planar_two_component();
    RandomStream rng = derive_stream(31, "verify-prior-moments");
    const Eigen::MatrixXd draws = prior.sample(rng, 100000);
    const auto rep = oracle::moment_distance(draws, prior);
    return std::make_pair(rep.within(4.0),
                          "max sigmas=" + format_double(std::max(rep.max_mean_sigmas,
                                                                 rep.max_cov_sigmas)));
  });

  runner.run("pcn-moment-preservation", [] {
    RandomStream rng = derive_stream(32, "verify-pcn-moments");
    const int d = 4, n = 100000;
    const GaussianMixture target = standard_normal(d);
    double worst = 0.0;
    for (double rho : {0.5, std::sqrt(1.0 - 3.0 / 43.0)}) {
      Eigen::MatrixXd draws(n, d);
      for (int i = 0; i < n; ++i)
        draws.row(i) = pcn_renoise(rng.normal_vector(d), rho, rng).transpose();
      const auto rep = oracle::moment_distance(draws, target);
      worst = std::max(worst, std::max(rep.max_mean_sigmas, rep.max_cov_sigmas));
    }
    return std::make_pair(worst <= 4.0, "max sigmas=" + format_double(worst));
  });

  runner.run("ula-stationary-covariance", [] {
    Eigen::MatrixXd a(2, 2);
    a << 3.0, 1.0, 0.5, 2.0;
    const double sigma = 0.2, t = 0.5, zeta = 1e-3;
    const Eigen::VectorXd anchor = Eigen::Vector2d(0.1, -0.2);
    const Eigen::VectorXd y = a * Eigen::Vector2d(0.2, -0.1);
    const Measurement meas(y, ForwardOperator::dense(a), Decoder::identity(2), sigma);

    const Eigen::MatrixXd precision =
        a.transpose() * a / (sigma * sigma) + Eigen::MatrixXd::Identity(2, 2) / t;
    const Eigen::MatrixXd ref = oracle::ula_stationary_covariance(precision, zeta);

    RandomStream rng = derive_stream(33, "verify-ula");
    Eigen::VectorXd z = anchor;
    for (int i = 0; i < 2000; ++i) z = langevin_phase(meas, anchor, z, t, 1, zeta, rng);
    const int n = 100000;
    Eigen::MatrixXd draws(n, 2);
    for (int i = 0; i < n; ++i) {
      z = langevin_phase(meas, anchor, z, t, 1, zeta, rng);
      draws.row(i) = z.transpose();
    }
    const Eigen::RowVectorXd mean = draws.colwise().mean();
    const Eigen::MatrixXd centered = draws.rowwise() - mean;
    const Eigen::MatrixXd emp = centered.transpose() * centered / double(n - 1);
    const double rel = (emp - ref).norm() / ref.norm();
    return std::make_pair(rel <= 0.05, "rel Frobenius err=" + format_double(rel));
  });

  runner.run("posterior-interpolant-moments", [] {
    const GaussianMixture prior = planar_two_component();
    const ForwardOperator op = ForwardOperator::mask(2, {0});
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 0.3);
    const double sigma = 0.1, t_next = 0.5;
    const GaussianMixture post = posterior_x0_given_y(prior, op, y, sigma);

    // Mixture of (1-t') x0 + t' eps with x0 | y posterior and eps standard
    // normal: shrink the means, shrink-and-inflate the covariances.
    std::vector<GaussianMixture::Component> comps;
    for (const auto& c : post.components()) {
      GaussianMixture::Component out;
      out.weight = c.weight;
      out.mean = (1.0 - t_next) * c.mean;
      out.cov = (1.0 - t_next) * (1.0 - t_next) * c.cov +
                t_next * t_next * Eigen::MatrixXd::Identity(2, 2);
      comps.push_back(std::move(out));
    }
    const GaussianMixture target(std::move(comps));

    RandomStream rng = derive_stream(34, "verify-interp");
    const int n = 50000;
    Eigen::MatrixXd draws(n, 2);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd x0 = post.sample(rng);
      const Eigen::VectorXd eps = pcn_renoise(rng.normal_vector(2), 0.7, rng);
      draws.row(i) = ((1.0 - t_next) * x0 + t_next * eps).transpose();
    }
    const auto rep = oracle::moment_distance(draws, target);
    return std::make_pair(rep.within(4.0),
                          "max sigmas=" + format_double(std::max(rep.max_mean_sigmas,
                                                                 rep.max_cov_sigmas)));
  });
}

}  // namespace

std::vector<CheckResult> verify_suite(VerifyLevel level) {
  Runner runner;
  add_fast_checks(runner);
  if (level == VerifyLevel::Full) add_full_checks(runner);
  return runner.results;
}

}  // namespace flowlps
