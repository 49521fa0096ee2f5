// Copyright (C) 2026 The FlowLPS Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "flowlps/errors.hpp"
#include "flowlps/oracle.hpp"
#include "flowlps/sampler.hpp"
#include "test_support.hpp"

using namespace flowlps;

TEST_CASE("time schedule runs the leading part of a uniform grid") {
  SUBCASE("default resolution") {
    const std::vector<double> ts = time_schedule(40, 3);
    REQUIRE(ts.size() == 41);
    CHECK(ts.front() == 1.0);
    CHECK(std::abs(ts.back() - 3.0 / 43.0) < 1e-15);
    for (size_t i = 1; i < ts.size(); ++i)
      CHECK(std::abs((ts[i - 1] - ts[i]) - 1.0 / 43.0) < 1e-15);
  }
  SUBCASE("single step without truncation") {
    const std::vector<double> ts = time_schedule(1, 0);
    REQUIRE(ts.size() == 2);
    CHECK(ts[0] == 1.0);
    CHECK(ts[1] == 0.0);
  }
  SUBCASE("larger truncation") {
    CHECK(std::abs(time_schedule(40, 5).back() - 1.0 / 9.0) < 1e-15);
  }
  SUBCASE("at least one step") {
    CHECK_THROWS_AS(time_schedule(0, 3), std::invalid_argument);
  }
}

TEST_CASE("mixing coefficient schedules") {
  CHECK(resolve_rho(RhoSchedule::zero(), 0.5) == 0.0);
  CHECK(resolve_rho(RhoSchedule::zero(), 0.0) == 0.0);
  CHECK(resolve_rho(RhoSchedule::constant(0.3), 0.9) == 0.3);
  CHECK(resolve_rho(RhoSchedule::one_minus_sigma(), 0.0) == 1.0);
  CHECK(std::abs(resolve_rho(RhoSchedule::sqrt_one_minus_sigma(), 3.0 / 43.0) -
                 std::sqrt(40.0 / 43.0)) < 1e-12);
  CHECK_THROWS_AS(resolve_rho(RhoSchedule::sqrt_one_minus_sigma(), 1.5), std::invalid_argument);
  CHECK_THROWS_AS(resolve_rho(RhoSchedule::constant(1.5), 0.5), std::invalid_argument);
}

TEST_CASE("schedule names") {
  CHECK(rho_schedule_name(RhoSchedule::zero()) == "zero");
  CHECK(rho_schedule_name(RhoSchedule::one_minus_sigma()) == "one-minus-sigma");
  CHECK(rho_schedule_name(RhoSchedule::sqrt_one_minus_sigma()) == "sqrt-one-minus-sigma");
  CHECK(langevin_schedule_name(LangevinSchedule::fixed(6)) == "6");
  CHECK(langevin_schedule_name(LangevinSchedule::linear_decay(6, 1)) == "6->1");
}

TEST_CASE("langevin step counts interpolate linearly") {
  const LangevinSchedule fixed = LangevinSchedule::fixed(5);
  for (int i = 0; i < 40; ++i) CHECK(resolve_n_langevin(fixed, i, 40) == 5);

  const LangevinSchedule decay = LangevinSchedule::linear_decay(6, 1);
  CHECK(resolve_n_langevin(decay, 0, 40) == 6);
  CHECK(resolve_n_langevin(decay, 39, 40) == 1);
  // 6 - 5 * 20/39 = 3.436 rounds to 3
  CHECK(resolve_n_langevin(decay, 20, 40) == 3);

  const LangevinSchedule to_zero = LangevinSchedule::linear_decay(4, 0);
  CHECK(resolve_n_langevin(to_zero, 39, 40) == 0);

  CHECK_THROWS_AS(resolve_n_langevin(fixed, 40, 40), std::invalid_argument);
  CHECK_THROWS_AS(resolve_n_langevin(fixed, -1, 40), std::invalid_argument);
}

TEST_CASE("re-noising mixes the predicted noise with a fresh draw") {
  RandomStream rng(100);
  const Eigen::VectorXd x = rng.normal_vector(6);

  SUBCASE("rho = 1 returns the input unchanged") {
    RandomStream r(1);
    CHECK(testsup::bitwise_equal(pcn_renoise(x, 1.0, r), x));
  }
  SUBCASE("rho = 0 is a fresh standard draw, independent of the input") {
    RandomStream r1(7);
    RandomStream r2(7);
    const Eigen::VectorXd out = pcn_renoise(x, 0.0, r1);
    CHECK(testsup::bitwise_equal(out, r2.normal_vector(6)));
    RandomStream r3(7);
    CHECK(testsup::bitwise_equal(pcn_renoise(10.0 * x, 0.0, r3), out));
  }
  SUBCASE("intermediate rho preserves unit variance") {
    RandomStream r(2026);
    const int n = 25000, d = 4;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd in = r.normal_vector(d);
      const Eigen::VectorXd out = pcn_renoise(in, 0.6, r);
      for (int j = 0; j < d; ++j) {
        sum += out[j];
        sum_sq += out[j] * out[j];
      }
    }
    const double count = double(n) * d;
    const double mean = sum / count;
    const double var = sum_sq / count - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(count));
    CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / count));
  }
  SUBCASE("rho outside [0, 1] is rejected") {
    RandomStream r(1);
    CHECK_THROWS_AS(pcn_renoise(x, -0.1, r), std::invalid_argument);
    CHECK_THROWS_AS(pcn_renoise(x, 1.1, r), std::invalid_argument);
  }
}

namespace {

Measurement exact_identity_measurement(const Eigen::VectorXd& x, double sigma) {
  const int d = static_cast<int>(x.size());
  RandomStream noise(0);
  return simulate_measurement(x, ForwardOperator::identity(d), Decoder::identity(d), sigma, noise);
}

}  // namespace

TEST_CASE("langevin refinement basics") {
  RandomStream rng(55);
  const Eigen::VectorXd anchor = rng.normal_vector(4);
  RandomStream noise(56);
  const Measurement meas = simulate_measurement(anchor, ForwardOperator::mask(4, {0, 2}),
                                                Decoder::identity(4), 0.0, noise);

  SUBCASE("zero steps return the start point") {
    RandomStream r(1);
    const Eigen::VectorXd z = rng.normal_vector(4);
    CHECK(testsup::bitwise_equal(langevin_phase(meas, anchor, z, 0.5, 0, 1e-4, r), z));
  }
  SUBCASE("at the anchor with exact data the update is pure noise") {
    RandomStream r1(9);
    RandomStream r2(9);
    const double zeta = 1e-4;
    const Eigen::VectorXd out = langevin_phase(meas, anchor, anchor, 0.5, 1, zeta, r1);
    const Eigen::VectorXd expected = anchor + std::sqrt(2.0 * zeta) * r2.normal_vector(4);
    CHECK(testsup::bitwise_equal(out, expected));
  }
  SUBCASE("zero measurement noise is rejected") {
    RandomStream r(1);
    CHECK_THROWS_AS(langevin_phase(meas, anchor, anchor, 0.5, 1, 1e-4, r),
                    std::invalid_argument);
  }
  SUBCASE("t must be positive when stepping") {
    RandomStream r(1);
    const Measurement noisy = exact_identity_measurement(anchor, 0.1);
    CHECK_THROWS_AS(langevin_phase(noisy, anchor, anchor, 0.0, 1, 1e-4, r),
                    std::invalid_argument);
  }
}

TEST_CASE("proximal consolidation matches scalar ridge") {
  const Measurement meas = exact_identity_measurement(Eigen::VectorXd::Zero(1), 1.0);
  Measurement pinned = meas;
  pinned.y[0] = 1.0;
  // lambda = sigma^2 / t = 1
  const Eigen::VectorXd z =
      proximal_phase(pinned, Eigen::VectorXd::Zero(1), 1.0, ProximalSolver::exact_ridge(), 15);
  CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("a dominant regularizer pins the proximal solution to the anchor") {
  Eigen::VectorXd y(1);
  y << 1.0;
  const Measurement meas(y, ForwardOperator::identity(1), Decoder::identity(1), 1e3);
  // lambda = 1e6
  const Eigen::VectorXd z =
      proximal_phase(meas, Eigen::VectorXd::Zero(1), 1.0, ProximalSolver::exact_ridge(), 15);
  CHECK(std::abs(z[0]) <= 1e-5 * std::abs(y[0]));
}

TEST_CASE("iterative proximal solvers agree with the direct one") {
  RandomStream rng(123);
  const int d = 16, m = 8;
  const Eigen::MatrixXd a = testsup::conditioned_matrix(m, d, 1.5, 2.0, rng);
  const Eigen::VectorXd y = rng.normal_vector(m);
  const Eigen::VectorXd anchor = rng.normal_vector(d);
  const double sigma = 0.03, t = 0.5;
  const Measurement meas(y, ForwardOperator::dense(a), Decoder::identity(d), sigma);

  const Eigen::VectorXd ridge =
      proximal_phase(meas, anchor, t, ProximalSolver::exact_ridge(), 0);
  const Eigen::VectorXd ref = oracle::ridge_closed_form(a, y, sigma * sigma / t, anchor);
  CHECK((ridge - ref).norm() < 1e-8 * ref.norm());

  const Eigen::VectorXd cg =
      proximal_phase(meas, anchor, t, ProximalSolver::conjugate_gradient(), 0);
  CHECK((cg - ref).norm() < 1e-8 * ref.norm());

  const Eigen::VectorXd gd =
      proximal_phase(meas, anchor, t, ProximalSolver::gradient_descent(0.1, 0.65, 10), 150);
  CHECK((gd - ref).norm() < 1e-4 * ref.norm());
}

TEST_CASE("closed-form proximal solvers require the identity decoder") {
  RandomStream rng(5);
  Eigen::MatrixXd w(2, 2);
  w << 0.1, -0.2, 0.3, 0.05;
  const Decoder smooth = Decoder::smooth(w, Eigen::VectorXd::Zero(2), 0.5);
  const Measurement meas(Eigen::VectorXd::Zero(2), ForwardOperator::identity(2), smooth, 0.1);
  CHECK_THROWS_AS(
      proximal_phase(meas, Eigen::VectorXd::Zero(2), 0.5, ProximalSolver::exact_ridge(), 1),
      UnsupportedOperation);
  CHECK_THROWS_AS(
      proximal_phase(meas, Eigen::VectorXd::Zero(2), 0.5, ProximalSolver::conjugate_gradient(), 1),
      UnsupportedOperation);
  // gradient descent handles it
  const Eigen::VectorXd z =
      proximal_phase(meas, Eigen::VectorXd::Zero(2), 0.5, ProximalSolver::gradient_descent(), 5);
  CHECK(std::isfinite(z.norm()));
}

TEST_CASE("proximal phase rejects t = 0") {
  const Measurement meas = exact_identity_measurement(Eigen::VectorXd::Zero(2), 0.1);
  CHECK_THROWS_AS(
      proximal_phase(meas, Eigen::VectorXd::Zero(2), 0.0, ProximalSolver::exact_ridge(), 1),
      std::invalid_argument);
}

TEST_CASE("config validation") {
  LPSConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  SUBCASE("zeta") {
    cfg.zeta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("budget must cover the langevin schedule") {
    cfg.n_langevin = LangevinSchedule::fixed(20);
    cfg.n_total = 15;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("const rho range") {
    cfg.rho = RhoSchedule::constant(1.5);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("step count") {
    cfg.n_steps = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("descent parameters") {
    cfg.proximal = ProximalSolver::gradient_descent(0.0);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}

TEST_CASE("one flow step with everything disabled is one Euler step") {
  const GaussianMixture prior = testsup::planar_two_component();
  RandomStream rng(31);
  const Measurement meas = exact_identity_measurement(rng.normal_vector(2), 0.1);

  LPSConfig cfg;
  cfg.n_steps = 40;
  cfg.alpha = 3;
  cfg.n_langevin = LangevinSchedule::fixed(0);
  cfg.n_total = 0;
  cfg.rho = RhoSchedule::constant(1.0);

  SamplerState state;
  state.t = 1.0;
  state.z = rng.normal_vector(2);
  state.x0_anchor = state.z;
  state.x1_hat = state.z;
  state.z_star = state.z;
  state.step_index = 0;

  RandomStream step_rng(32);
  const SamplerState next = flow_step(state, prior, meas, cfg, step_rng);

  const double t = 1.0, t_next = 1.0 - 1.0 / 43.0;
  const TweediePair p = tweedie_pair(prior, t, state.z);
  const Eigen::VectorXd expected = (1.0 - t_next) * p.x0_hat + t_next * p.x1_hat;
  CHECK(testsup::bitwise_equal(next.z, expected));

  const Eigen::VectorXd v = velocity(prior, t, state.z);
  const Eigen::VectorXd euler = state.z - (1.0 / 43.0) * v;
  CHECK((next.z - euler).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("one step at t = 1 with tiny noise pins the proximal solution to the data") {
  const GaussianMixture prior = testsup::planar_two_component();
  Eigen::VectorXd y(2);
  y << 0.7, -0.3;
  const Measurement meas(y, ForwardOperator::identity(2), Decoder::identity(2), 1e-4);

  LPSConfig cfg;
  cfg.n_langevin = LangevinSchedule::fixed(0);  // the chain needs zeta < 2 sigma^2 to be stable
  cfg.n_total = 15;
  cfg.proximal = ProximalSolver::exact_ridge();

  SamplerState state;
  state.t = 1.0;
  RandomStream rng(77);
  state.z = rng.normal_vector(2);
  state.x0_anchor = state.z;
  state.x1_hat = state.z;
  state.z_star = state.z;
  state.step_index = 0;

  RandomStream step_rng(78);
  const SamplerState next = flow_step(state, prior, meas, cfg, step_rng);
  CHECK((next.z_star - y).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("flow steps are deterministic under a fixed stream") {
  const GaussianMixture prior = testsup::planar_two_component();
  RandomStream rng(41);
  const Measurement meas = exact_identity_measurement(rng.normal_vector(2), 0.05);

  LPSConfig cfg;
  cfg.n_langevin = LangevinSchedule::fixed(3);
  cfg.n_total = 15;

  SamplerState state;
  state.t = 1.0;
  state.z = rng.normal_vector(2);
  state.x0_anchor = state.z;
  state.x1_hat = state.z;
  state.z_star = state.z;
  state.step_index = 0;

  RandomStream r1(7);
  RandomStream r2(7);
  const SamplerState a = flow_step(state, prior, meas, cfg, r1);
  const SamplerState b = flow_step(state, prior, meas, cfg, r2);
  CHECK(testsup::bitwise_equal(a.z, b.z));
  CHECK(testsup::bitwise_equal(a.z_star, b.z_star));
  CHECK(testsup::bitwise_equal(a.x0_anchor, b.x0_anchor));
  CHECK(testsup::bitwise_equal(a.x1_hat, b.x1_hat));
}

TEST_CASE("solving a noiseless identity problem recovers the truth") {
  const GaussianMixture prior = testsup::planar_two_component();
  RandomStream truth_rng(2026);
  const Eigen::VectorXd x_true = prior.sample(truth_rng);
  RandomStream noise(1);
  const Measurement meas = simulate_measurement(x_true, ForwardOperator::identity(2),
                                                Decoder::identity(2), 1e-4, noise);

  LPSConfig cfg;
  cfg.n_langevin = LangevinSchedule::fixed(0);  // stability bound: zeta < 2 sigma^2
  cfg.n_total = 15;
  cfg.proximal = ProximalSolver::exact_ridge();
  cfg.seed = 3;

  const SolveResult r = solve(meas, prior, cfg);
  CHECK((r.reconstruction - x_true).squaredNorm() / 2.0 <= 1e-4);
}

TEST_CASE("a default run emits one record per phase per step") {
  const GaussianMixture prior = testsup::planar_two_component();
  RandomStream truth_rng(11);
  const Eigen::VectorXd x_true = prior.sample(truth_rng);
  RandomStream noise(12);
  const Measurement meas = simulate_measurement(x_true, ForwardOperator::mask(2, {0}),
                                                Decoder::identity(2), 0.03, noise);

  LPSConfig cfg;  // 40 steps, 6 langevin, budget 15
  cfg.seed = 5;
  const SolveResult r = solve(meas, prior, cfg, 0, &x_true);

  CHECK(r.trajectory.num_steps() == 40);
  REQUIRE(r.trajectory.records.size() == 200);
  const char* phases[5] = {"tweedie", "pcn", "langevin", "proximal", "interp"};
  for (int i = 0; i < 40; ++i) {
    for (int p = 0; p < 5; ++p) {
      const PhaseRecord& rec = r.trajectory.records[static_cast<size_t>(5 * i + p)];
      CHECK(rec.step == i);
      CHECK(rec.phase == phases[p]);
      CHECK(std::isfinite(rec.residual_sq));
      if (rec.phase == "proximal") CHECK(rec.mse_true.has_value());
    }
  }

  const SolveResult again = solve(meas, prior, cfg, 0, &x_true);
  CHECK(testsup::bitwise_equal(again.reconstruction, r.reconstruction));
}

TEST_CASE("solve validates its inputs") {
  const GaussianMixture prior = testsup::planar_two_component();
  const Measurement meas = exact_identity_measurement(Eigen::VectorXd::Zero(2), 0.0);
  LPSConfig cfg;
  CHECK_THROWS_AS(solve(meas, prior, cfg), std::invalid_argument);  // sigma_n = 0

  const Measurement ok = exact_identity_measurement(Eigen::VectorXd::Zero(2), 0.1);
  const GaussianMixture wrong_dim = testsup::std_normal(3);
  CHECK_THROWS_AS(solve(ok, wrong_dim, cfg), std::invalid_argument);
}
