# Copyright (C) 2026 The FlowLPS Authors
# SPDX-License-Identifier: Apache-2.0
import numpy as np
import pytest

import flowlps


def test_blob_prior_shape():
    prior = flowlps.make_blob_prior(1, 16)
    assert prior.dim == 16
    assert prior.num_components == 3
    w = prior.weights()
    assert pytest.approx(sum(w)) == 1.0
    draws = prior.sample(seed=7, n=32)
    assert draws.shape == (32, 16)
    again = prior.sample(seed=7, n=32)
    assert np.array_equal(draws, again)


def test_velocity_matches_conditional_mean():
    prior = flowlps.make_blob_prior(1, 8)
    x = np.full(8, 0.4)
    t = 0.5
    v = flowlps.velocity(prior, t, x)
    m = flowlps.conditional_mean_x0(prior, t, x)
    assert np.allclose(v, (x - m) / t, atol=1e-12)


def test_solve_recovers_noiseless_identity():
    prior = flowlps.make_blob_prior(1, 8)
    rng = np.random.default_rng(0)
    truth = prior.sample(seed=3, n=1)[0]
    op = flowlps.ForwardOperator.identity(8)
    y = op.apply(truth) + 1e-4 * rng.standard_normal(8)

    out = flowlps.solve_lps(prior, op, y, sigma_n=1e-4, n_langevin="0", seed=1)
    rec = out["reconstruction"]
    assert rec.shape == (8,)
    assert np.mean((rec - truth) ** 2) < 1e-4

    phases = {r["phase"] for r in out["trajectory"]}
    assert phases == {"tweedie", "pcn", "langevin", "proximal", "interp"}


def test_solves_are_deterministic():
    prior = flowlps.make_blob_prior(1, 8)
    op = flowlps.ForwardOperator.mask(8, [0, 3, 5])
    y = np.array([0.4, 0.5, 0.6])
    a = flowlps.solve_lps(prior, op, y, sigma_n=0.03, seed=11)
    b = flowlps.solve_lps(prior, op, y, sigma_n=0.03, seed=11)
    assert np.array_equal(a["reconstruction"], b["reconstruction"])
    c = flowlps.solve_lps(prior, op, y, sigma_n=0.03, seed=12)
    assert not np.array_equal(a["reconstruction"], c["reconstruction"])


def test_presets_run():
    prior = flowlps.make_blob_prior(1, 8)
    op = flowlps.ForwardOperator.identity(8)
    y = np.full(8, 0.5)
    for preset in ["flowlps", "pure-proximal", "pure-langevin", "unconditional",
                   "single-gradient"]:
        out = flowlps.solve_lps(prior, op, y, sigma_n=0.05, preset=preset,
                                sg_step_size=0.3)
        assert np.all(np.isfinite(out["reconstruction"]))


def test_posterior_reweighting():
    w = [0.5, 0.5]
    means = [np.array([-1.0]), np.array([1.0])]
    covs = [np.eye(1) * 0.04, np.eye(1) * 0.04]
    prior = flowlps.GaussianMixture(w, means, covs)
    op = flowlps.ForwardOperator.identity(1)
    post = flowlps.posterior_x0_given_y(prior, op, np.array([1.0]), 0.2)
    pw = post.weights()
    assert pw[1] > 0.99


def test_verify_fast_all_pass():
    results = flowlps.verify_fast()
    assert results, "verification suite returned no checks"
    failures = [name for name, ok, detail in results if not ok]
    assert failures == []
