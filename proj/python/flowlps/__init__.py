# Copyright (C) 2026 The FlowLPS Authors
# SPDX-License-Identifier: Apache-2.0
"""Langevin-proximal posterior sampling over analytic flow priors."""

try:
    from ._flowlps import *  # noqa: F401,F403  (installed layout)
    from ._flowlps import __doc__ as _core_doc
except ImportError:  # pragma: no cover - build-tree layout with the module on sys.path
    from _flowlps import *  # noqa: F401,F403
    from _flowlps import __doc__ as _core_doc

__all__ = [
    "GaussianMixture",
    "ForwardOperator",
    "make_blob_prior",
    "gaussian_kernel",
    "time_schedule",
    "velocity",
    "conditional_mean_x0",
    "marginal_at",
    "posterior_x0_given_y",
    "solve_lps",
    "verify_fast",
]
