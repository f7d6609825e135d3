"""Shared generators for the test suite."""

import numpy as np
import pytest

from cgcwm.model import ComponentParams, ContaminatedBlock, CwmParams, RegressionBlock


def random_spd(rng, dim, scale=1.0):
    """Random symmetric positive-definite matrix with bounded conditioning."""
    a = rng.standard_normal((dim, dim))
    return scale * (a @ a.T + dim * np.eye(dim))


def random_cwm_params(rng, k=2, d_x=2, d_y=2, contaminated=True):
    """Random valid parameters for property tests."""
    pi = rng.dirichlet(np.full(k, 5.0))
    components = []
    for j in range(k):
        if contaminated:
            alpha_x, eta_x = rng.uniform(0.6, 0.99), rng.uniform(1.5, 200.0)
            alpha_y, eta_y = rng.uniform(0.6, 0.99), rng.uniform(1.5, 200.0)
        else:
            alpha_x = eta_x = alpha_y = eta_y = 1.0
        components.append(
            ComponentParams(
                pi=float(pi[j]),
                x_block=ContaminatedBlock(
                    mu=rng.uniform(-5, 5, size=d_x),
                    sigma=random_spd(rng, d_x),
                    alpha=alpha_x,
                    eta=eta_x,
                ),
                y_block=RegressionBlock(
                    beta=rng.uniform(-2, 2, size=(1 + d_x, d_y)),
                    sigma=random_spd(rng, d_y, scale=0.5),
                    alpha=alpha_y,
                    eta=eta_y,
                ),
            )
        )
    # Renormalize exactly: dirichlet draws sum to 1 only within float error.
    total = sum(c.pi for c in components)
    components = [
        ComponentParams(pi=c.pi / total, x_block=c.x_block, y_block=c.y_block)
        for c in components
    ]
    return CwmParams(components=tuple(components), d_x=d_x, d_y=d_y)


def wide_two_line_params():
    """Two parallel regression lines over a wide, overlapping covariate range.

    Uniform box noise centered on this data stays inside the bulk's
    covariate span, so it reads as response outliers rather than as a
    separable third cluster; used by the noise-robustness studies.
    """
    comps = (
        ComponentParams(
            pi=0.5,
            x_block=ContaminatedBlock(mu=[-3.0], sigma=[[2.25]], alpha=1.0, eta=1.0),
            y_block=RegressionBlock(
                beta=[[3.0], [0.8]], sigma=[[0.25]], alpha=1.0, eta=1.0
            ),
        ),
        ComponentParams(
            pi=0.5,
            x_block=ContaminatedBlock(mu=[3.0], sigma=[[2.25]], alpha=1.0, eta=1.0),
            y_block=RegressionBlock(
                beta=[[-3.0], [0.8]], sigma=[[0.25]], alpha=1.0, eta=1.0
            ),
        ),
    )
    return CwmParams(components=comps, d_x=1, d_y=1)


def two_line_params(alpha=1.0, eta=1.0, sigma_y=0.04):
    """Two well-separated regression lines in one covariate, one response."""
    comps = (
        ComponentParams(
            pi=0.5,
            x_block=ContaminatedBlock(mu=[-4.0], sigma=[[1.0]], alpha=alpha, eta=eta),
            y_block=RegressionBlock(
                beta=[[1.0], [1.0]], sigma=[[sigma_y]], alpha=alpha, eta=eta
            ),
        ),
        ComponentParams(
            pi=0.5,
            x_block=ContaminatedBlock(mu=[4.0], sigma=[[1.0]], alpha=alpha, eta=eta),
            y_block=RegressionBlock(
                beta=[[-1.0], [-0.5]], sigma=[[sigma_y]], alpha=alpha, eta=eta
            ),
        ),
    )
    return CwmParams(components=comps, d_x=1, d_y=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
