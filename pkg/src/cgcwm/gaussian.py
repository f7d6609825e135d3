"""Plain Gaussian cluster-weighted model: the nested baseline.

This is the model obtained from the contaminated one in the limit of unit
inflation and a typical proportion of one.  Its EM iteration is implemented
by calling the shared weighted maximization kernel with all down-weights
equal to one, so the nesting identity with the contaminated fit is a
structural guarantee rather than a numerical coincidence.  It serves both
as the comparison baseline and as the warm start for the contaminated fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ecm import (
    FitConfig,
    aitken_converged,
    e_step,
    observed_log_likelihood,
    weighted_mstep,
)
from .errors import (
    DegenerateDensity,
    DimensionMismatch,
    InitializationFailure,
    NotPositiveDefinite,
    SingularDesign,
)
from .model import ComponentParams, ContaminatedBlock, CwmParams, RegressionBlock

__all__ = [
    "GaussianComponent",
    "GaussianCwmParams",
    "GaussianCwmFit",
    "fit_gaussian_cwm",
    "fit_gaussian",
    "gaussian_cwm_log_likelihood",
]


@dataclass(frozen=True, eq=False)
class GaussianComponent:
    pi: float
    mu_x: np.ndarray
    sigma_x: np.ndarray
    beta: np.ndarray
    sigma_y: np.ndarray


@dataclass(frozen=True, eq=False)
class GaussianCwmParams:
    """Gaussian-family parameters: no contamination machinery."""

    components: tuple[GaussianComponent, ...]
    d_x: int
    d_y: int

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        total = sum(c.pi for c in self.components)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"component weights sum to {total!r}, expected 1")

    @property
    def k(self) -> int:
        return len(self.components)

    def to_contaminated(self) -> CwmParams:
        """Embed into the contaminated family at the nested limit (alpha=1, eta=1)."""
        return CwmParams(
            components=tuple(
                ComponentParams(
                    pi=c.pi,
                    x_block=ContaminatedBlock(mu=c.mu_x, sigma=c.sigma_x, alpha=1.0, eta=1.0),
                    y_block=RegressionBlock(beta=c.beta, sigma=c.sigma_y, alpha=1.0, eta=1.0),
                )
                for c in self.components
            ),
            d_x=self.d_x,
            d_y=self.d_y,
        )


@dataclass(eq=False)
class GaussianCwmFit:
    params: GaussianCwmParams
    z: np.ndarray
    loglik_trace: list[float]
    iterations: int
    converged: bool

    @property
    def loglik(self) -> float:
        return self.loglik_trace[-1]


def gaussian_cwm_log_likelihood(data: np.ndarray, params: GaussianCwmParams) -> float:
    return observed_log_likelihood(data, params.to_contaminated())


def _mstep(data: np.ndarray, z: np.ndarray, d_x: int, d_y: int, cov_floor: float) -> GaussianCwmParams:
    x, y = data[:, :d_x], data[:, d_x:]
    ones = np.ones_like(z)
    pi, mu_list, sigma_x_list, beta_list, sigma_y_list = weighted_mstep(
        x, y, z, ones, ones, cov_floor
    )
    return GaussianCwmParams(
        components=tuple(
            GaussianComponent(
                pi=float(pi[j]), mu_x=mu_list[j], sigma_x=sigma_x_list[j],
                beta=beta_list[j], sigma_y=sigma_y_list[j],
            )
            for j in range(z.shape[1])
        ),
        d_x=d_x,
        d_y=d_y,
    )


def fit_gaussian_cwm(
    data: np.ndarray,
    k: int,
    init_z: np.ndarray,
    d_x: int,
    d_y: int,
    epsilon: float = 1e-4,
    max_iter: int = 1000,
    cov_floor: float = 1e-8,
) -> GaussianCwmFit:
    """EM for the Gaussian baseline from given starting posteriors.

    Each M-step is the shared weighted kernel with unit weights; Aitken
    stopping uses the same tolerance as the contaminated fit.
    """
    data = np.asarray(data, dtype=float)
    z = np.asarray(init_z, dtype=float)
    if data.shape[1] != d_x + d_y:
        raise DimensionMismatch(f"data has {data.shape[1]} columns, expected {d_x + d_y}")
    if z.shape != (data.shape[0], k):
        raise DimensionMismatch(f"init_z shape {z.shape}, expected {(data.shape[0], k)}")
    if np.any(np.abs(z.sum(axis=1) - 1.0) > 1e-8):
        raise ValueError("init_z rows must sum to 1")
    trace: list[float] = []
    converged = False
    iterations = 0
    params = None
    for iterations in range(1, max_iter + 1):
        params = _mstep(data, z, d_x, d_y, cov_floor)
        embedded = params.to_contaminated()
        z = e_step(data, embedded).comp
        trace.append(observed_log_likelihood(data, embedded))
        if len(trace) >= 3 and aitken_converged(trace[-3], trace[-2], trace[-1], epsilon):
            converged = True
            break
    return GaussianCwmFit(
        params=params, z=z, loglik_trace=trace, iterations=iterations, converged=converged
    )


def fit_gaussian(data: np.ndarray, config: FitConfig) -> GaussianCwmFit:
    """Standalone Gaussian-family fit with the same restart policy as the
    contaminated fit: mixture warm start, EM to convergence, best of
    ``config.restarts`` independent starts."""
    from .ecm import _gmm_posteriors  # deferred: ecm initialization delegates back here

    data = np.asarray(data, dtype=float)
    if not np.all(np.isfinite(data)):
        raise ValueError("data must be finite-valued")
    best: GaussianCwmFit | None = None
    last_exc: Exception | None = None
    for child in np.random.SeedSequence(config.seed).spawn(config.restarts):
        seed = int(child.generate_state(1)[0])
        try:
            post = _gmm_posteriors(data, config.k, seed)
            result = fit_gaussian_cwm(
                data,
                config.k,
                post,
                d_x=config.d_x,
                d_y=config.d_y,
                epsilon=config.epsilon,
                max_iter=config.max_iter,
                cov_floor=config.cov_floor,
            )
        except (InitializationFailure, SingularDesign, NotPositiveDefinite, DegenerateDensity) as exc:
            last_exc = exc
            continue
        if best is None or result.loglik > best.loglik:
            best = result
    if best is None:
        assert last_exc is not None
        raise last_exc
    return best
