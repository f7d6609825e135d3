"""Numerically stable Gaussian and contaminated-Gaussian log-densities.

A contaminated Gaussian law is a two-part mixture sharing one mean: a
"typical" part with covariance ``sigma`` and weight ``alpha``, and an
"atypical" part with the covariance inflated by ``eta > 1`` and weight
``1 - alpha``.  Everything here works in log space because inflation
factors up to 500 create density ratios spanning hundreds of orders of
magnitude.

All functions are pure; :class:`CovFactor` values are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import expit

from .errors import DimensionMismatch, InvalidContamination, NotPositiveDefinite

LOG_2PI = math.log(2.0 * math.pi)

__all__ = [
    "CovFactor",
    "factor_covariance",
    "mahalanobis_sq",
    "mahalanobis_sq_rows",
    "log_gaussian_pdf",
    "log_contaminated_pdf",
    "typical_weight",
    "downweight",
]


@dataclass(frozen=True)
class CovFactor:
    """Lower-triangular Cholesky factor of a covariance matrix.

    ``lower @ lower.T`` reconstructs the covariance; ``log_det`` is the
    log-determinant of the covariance, i.e. twice the log of the factor's
    diagonal product.
    """

    dim: int
    lower: np.ndarray
    log_det: float


def factor_covariance(sigma: np.ndarray) -> CovFactor:
    """Factor a symmetric positive-definite matrix.

    Raises
    ------
    NotPositiveDefinite
        If the Cholesky factorization fails; signals a degenerate
        component covariance upstream.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise DimensionMismatch(f"covariance must be square, got shape {sigma.shape}")
    if not np.allclose(sigma, sigma.T, rtol=0.0, atol=1e-12):
        raise ValueError("covariance must be symmetric within 1e-12")
    try:
        lower = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    log_det = 2.0 * float(np.sum(np.log(np.diag(lower))))
    lower.setflags(write=False)
    return CovFactor(dim=sigma.shape[0], lower=lower, log_det=log_det)


def _check_dim(vec: np.ndarray, factor: CovFactor, name: str) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (factor.dim,):
        raise DimensionMismatch(f"{name} has shape {vec.shape}, expected ({factor.dim},)")
    return vec


def mahalanobis_sq(w, mu, factor: CovFactor) -> float:
    """Squared Mahalanobis distance of ``w`` from ``mu`` under the factored covariance."""
    w = _check_dim(w, factor, "w")
    mu = _check_dim(mu, factor, "mu")
    sol = solve_triangular(factor.lower, w - mu, lower=True, check_finite=False)
    return float(sol @ sol)


def mahalanobis_sq_rows(points: np.ndarray, mu: np.ndarray, factor: CovFactor) -> np.ndarray:
    """Squared Mahalanobis distance of each row of ``points`` (n, d) -> (n,)."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != factor.dim:
        raise DimensionMismatch(f"points shape {points.shape} incompatible with dim {factor.dim}")
    diff = points - np.asarray(mu, dtype=float)
    sol = solve_triangular(factor.lower, diff.T, lower=True, check_finite=False)
    return np.einsum("ij,ij->j", sol, sol)


def log_gaussian_pdf(w, mu, factor: CovFactor) -> float:
    """Multivariate Gaussian log-density at ``w``."""
    delta = mahalanobis_sq(w, mu, factor)
    return -0.5 * (factor.dim * LOG_2PI + factor.log_det + delta)


def gaussian_logpdf_from_delta(delta, factor: CovFactor):
    """Gaussian log-density given precomputed squared distances (scalar or array)."""
    return -0.5 * (factor.dim * LOG_2PI + factor.log_det + delta)


def _check_contamination(alpha: float, eta: float) -> None:
    if not (0.0 < alpha <= 1.0):
        raise InvalidContamination(f"alpha must be in (0, 1], got {alpha}")
    if eta < 1.0:
        raise InvalidContamination(f"eta must be >= 1, got {eta}")


def contaminated_logpdf_from_delta(delta, factor: CovFactor, alpha: float, eta: float):
    """Contaminated-Gaussian log-density from precomputed squared distances.

    Accepts scalar or array ``delta``.  The inflated part reuses the same
    factor: its log-determinant shifts by ``dim * log(eta)`` and the
    quadratic form divides by ``eta``.  With ``alpha == 1`` or ``eta == 1``
    the mixture collapses to the plain Gaussian, which is returned exactly
    (this is the nested limit used by the Gaussian baseline model).
    """
    _check_contamination(alpha, eta)
    base = -0.5 * (factor.dim * LOG_2PI + factor.log_det)
    if alpha == 1.0 or eta == 1.0:
        return base - 0.5 * np.asarray(delta)
    log_typical = math.log(alpha) + base - 0.5 * np.asarray(delta)
    log_atypical = (
        math.log1p(-alpha)
        + base
        - 0.5 * factor.dim * math.log(eta)
        - 0.5 * np.asarray(delta) / eta
    )
    return np.logaddexp(log_typical, log_atypical)


def log_contaminated_pdf(w, mu, factor: CovFactor, alpha: float, eta: float) -> float:
    """Contaminated-Gaussian log-density at ``w`` (two-term log-sum-exp)."""
    delta = mahalanobis_sq(w, mu, factor)
    return float(contaminated_logpdf_from_delta(delta, factor, alpha, eta))


def typical_weight(delta, alpha: float, eta: float, dim: int):
    """Posterior probability of the typical part given squared distance ``delta``.

    Density ratio of the typical part against the whole contaminated law,
    written with the dimension-correct inflation exponent ``eta**(-dim/2)``:

        1 / (1 + ((1-alpha)/alpha) * eta**(-dim/2) * exp((delta/2) * (1 - 1/eta)))

    Strictly decreasing in ``delta``; computed through a logistic transform
    so large distances underflow gracefully to 0 instead of overflowing.
    Accepts scalar or array ``delta``.
    """
    if not (0.0 < alpha < 1.0):
        raise InvalidContamination(f"alpha must be in (0, 1), got {alpha}")
    if eta <= 1.0:
        raise InvalidContamination(f"eta must be > 1, got {eta}")
    delta = np.asarray(delta, dtype=float)
    if np.any(delta < 0.0):
        raise ValueError("delta must be nonnegative")
    log_odds_atypical = (
        math.log1p(-alpha)
        - math.log(alpha)
        - 0.5 * dim * math.log(eta)
        + 0.5 * delta * (1.0 - 1.0 / eta)
    )
    out = expit(-log_odds_atypical)
    return float(out) if out.ndim == 0 else out


def downweight(delta, alpha: float, eta: float, dim: int):
    """Effective observation weight in the location/regression updates.

    Equals ``g + (1 - g)/eta`` where ``g`` is :func:`typical_weight`;
    decreases from 1 toward ``1/eta`` as ``delta`` grows, which is what
    damps the influence of atypical observations on the estimates.
    """
    g = typical_weight(delta, alpha, eta, dim)
    return (1.0 + (eta - 1.0) * g) / eta
