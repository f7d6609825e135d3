"""Parameter containers and density evaluation for the contaminated-Gaussian
cluster-weighted model.

The joint density is a k-component mixture; component j contributes

    pi_j * f(y | mean = beta_j' x*, Sigma_Y|j, alpha_Y|j, eta_Y|j)
         * f(x | mu_X|j, Sigma_X|j, alpha_X|j, eta_X|j)

where ``f`` is the contaminated-Gaussian density and ``x* = (1, x)`` carries
the intercept.  Callers never build ``x*`` themselves; every operation
augments internally.

Component order is significant and preserved; any label matching against a
reference parameterization is the benchmark harness's job, not the model's.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import logsumexp

from .densities import (
    CovFactor,
    contaminated_logpdf_from_delta,
    factor_covariance,
    mahalanobis_sq_rows,
)
from .errors import DimensionMismatch

__all__ = [
    "ContaminatedBlock",
    "RegressionBlock",
    "ComponentParams",
    "CwmParams",
    "LabeledSample",
    "augment",
    "joint_log_density",
    "marginal_x_log_density",
    "conditional_y_log_density",
    "count_free_parameters",
    "sample_dataset",
    "samples_to_arrays",
    "params_to_dict",
    "params_from_dict",
    "params_to_json",
    "params_from_json",
]


def augment(x_rows: np.ndarray) -> np.ndarray:
    """Prepend an all-ones intercept column: (n, d) -> (n, 1 + d)."""
    x_rows = np.atleast_2d(np.asarray(x_rows, dtype=float))
    return np.column_stack([np.ones(x_rows.shape[0]), x_rows])


@dataclass(frozen=True, eq=False)
class ContaminatedBlock:
    """One contaminated-Gaussian law: location, scatter, typical proportion, inflation.

    ``alpha == 1`` or ``eta == 1`` is allowed only as the nested plain-Gaussian
    limit (used by the Gaussian baseline and by clean-data generators).
    """

    mu: np.ndarray
    sigma: np.ndarray
    alpha: float
    eta: float

    def __post_init__(self):
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float).reshape(-1))
        object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float))
        if self.sigma.shape != (self.mu.size, self.mu.size):
            raise DimensionMismatch(
                f"sigma shape {self.sigma.shape} incompatible with mu size {self.mu.size}"
            )
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.eta < 1.0:
            raise ValueError(f"eta must be >= 1, got {self.eta}")

    @property
    def dim(self) -> int:
        return self.mu.size

    @cached_property
    def factor(self) -> CovFactor:
        # Lazy: CM-steps rebuild sigma every iteration, so factoring once per
        # parameter snapshot is all the caching that pays off.
        return factor_covariance(self.sigma)

    def delta_rows(self, points: np.ndarray) -> np.ndarray:
        return mahalanobis_sq_rows(points, self.mu, self.factor)

    def log_pdf_rows(self, points: np.ndarray) -> np.ndarray:
        return contaminated_logpdf_from_delta(
            self.delta_rows(points), self.factor, self.alpha, self.eta
        )


@dataclass(frozen=True, eq=False)
class RegressionBlock:
    """Local linear-regression law for the response given covariates.

    ``beta`` has shape (1 + d_x, d_y); the first row holds intercepts.
    """

    beta: np.ndarray
    sigma: np.ndarray
    alpha: float
    eta: float

    def __post_init__(self):
        object.__setattr__(self, "beta", np.atleast_2d(np.asarray(self.beta, dtype=float)))
        object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float))
        d_y = self.beta.shape[1]
        if self.sigma.shape != (d_y, d_y):
            raise DimensionMismatch(
                f"sigma shape {self.sigma.shape} incompatible with beta shape {self.beta.shape}"
            )
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.eta < 1.0:
            raise ValueError(f"eta must be >= 1, got {self.eta}")

    @property
    def d_x(self) -> int:
        return self.beta.shape[0] - 1

    @property
    def d_y(self) -> int:
        return self.beta.shape[1]

    @cached_property
    def factor(self) -> CovFactor:
        return factor_covariance(self.sigma)

    def mean_rows(self, x_rows: np.ndarray) -> np.ndarray:
        """Local conditional means beta' x* for each covariate row: (n, d_y)."""
        return augment(x_rows) @ self.beta

    def delta_rows(self, y_rows: np.ndarray, x_rows: np.ndarray) -> np.ndarray:
        resid = np.atleast_2d(np.asarray(y_rows, dtype=float)) - self.mean_rows(x_rows)
        return mahalanobis_sq_rows(resid, np.zeros(self.d_y), self.factor)

    def log_pdf_rows(self, y_rows: np.ndarray, x_rows: np.ndarray) -> np.ndarray:
        return contaminated_logpdf_from_delta(
            self.delta_rows(y_rows, x_rows), self.factor, self.alpha, self.eta
        )


@dataclass(frozen=True, eq=False)
class ComponentParams:
    """One mixture component: weight plus covariate and regression blocks."""

    pi: float
    x_block: ContaminatedBlock
    y_block: RegressionBlock

    def __post_init__(self):
        if not (0.0 < self.pi < 1.0 or self.pi == 1.0):
            raise ValueError(f"component weight must be in (0, 1], got {self.pi}")


@dataclass(frozen=True, eq=False)
class CwmParams:
    """Full model: ordered components plus covariate/response dimensions."""

    components: tuple[ComponentParams, ...]
    d_x: int
    d_y: int

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise ValueError("need at least one component")
        total = sum(c.pi for c in self.components)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"component weights sum to {total!r}, expected 1")
        for c in self.components:
            if c.x_block.dim != self.d_x:
                raise DimensionMismatch("x_block dimension does not match d_x")
            if c.y_block.d_x != self.d_x or c.y_block.d_y != self.d_y:
                raise DimensionMismatch("y_block dimensions do not match (d_x, d_y)")

    @property
    def k(self) -> int:
        return len(self.components)

    @cached_property
    def log_pi(self) -> np.ndarray:
        return np.log(np.array([c.pi for c in self.components]))


@dataclass(frozen=True, eq=False)
class LabeledSample:
    """One draw from the generative model with its latent state recorded."""

    x: np.ndarray
    y: np.ndarray
    component: int  # 1-based
    x_typical: bool
    y_typical: bool


# ---------------------------------------------------------------------------
# Density evaluation
# ---------------------------------------------------------------------------

def log_density_matrices(data: np.ndarray, params: CwmParams):
    """Per-observation, per-component log-density pieces.

    Returns ``(log_fx, log_fy)``, each (n, k): the contaminated log-density
    of the covariates and of the response given covariates, under each
    component.  This is the shared kernel behind the joint density, the
    likelihood, and the E-step.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != params.d_x + params.d_y:
        raise DimensionMismatch(
            f"data shape {data.shape} incompatible with d_x={params.d_x}, d_y={params.d_y}"
        )
    x = data[:, : params.d_x]
    y = data[:, params.d_x :]
    n, k = data.shape[0], params.k
    log_fx = np.empty((n, k))
    log_fy = np.empty((n, k))
    for j, comp in enumerate(params.components):
        log_fx[:, j] = comp.x_block.log_pdf_rows(x)
        log_fy[:, j] = comp.y_block.log_pdf_rows(y, x)
    return log_fx, log_fy


def _point(x, y, params: CwmParams) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.size != params.d_x or y.size != params.d_y:
        raise DimensionMismatch(
            f"point dims ({x.size}, {y.size}) do not match ({params.d_x}, {params.d_y})"
        )
    return np.concatenate([x, y])[None, :]


def joint_log_density(x, y, params: CwmParams) -> float:
    """Log of the mixture joint density at a single point (x, y)."""
    log_fx, log_fy = log_density_matrices(_point(x, y, params), params)
    return float(logsumexp(params.log_pi + log_fx[0] + log_fy[0]))


def marginal_x_log_density(x, params: CwmParams) -> float:
    """Log of the covariate marginal: a plain mixture of the x blocks."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != params.d_x:
        raise DimensionMismatch(f"x has {x.size} entries, expected {params.d_x}")
    terms = [
        params.log_pi[j] + float(comp.x_block.log_pdf_rows(x[None, :])[0])
        for j, comp in enumerate(params.components)
    ]
    return float(logsumexp(terms))


def conditional_y_log_density(y, x, params: CwmParams) -> float:
    """Log conditional density of y given x.

    A mixture of local regression laws whose weights depend on x:
    tau_j(x) = pi_j f_X(x | j) / sum_h pi_h f_X(x | h).  Computed directly
    from that expression (not as joint minus marginal) so the factorization
    identity joint = marginal + conditional stays a genuine cross-check.
    """
    point = _point(x, y, params)
    log_fx, log_fy = log_density_matrices(point, params)
    log_weights = params.log_pi + log_fx[0]
    log_tau = log_weights - logsumexp(log_weights)
    return float(logsumexp(log_tau + log_fy[0]))


def count_free_parameters(params: CwmParams, contaminated: bool = True) -> int:
    """Number of free parameters, used by the BIC penalty.

    Per component: d_x location entries, d_x(d_x+1)/2 covariate scatter
    entries, (1+d_x) d_y coefficients, d_y(d_y+1)/2 residual scatter
    entries, plus the 4 contamination parameters unless ``contaminated``
    is False; plus k-1 mixture weights.
    """
    k, d_x, d_y = params.k, params.d_x, params.d_y
    per_component = (
        d_x
        + d_x * (d_x + 1) // 2
        + (1 + d_x) * d_y
        + d_y * (d_y + 1) // 2
        + (4 if contaminated else 0)
    )
    return (k - 1) + k * per_component


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample_dataset(params: CwmParams, n: int, rng: np.random.Generator) -> list[LabeledSample]:
    """Draw n labeled samples from the generative model.

    Per draw: pick a component by its weight; flag the covariate as typical
    with probability alpha_X and draw it from the plain or inflated scatter
    accordingly; then do the same for the response around the local
    regression mean.  Latent component and typicality flags are recorded.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pi = np.array([c.pi for c in params.components])
    comp = rng.choice(params.k, size=n, p=pi)
    x = np.empty((n, params.d_x))
    y = np.empty((n, params.d_y))
    x_typ = np.empty(n, dtype=bool)
    y_typ = np.empty(n, dtype=bool)
    for j, c in enumerate(params.components):
        idx = np.flatnonzero(comp == j)
        if idx.size == 0:
            continue
        xb, yb = c.x_block, c.y_block
        x_typ[idx] = rng.random(idx.size) < xb.alpha
        noise = rng.standard_normal((idx.size, params.d_x)) @ xb.factor.lower.T
        scale = np.where(x_typ[idx], 1.0, np.sqrt(xb.eta))[:, None]
        x[idx] = xb.mu + noise * scale

        y_typ[idx] = rng.random(idx.size) < yb.alpha
        noise = rng.standard_normal((idx.size, params.d_y)) @ yb.factor.lower.T
        scale = np.where(y_typ[idx], 1.0, np.sqrt(yb.eta))[:, None]
        y[idx] = yb.mean_rows(x[idx]) + noise * scale
    return [
        LabeledSample(
            x=x[i], y=y[i], component=int(comp[i]) + 1,
            x_typical=bool(x_typ[i]), y_typical=bool(y_typ[i]),
        )
        for i in range(n)
    ]


def samples_to_arrays(samples: list[LabeledSample]):
    """Stack labeled samples into (data, component, x_typical, y_typical) arrays."""
    data = np.array([np.concatenate([s.x, s.y]) for s in samples])
    comp = np.array([s.component for s in samples], dtype=int)
    x_typ = np.array([s.x_typical for s in samples], dtype=bool)
    y_typ = np.array([s.y_typical for s in samples], dtype=bool)
    return data, comp, x_typ, y_typ


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------
# Schema: {"k", "d_x", "d_y", "components": [{"pi", "mu_x", "sigma_x",
# "alpha_x", "eta_x", "beta", "sigma_y", "alpha_y", "eta_y"}]} with matrices
# as row-major nested lists.  The Gaussian family omits the alpha/eta keys;
# on read, missing keys default to the nested limit (alpha=1, eta=1).

def params_to_dict(params: CwmParams, contaminated: bool = True) -> dict:
    comps = []
    for c in params.components:
        entry = {
            "pi": float(c.pi),
            "mu_x": c.x_block.mu.tolist(),
            "sigma_x": c.x_block.sigma.tolist(),
            "beta": c.y_block.beta.tolist(),
            "sigma_y": c.y_block.sigma.tolist(),
        }
        if contaminated:
            entry["alpha_x"] = float(c.x_block.alpha)
            entry["eta_x"] = float(c.x_block.eta)
            entry["alpha_y"] = float(c.y_block.alpha)
            entry["eta_y"] = float(c.y_block.eta)
        comps.append(entry)
    return {"k": params.k, "d_x": params.d_x, "d_y": params.d_y, "components": comps}


def params_from_dict(payload: dict) -> CwmParams:
    comps = []
    for entry in payload["components"]:
        comps.append(
            ComponentParams(
                pi=float(entry["pi"]),
                x_block=ContaminatedBlock(
                    mu=np.array(entry["mu_x"], dtype=float),
                    sigma=np.array(entry["sigma_x"], dtype=float),
                    alpha=float(entry.get("alpha_x", 1.0)),
                    eta=float(entry.get("eta_x", 1.0)),
                ),
                y_block=RegressionBlock(
                    beta=np.array(entry["beta"], dtype=float),
                    sigma=np.array(entry["sigma_y"], dtype=float),
                    alpha=float(entry.get("alpha_y", 1.0)),
                    eta=float(entry.get("eta_y", 1.0)),
                ),
            )
        )
    return CwmParams(components=tuple(comps), d_x=int(payload["d_x"]), d_y=int(payload["d_y"]))


def params_to_json(params: CwmParams, contaminated: bool = True) -> str:
    return json.dumps(params_to_dict(params, contaminated=contaminated), indent=2)


def params_from_json(text: str) -> CwmParams:
    return params_from_dict(json.loads(text))
