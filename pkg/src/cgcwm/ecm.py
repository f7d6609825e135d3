"""Expectation-conditional-maximization fitting of the contaminated model.

Each iteration runs an E-step and two conditional maximization steps:

* E-step: posterior component memberships, plus per-component posteriors
  that the response is typical (not an outlier) and that the covariate is
  typical (not a leverage point).
* CM-step 1: closed-form updates of the weights, typical proportions,
  covariate location/scatter, regression coefficients, and residual
  scatter, holding the inflation parameters fixed.
* CM-step 2: bounded scalar maximization of each inflation parameter.

Convergence is declared through Aitken extrapolation of the log-likelihood
sequence.  A single fit is deterministic given (data, config); restarts use
disjoint random streams.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve
from scipy.special import logsumexp
from sklearn.exceptions import ConvergenceWarning
from sklearn.mixture import GaussianMixture

from .densities import contaminated_logpdf_from_delta, typical_weight
from .errors import (
    DegenerateDensity,
    InitializationFailure,
    NotPositiveDefinite,
    SingularDesign,
)
from .model import (
    ComponentParams,
    ContaminatedBlock,
    CwmParams,
    RegressionBlock,
    augment,
)

__all__ = [
    "Responsibilities",
    "FitConfig",
    "FitResult",
    "golden_section_max",
    "maximize_inflation",
    "e_step",
    "cm_step1",
    "cm_step2",
    "observed_log_likelihood",
    "aitken_converged",
    "initialize",
    "fit",
]

EPS = np.finfo(float).eps
ETA_FLOOR = 1.0 + 1e-12

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True, eq=False)
class Responsibilities:
    """Per-observation, per-component posterior matrices from the E-step.

    ``comp`` rows sum to 1; ``y_typical``/``x_typical`` hold the posterior
    probabilities of not being an outlier / leverage point in each
    component, computed for every component regardless of membership.
    """

    comp: np.ndarray
    y_typical: np.ndarray
    x_typical: np.ndarray

    def __post_init__(self):
        for name in ("comp", "y_typical", "x_typical"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
        if not (self.comp.shape == self.y_typical.shape == self.x_typical.shape):
            raise ValueError("responsibility matrices must share one shape")
        if np.any(np.abs(self.comp.sum(axis=1) - 1.0) > 1e-10):
            raise ValueError("component posterior rows must sum to 1")
        for name in ("comp", "y_typical", "x_typical"):
            arr = getattr(self, name)
            if np.any(arr < 0.0) or np.any(arr > 1.0):
                raise ValueError(f"{name} entries must lie in [0, 1]")

    @property
    def n(self) -> int:
        return self.comp.shape[0]

    @property
    def k(self) -> int:
        return self.comp.shape[1]


@dataclass(frozen=True)
class FitConfig:
    """Fitting configuration; defaults reproduce the reference setup.

    ``d_x``/``d_y`` declare the covariate/response column split of the data
    matrix (covariates first).
    """

    k: int
    d_x: int
    d_y: int
    alpha_star: float = 0.5      # lower bound on the typical proportions
    eta_star: float = 500.0      # upper bound of the inflation search
    epsilon: float = 1e-4        # Aitken convergence tolerance
    w0: float = 0.999            # initial typical-posterior fill value
    max_iter: int = 1000
    restarts: int = 5
    seed: int = 0
    cov_floor: float = 1e-8
    alpha_numeric_search: bool = False  # cross-check path for the clamp update

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.d_x < 1 or self.d_y < 1:
            raise ValueError("d_x and d_y must be >= 1")
        if not (0.0 <= self.alpha_star < 1.0):
            raise ValueError("alpha_star must be in [0, 1)")
        if self.eta_star <= 1.0:
            raise ValueError("eta_star must be > 1")
        if self.epsilon <= 0.0 or self.cov_floor <= 0.0:
            raise ValueError("epsilon and cov_floor must be positive")
        if not (0.0 < self.w0 < 1.0):
            raise ValueError("w0 must be in (0, 1)")
        if self.max_iter < 1 or self.restarts < 1:
            raise ValueError("max_iter and restarts must be >= 1")


@dataclass(eq=False)
class FitResult:
    """Converged parameters with fitting diagnostics.

    ``resp`` holds the E-step values at the final parameters.
    ``init_loglik`` is the log-likelihood of the Gaussian baseline fit that
    seeded this run; the final log-likelihood never falls below it.
    """

    params: CwmParams
    resp: Responsibilities
    loglik_trace: list[float]
    iterations: int
    converged: bool
    init_loglik: float = field(default=float("-inf"))

    @property
    def loglik(self) -> float:
        return self.loglik_trace[-1]


# ---------------------------------------------------------------------------
# Scalar maximization
# ---------------------------------------------------------------------------

def golden_section_max(fn, lo: float, hi: float, tol: float = 1e-8, compare=None) -> float:
    """Golden-section maximization of a unimodal function on (lo, hi).

    Only interior points are evaluated, so the bounds may be open.  Returns
    the midpoint of the final bracket, within ``tol`` of the maximizer.

    ``compare(c, d)``, when given, must return the sign of ``fn(c) - fn(d)``
    and replaces direct value comparison.  Objectives that are flat relative
    to their magnitude lose the comparison sign to rounding long before the
    bracket reaches ``tol``; a closed-form difference keeps it exact.
    """
    a, b = float(lo), float(hi)
    h = b - a
    if h <= tol:
        return 0.5 * (a + b)
    if compare is None:
        compare = lambda c, d: fn(c) - fn(d)
    n_steps = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c = a + _INV_PHI_SQ * h
    d = a + _INV_PHI * h
    for _ in range(n_steps):
        if compare(c, d) > 0:
            b, d = d, c
            h *= _INV_PHI
            c = a + _INV_PHI_SQ * h
        else:
            a, c = c, d
            h *= _INV_PHI
            d = a + _INV_PHI * h
    return 0.5 * (a + b)


def maximize_inflation(a: float, b: float, dim: int, eta_star: float) -> float:
    """Maximize -(dim/2) a log(eta) - b / (2 eta) over (1, eta_star).

    ``a`` is the atypical mass, ``b`` the atypical mass-weighted squared
    distances.  The objective is unimodal with stationary point b/(dim a);
    the golden-section result agrees with clamping that point into the
    interval.  With no atypical mass the objective is flat or decreasing
    and the lower boundary is returned.
    """
    if a <= 0.0:
        return ETA_FLOOR

    def objective(eta: float) -> float:
        return -0.5 * dim * a * math.log(eta) - 0.5 * b / eta

    def objective_difference(c: float, d: float) -> float:
        # objective(c) - objective(d) without the cancellation of two
        # nearly equal rounded sums
        return -0.5 * dim * a * math.log1p((c - d) / d) + 0.5 * b * (c - d) / (c * d)

    return golden_section_max(
        objective, ETA_FLOOR, eta_star, tol=1e-8, compare=objective_difference
    )


# ---------------------------------------------------------------------------
# E-step
# ---------------------------------------------------------------------------

def _split(data: np.ndarray, params: CwmParams):
    data = np.asarray(data, dtype=float)
    return data[:, : params.d_x], data[:, params.d_x :]


def _component_stats(data: np.ndarray, params: CwmParams):
    """Squared distances and contaminated log-densities, (n, k) each."""
    x, y = _split(data, params)
    n, k = data.shape[0], params.k
    delta_x = np.empty((n, k))
    delta_y = np.empty((n, k))
    log_fx = np.empty((n, k))
    log_fy = np.empty((n, k))
    for j, comp in enumerate(params.components):
        xb, yb = comp.x_block, comp.y_block
        delta_x[:, j] = xb.delta_rows(x)
        log_fx[:, j] = contaminated_logpdf_from_delta(delta_x[:, j], xb.factor, xb.alpha, xb.eta)
        delta_y[:, j] = yb.delta_rows(y, x)
        log_fy[:, j] = contaminated_logpdf_from_delta(delta_y[:, j], yb.factor, yb.alpha, yb.eta)
    return delta_x, delta_y, log_fx, log_fy


def _typical_posterior(delta: np.ndarray, alpha: float, eta: float, dim: int) -> np.ndarray:
    # Nested limits: with eta == 1 both mixture parts coincide, so the
    # typical posterior is alpha itself; with alpha == 1 it is one.
    if alpha == 1.0:
        return np.ones_like(delta)
    if eta == 1.0:
        return np.full_like(delta, alpha)
    return typical_weight(delta, alpha, eta, dim)


def e_step(data: np.ndarray, params: CwmParams) -> Responsibilities:
    """Posterior memberships and typicality posteriors under ``params``."""
    delta_x, delta_y, log_fx, log_fy = _component_stats(data, params)
    log_joint = params.log_pi[None, :] + log_fx + log_fy
    norm = logsumexp(log_joint, axis=1)
    if not np.all(np.isfinite(norm)):
        raise DegenerateDensity("joint density underflowed to zero for some observation")
    comp = np.exp(log_joint - norm[:, None])
    n, k = comp.shape
    u = np.empty((n, k))
    v = np.empty((n, k))
    for j, c in enumerate(params.components):
        v[:, j] = _typical_posterior(delta_x[:, j], c.x_block.alpha, c.x_block.eta, params.d_x)
        u[:, j] = _typical_posterior(delta_y[:, j], c.y_block.alpha, c.y_block.eta, params.d_y)
    return Responsibilities(comp=comp, y_typical=u, x_typical=v)


def observed_log_likelihood(data: np.ndarray, params: CwmParams) -> float:
    """Sum of joint log-densities over the observations."""
    _, _, log_fx, log_fy = _component_stats(data, params)
    row_ll = logsumexp(params.log_pi[None, :] + log_fx + log_fy, axis=1)
    if not np.all(np.isfinite(row_ll)):
        raise DegenerateDensity("joint density underflowed to zero for some observation")
    return float(row_ll.sum())


# ---------------------------------------------------------------------------
# CM-step 1: everything except the inflation parameters
# ---------------------------------------------------------------------------

def _ensure_spd(scatter: np.ndarray, cov_floor: float) -> np.ndarray:
    """Symmetrize; if factorization fails, add cov_floor * I once."""
    scatter = 0.5 * (scatter + scatter.T)
    try:
        np.linalg.cholesky(scatter)
        return scatter
    except np.linalg.LinAlgError:
        pass
    floored = scatter + cov_floor * np.eye(scatter.shape[0])
    try:
        np.linalg.cholesky(floored)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(
            "component scatter not positive definite even after flooring"
        ) from exc
    return floored


def weighted_mstep(x, y, comp, wx, wy, cov_floor):
    """Weighted maximization shared by the contaminated and Gaussian fits.

    ``comp`` is the membership posterior; ``wx``/``wy`` are per-observation
    down-weights (identically one recovers the plain Gaussian updates, which
    is how the baseline model delegates here).  Returns per-component lists
    (pi, mu_x, sigma_x, beta, sigma_y).
    """
    n, k = comp.shape
    d_x = x.shape[1]
    d_y = y.shape[1]
    n_j = comp.sum(axis=0)
    if np.any(n_j < d_x + d_y + 2):
        raise SingularDesign(
            f"a component holds mass {n_j.min():.3f} < {d_x + d_y + 2}; starved or empty"
        )
    xa = augment(x)
    pi = n_j / n
    mu_list, sigma_x_list, beta_list, sigma_y_list = [], [], [], []
    for j in range(k):
        cwx = comp[:, j] * wx[:, j]
        mu = (cwx @ x) / cwx.sum()
        diff = x - mu
        sigma_x = (diff * cwx[:, None]).T @ diff / n_j[j]
        sigma_x_list.append(_ensure_spd(sigma_x, cov_floor))
        mu_list.append(mu)

        cwy = comp[:, j] * wy[:, j]
        gram = xa.T @ (xa * cwy[:, None])
        try:
            chol = np.linalg.cholesky(gram)
        except np.linalg.LinAlgError as exc:
            raise SingularDesign(f"weighted design is singular in component {j}") from exc
        beta = cho_solve((chol, True), xa.T @ (y * cwy[:, None]))
        resid = y - xa @ beta
        sigma_y = (resid * cwy[:, None]).T @ resid / n_j[j]
        sigma_y_list.append(_ensure_spd(sigma_y, cov_floor))
        beta_list.append(beta)
    return pi, mu_list, sigma_x_list, beta_list, sigma_y_list


def _alpha_update(mass_typical: float, mass_total: float, config: FitConfig) -> float:
    """Constrained typical-proportion update on (alpha_star, 1).

    The objective mass_typical*log(a) + (mass_total-mass_typical)*log(1-a)
    is strictly concave with interior maximum at the mass ratio, so the
    constrained maximizer is the clamp.  The numeric search is retained as
    a cross-check behind ``alpha_numeric_search``.
    """
    lo = config.alpha_star + EPS
    hi = 1.0 - EPS
    if config.alpha_numeric_search:
        s1 = mass_typical
        s0 = mass_total - mass_typical

        def objective(a: float) -> float:
            return s1 * math.log(a) + s0 * math.log1p(-a)

        return golden_section_max(objective, config.alpha_star, 1.0, tol=1e-10)
    return float(np.clip(mass_typical / mass_total, lo, hi))


def cm_step1(
    data: np.ndarray, resp: Responsibilities, params_prev: CwmParams, config: FitConfig
) -> CwmParams:
    """First conditional maximization: all parameters except the inflations.

    Reads only the previous inflation parameters (they enter the
    down-weights); everything else is recomputed from the responsibilities.
    """
    x, y = _split(data, params_prev)
    z, u, v = resp.comp, resp.y_typical, resp.x_typical
    eta_x_prev = np.array([c.x_block.eta for c in params_prev.components])
    eta_y_prev = np.array([c.y_block.eta for c in params_prev.components])
    wx = v + (1.0 - v) / eta_x_prev[None, :]
    wy = u + (1.0 - u) / eta_y_prev[None, :]
    pi, mu_list, sigma_x_list, beta_list, sigma_y_list = weighted_mstep(
        x, y, z, wx, wy, config.cov_floor
    )
    n_j = z.sum(axis=0)
    alpha_x = [_alpha_update(float((z[:, j] * v[:, j]).sum()), float(n_j[j]), config)
               for j in range(params_prev.k)]
    alpha_y = [_alpha_update(float((z[:, j] * u[:, j]).sum()), float(n_j[j]), config)
               for j in range(params_prev.k)]
    components = tuple(
        ComponentParams(
            pi=float(pi[j]),
            x_block=ContaminatedBlock(
                mu=mu_list[j], sigma=sigma_x_list[j],
                alpha=alpha_x[j], eta=float(eta_x_prev[j]),
            ),
            y_block=RegressionBlock(
                beta=beta_list[j], sigma=sigma_y_list[j],
                alpha=alpha_y[j], eta=float(eta_y_prev[j]),
            ),
        )
        for j in range(params_prev.k)
    )
    return CwmParams(components=components, d_x=params_prev.d_x, d_y=params_prev.d_y)


# ---------------------------------------------------------------------------
# CM-step 2: inflation parameters
# ---------------------------------------------------------------------------

def cm_step2(
    data: np.ndarray, resp: Responsibilities, params: CwmParams, config: FitConfig
) -> CwmParams:
    """Second conditional maximization: inflation parameters only.

    Distances are taken at the freshly updated locations/scatters from the
    first CM step.
    """
    x, y = _split(data, params)
    z, u, v = resp.comp, resp.y_typical, resp.x_typical
    components = []
    for j, comp in enumerate(params.components):
        atypical_x = z[:, j] * (1.0 - v[:, j])
        delta_x = comp.x_block.delta_rows(x)
        eta_x = maximize_inflation(
            float(atypical_x.sum()), float(atypical_x @ delta_x), params.d_x, config.eta_star
        )
        atypical_y = z[:, j] * (1.0 - u[:, j])
        delta_y = comp.y_block.delta_rows(y, x)
        eta_y = maximize_inflation(
            float(atypical_y.sum()), float(atypical_y @ delta_y), params.d_y, config.eta_star
        )
        components.append(
            ComponentParams(
                pi=comp.pi,
                x_block=ContaminatedBlock(
                    mu=comp.x_block.mu, sigma=comp.x_block.sigma,
                    alpha=comp.x_block.alpha, eta=eta_x,
                ),
                y_block=RegressionBlock(
                    beta=comp.y_block.beta, sigma=comp.y_block.sigma,
                    alpha=comp.y_block.alpha, eta=eta_y,
                ),
            )
        )
    return CwmParams(components=tuple(components), d_x=params.d_x, d_y=params.d_y)


# ---------------------------------------------------------------------------
# Convergence
# ---------------------------------------------------------------------------

def aitken_converged(l_r: float, l_r1: float, l_r2: float, epsilon: float) -> bool:
    """Aitken-extrapolated stopping rule on three consecutive log-likelihoods.

    Estimates the asymptotic log-likelihood from the geometric rate of the
    last two increments and stops once the estimated remaining gain falls
    below ``epsilon``.  Stalled or non-contracting sequences fall back to
    the plain increment test.
    """
    increment = l_r2 - l_r1
    denom = l_r1 - l_r
    if denom == 0.0:
        return increment < epsilon
    rate = increment / denom
    if rate >= 1.0:
        return increment < epsilon
    return increment / (1.0 - rate) < epsilon


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------

def _gmm_posteriors(data: np.ndarray, k: int, seed: int, max_iter: int = 200) -> np.ndarray:
    """Unconstrained Gaussian-mixture posteriors on the joint vector.

    Started from k-means++ centers; raises if the hard assignment leaves a
    component empty.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        gm = GaussianMixture(
            n_components=k,
            covariance_type="full",
            init_params="k-means++",
            n_init=1,
            max_iter=max_iter,
            random_state=seed,
        ).fit(data)
    post = gm.predict_proba(data)
    counts = np.bincount(post.argmax(axis=1), minlength=k)
    if np.any(counts == 0):
        raise InitializationFailure("mixture initialization left a component empty")
    return post


def _initialize_state(data: np.ndarray, config: FitConfig, seed_seq: np.random.SeedSequence):
    """One initialization attempt chain: mixture posteriors, then the
    Gaussian baseline run to convergence.  Retries with fresh sub-seeds up
    to ``config.restarts`` times before giving up."""
    from .gaussian import fit_gaussian_cwm  # deferred: gaussian delegates back here

    last_exc: Exception | None = None
    for child in seed_seq.spawn(config.restarts):
        seed = int(child.generate_state(1)[0])
        try:
            post = _gmm_posteriors(data, config.k, seed)
            gauss = fit_gaussian_cwm(
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
        n = data.shape[0]
        fill = np.full((n, config.k), config.w0)
        resp = Responsibilities(comp=gauss.z, y_typical=fill, x_typical=fill.copy())
        return resp, gauss
    raise InitializationFailure("all initialization attempts failed") from last_exc


def initialize(data: np.ndarray, config: FitConfig) -> Responsibilities:
    """Starting responsibilities: baseline-fit memberships with the typical
    posteriors filled at ``config.w0``."""
    data = np.asarray(data, dtype=float)
    resp, _ = _initialize_state(data, config, np.random.SeedSequence(config.seed))
    return resp


# ---------------------------------------------------------------------------
# Full fit
# ---------------------------------------------------------------------------

def _with_eta(params: CwmParams, j: int, side: str, eta: float) -> CwmParams:
    """Copy of ``params`` with one component's inflation replaced."""
    components = list(params.components)
    c = components[j]
    if side == "x":
        x_block = ContaminatedBlock(
            mu=c.x_block.mu, sigma=c.x_block.sigma, alpha=c.x_block.alpha, eta=eta
        )
        components[j] = ComponentParams(pi=c.pi, x_block=x_block, y_block=c.y_block)
    else:
        y_block = RegressionBlock(
            beta=c.y_block.beta, sigma=c.y_block.sigma, alpha=c.y_block.alpha, eta=eta
        )
        components[j] = ComponentParams(pi=c.pi, x_block=c.x_block, y_block=y_block)
    return CwmParams(components=tuple(components), d_x=params.d_x, d_y=params.d_y)


def _inflation_profile_sweep(data: np.ndarray, params: CwmParams, config: FitConfig, current_ll: float):
    """Greedy coordinate ascent of each inflation parameter on the observed
    log-likelihood over a fixed grid.

    The nested Gaussian solution is a stationary point of the conditional
    objective driving the inflation update (a converged plain M-step forces
    the mean squared distance to equal the dimension), so the iteration can
    stall there with flat typicality posteriors even when the observed
    likelihood rises steeply at larger inflations.  This sweep probes that
    profile directly and adopts only strict improvements, which keeps the
    likelihood trace monotone; the following E-step then differentiates the
    observations and the ordinary conditional updates take over.

    A move is adopted only when its gain exceeds the criterion-scale cost
    of activating one inflation parameter, 0.5*log(n); chance ripples on
    clean data sit far below that, genuine contamination far above, so the
    sweep escapes saddles without chasing the weakly identified ridge where
    the typical proportion approaches one.
    """
    delta_x, delta_y, log_fx, log_fy = _component_stats(data, params)
    grid = np.geomspace(1.01, config.eta_star, 16)
    threshold = max(config.epsilon, 0.5 * math.log(data.shape[0]))
    improved = False
    for j in range(params.k):
        for side in ("x", "y"):
            comp = params.components[j]
            block = comp.x_block if side == "x" else comp.y_block
            if block.alpha >= 1.0:
                continue
            delta = delta_x[:, j] if side == "x" else delta_y[:, j]
            other = log_fy[:, j] if side == "x" else log_fx[:, j]
            rest = np.delete(params.log_pi[None, :] + log_fx + log_fy, j, axis=1)
            best_ll, best_eta = current_ll, None
            for eta in grid:
                col = contaminated_logpdf_from_delta(delta, block.factor, block.alpha, eta)
                log_joint = np.column_stack([rest, params.log_pi[j] + col + other])
                ll = float(logsumexp(log_joint, axis=1).sum())
                if ll > best_ll:
                    best_ll, best_eta = ll, float(eta)
            if best_eta is not None and best_ll > current_ll + threshold:
                params = _with_eta(params, j, side, best_eta)
                current_ll = best_ll
                improved = True
                if side == "x":
                    log_fx[:, j] = contaminated_logpdf_from_delta(
                        delta, block.factor, block.alpha, best_eta
                    )
                else:
                    log_fy[:, j] = contaminated_logpdf_from_delta(
                        delta, block.factor, block.alpha, best_eta
                    )
    return improved, params, current_ll


def _fit_once(data: np.ndarray, config: FitConfig, seed_seq: np.random.SeedSequence) -> FitResult:
    resp, gauss = _initialize_state(data, config, seed_seq)
    # Embedding the baseline with unit inflation makes the first CM sweep
    # read eta = 1, so its down-weights are exactly one and the whole run
    # starts from the nested limit.
    params = gauss.params.to_contaminated()
    init_loglik = gauss.loglik_trace[-1]
    trace: list[float] = []
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        if iterations > 1:
            resp = e_step(data, params)
        params = cm_step1(data, resp, params, config)
        params = cm_step2(data, resp, params, config)
        ll = observed_log_likelihood(data, params)
        if trace and ll - trace[-1] < config.epsilon:
            # Stalled: check the inflation profiles before trusting the stop.
            _, params, ll = _inflation_profile_sweep(data, params, config, ll)
        trace.append(ll)
        if len(trace) >= 3 and aitken_converged(trace[-3], trace[-2], trace[-1], config.epsilon):
            converged = True
            break
    final_resp = e_step(data, params)
    return FitResult(
        params=params,
        resp=final_resp,
        loglik_trace=trace,
        iterations=iterations,
        converged=converged,
        init_loglik=init_loglik,
    )


def fit(data: np.ndarray, config: FitConfig) -> FitResult:
    """Fit by ECM with independent restarts; keep the best log-likelihood.

    Restart streams are disjoint; a restart that degenerates (starved
    component, singular design, non-positive-definite scatter) is dropped,
    and the last such error propagates only if every restart fails.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != config.d_x + config.d_y:
        raise ValueError(
            f"data must be 2-d with {config.d_x + config.d_y} columns, got shape {data.shape}"
        )
    if not np.all(np.isfinite(data)):
        raise ValueError("data must be finite-valued")
    best: FitResult | None = None
    last_exc: Exception | None = None
    for child in np.random.SeedSequence(config.seed).spawn(config.restarts):
        try:
            result = _fit_once(data, config, child)
        except (InitializationFailure, SingularDesign, NotPositiveDefinite, DegenerateDensity) as exc:
            last_exc = exc
            continue
        if best is None or result.loglik > best.loglik:
            best = result
    if best is None:
        assert last_exc is not None
        raise last_exc
    return best
