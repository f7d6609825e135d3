"""Monte Carlo experiment harness: scenario generators, bias/MSE benchmark,
label matching, and the perturbation protocols.

Scenario A draws from the plain Gaussian model, Scenario B from the
contaminated one with 5% atypical mass and inflation 100 on both sides;
otherwise the two share all generating parameters.  Replications run with
disjoint seed streams, so reports are reproducible and independent of any
parallel scheduling.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import permutations

import numpy as np

from .ecm import FitConfig, fit
from .errors import CwmError, DimensionMismatch, KTooLarge
from .gaussian import fit_gaussian
from .model import (
    ComponentParams,
    ContaminatedBlock,
    CwmParams,
    RegressionBlock,
    sample_dataset,
    samples_to_arrays,
)

__all__ = [
    "ScenarioSpec",
    "MonteCarloReport",
    "scenario_params",
    "match_labels",
    "run_monte_carlo",
    "perturb_with_point",
    "perturb_with_uniform_noise",
]

FAMILIES = ("gaussian", "contaminated")


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: str
    n: int
    replications: int
    seed: int

    def __post_init__(self):
        if self.scenario not in ("A", "B"):
            raise ValueError("scenario must be 'A' or 'B'")
        if self.n < 1 or self.replications < 1:
            raise ValueError("n and replications must be >= 1")


@dataclass(eq=False)
class MonteCarloReport:
    """Entrywise coefficient bias and MSE per family and component.

    ``bias``/``mse`` map family name to an array of shape (k, 1+d_x, d_y)
    matching the coefficient layout (intercept row first).  ``eta_y`` holds
    the fitted response inflations of the contaminated family, one row per
    successful replication, for contamination-recovery diagnostics.
    """

    scenario: str
    n: int
    replications: int
    failures: int
    bias: dict[str, np.ndarray]
    mse: dict[str, np.ndarray]
    eta_y: np.ndarray | None


def scenario_params(scenario: str) -> CwmParams:
    """Generating parameters of the two benchmark scenarios (k=2, d_x=d_y=2)."""
    if scenario not in ("A", "B"):
        raise ValueError("scenario must be 'A' or 'B'")
    alpha, eta = (1.0, 1.0) if scenario == "A" else (0.95, 100.0)
    eye2 = np.eye(2)
    beta = [
        np.array([[-2.0, -2.0], [-1.0, 1.0], [1.0, -1.0]]),
        np.array([[2.0, 2.0], [1.0, -1.0], [-1.0, 1.0]]),
    ]
    mu = [np.array([-5.0, -5.0]), np.array([5.0, 5.0])]
    weights = [0.3, 0.7]
    components = tuple(
        ComponentParams(
            pi=weights[j],
            x_block=ContaminatedBlock(mu=mu[j], sigma=eye2, alpha=alpha, eta=eta),
            y_block=RegressionBlock(beta=beta[j], sigma=0.4 * eye2, alpha=alpha, eta=eta),
        )
        for j in range(2)
    )
    return CwmParams(components=components, d_x=2, d_y=2)


def match_labels(estimated: CwmParams, truth: CwmParams) -> tuple[int, ...]:
    """Permutation aligning estimated components to the reference ones.

    Returns ``perm`` with ``perm[j]`` the estimated index matching reference
    component ``j`` (0-based), chosen to minimize the total squared distance
    between covariate locations.  Exhaustive search, limited to k <= 6.
    """
    k = truth.k
    if estimated.k != k:
        raise DimensionMismatch("component counts differ")
    if k > 6:
        raise KTooLarge(f"exhaustive matching limited to k <= 6, got {k}")
    mu_est = [c.x_block.mu for c in estimated.components]
    mu_true = [c.x_block.mu for c in truth.components]
    best_perm, best_cost = None, np.inf
    for perm in permutations(range(k)):
        cost = sum(float(np.sum((mu_est[perm[j]] - mu_true[j]) ** 2)) for j in range(k))
        if cost < best_cost:
            best_perm, best_cost = perm, cost
    return best_perm


def _replication(args):
    """One benchmark replication; module-level so worker processes can pick it up."""
    scenario, n, seed_entropy, families, config_updates = args
    truth = scenario_params(scenario)
    root = np.random.SeedSequence(seed_entropy)
    data_seq, contaminated_seq, gaussian_seq = root.spawn(3)
    data, _, _, _ = samples_to_arrays(
        sample_dataset(truth, n, np.random.default_rng(data_seq))
    )
    base = FitConfig(k=2, d_x=2, d_y=2, **config_updates)
    beta_true = np.stack([c.y_block.beta for c in truth.components])
    errors: dict[str, np.ndarray] = {}
    eta_y = None
    try:
        for family in families:
            if family == "contaminated":
                config = replace(base, seed=int(contaminated_seq.generate_state(1)[0]))
                result = fit(data, config)
                params = result.params
            else:
                config = replace(base, seed=int(gaussian_seq.generate_state(1)[0]))
                result = fit_gaussian(data, config)
                params = result.params.to_contaminated()
            perm = match_labels(params, truth)
            beta_hat = np.stack([params.components[perm[j]].y_block.beta for j in range(2)])
            errors[family] = beta_hat - beta_true
            if family == "contaminated":
                eta_y = np.array([params.components[perm[j]].y_block.eta for j in range(2)])
    except CwmError:
        return None
    return errors, eta_y


def run_monte_carlo(
    spec: ScenarioSpec,
    families=FAMILIES,
    config_updates: dict | None = None,
    n_workers: int = 1,
) -> MonteCarloReport:
    """Benchmark coefficient estimation over seeded replications.

    Per replication: sample from the scenario parameters, fit the requested
    families with k=2, align labels by covariate location, and accumulate
    entrywise coefficient errors.  A replication where any fit degenerates
    counts as a failure and contributes to no family, keeping the families
    comparable on a common set of draws.
    """
    families = tuple(families)
    config_updates = dict(config_updates or {})
    entropies = [
        int(child.generate_state(1)[0])
        for child in np.random.SeedSequence(spec.seed).spawn(spec.replications)
    ]
    tasks = [(spec.scenario, spec.n, e, families, config_updates) for e in entropies]
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(_replication, tasks))
    else:
        outcomes = [_replication(t) for t in tasks]
    collected = [o for o in outcomes if o is not None]
    failures = spec.replications - len(collected)
    if not collected:
        raise CwmError("every replication failed")
    bias, mse = {}, {}
    for family in families:
        stack = np.stack([errors[family] for errors, _ in collected])
        bias[family] = stack.mean(axis=0)
        mse[family] = (stack**2).mean(axis=0)
    eta_rows = [eta for _, eta in collected if eta is not None]
    return MonteCarloReport(
        scenario=spec.scenario,
        n=spec.n,
        replications=spec.replications,
        failures=failures,
        bias=bias,
        mse=mse,
        eta_y=np.stack(eta_rows) if eta_rows else None,
    )


def perturb_with_point(data: np.ndarray, point) -> np.ndarray:
    """Append one observation (x, y) to the data, leaving original rows untouched."""
    data = np.asarray(data, dtype=float)
    x, y = point
    row = np.concatenate([np.atleast_1d(np.asarray(x, dtype=float)).ravel(),
                          np.atleast_1d(np.asarray(y, dtype=float)).ravel()])
    if row.size != data.shape[1]:
        raise DimensionMismatch(f"point has {row.size} coordinates, data has {data.shape[1]}")
    return np.vstack([data, row[None, :]])


def perturb_with_uniform_noise(data: np.ndarray, count: int, side: float, rng: np.random.Generator):
    """Append uniform noise on a hypercube centered at the coordinate-wise mean.

    Returns the augmented data and the indices of the appended rows.
    """
    data = np.asarray(data, dtype=float)
    if count == 0:
        return data.copy(), np.array([], dtype=int)
    center = data.mean(axis=0)
    draws = center - side / 2.0 + side * rng.random((count, data.shape[1]))
    noisy = np.vstack([data, draws])
    return noisy, np.arange(data.shape[0], data.shape[0] + count)
