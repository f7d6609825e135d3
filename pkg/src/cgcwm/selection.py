"""Information-criterion computation and the sweep over candidate k."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .ecm import FitConfig, FitResult, fit
from .errors import CwmError
from .gaussian import GaussianCwmFit, fit_gaussian
from .model import count_free_parameters

__all__ = ["bic", "SelectionEntry", "SelectionResult", "select_k"]


def bic(loglik: float, m: int, n: int) -> float:
    """Bayesian information criterion, 2*loglik - m*ln(n); larger is better."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 * loglik - m * math.log(n)


@dataclass(eq=False)
class SelectionEntry:
    family: str
    k: int
    loglik: float | None
    m: int | None
    bic: float | None
    converged: bool | None
    error: str | None = None
    fit: FitResult | GaussianCwmFit | None = None


@dataclass(eq=False)
class SelectionResult:
    table: list[SelectionEntry]
    best_k: int
    best_fit: FitResult | GaussianCwmFit


def _fit_family(data: np.ndarray, config: FitConfig, family: str):
    if family == "contaminated":
        result = fit(data, config)
        params = result.params
        m = count_free_parameters(params, contaminated=True)
    elif family == "gaussian":
        result = fit_gaussian(data, config)
        m = count_free_parameters(result.params.to_contaminated(), contaminated=False)
    else:
        raise ValueError(f"unknown family {family!r}")
    return result, m


def select_k(
    data: np.ndarray, k_values, config: FitConfig, family: str = "contaminated"
) -> SelectionResult:
    """Fit every candidate k with a shared seed policy and rank by BIC.

    Fits that degenerate are recorded as failed table entries and excluded
    from the argmax.  Deterministic given ``config.seed``.
    """
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    table: list[SelectionEntry] = []
    best: SelectionEntry | None = None
    for k in k_values:
        k_config = replace(config, k=int(k))
        try:
            result, m = _fit_family(data, k_config, family)
        except CwmError as exc:
            table.append(
                SelectionEntry(
                    family=family, k=int(k), loglik=None, m=None, bic=None,
                    converged=None, error=f"{type(exc).__name__}: {exc}",
                )
            )
            continue
        entry = SelectionEntry(
            family=family,
            k=int(k),
            loglik=result.loglik,
            m=m,
            bic=bic(result.loglik, m, n),
            converged=result.converged,
            fit=result,
        )
        table.append(entry)
        if best is None or entry.bic > best.bic:
            best = entry
    if best is None:
        raise CwmError("every candidate k failed to fit")
    return SelectionResult(table=table, best_k=best.k, best_fit=best.fit)
