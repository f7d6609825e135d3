"""Posterior cluster assignment and the four-way atypicality labels.

After fitting, every observation is first assigned to the component with
the largest membership posterior, then labeled within that component by
its typicality posteriors: below 1/2 on the response side means outlier,
below 1/2 on the covariate side means leverage point, below on both means
bad leverage.  The boundary 1/2 belongs to the typical side.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .ecm import FitResult, Responsibilities

__all__ = [
    "Category",
    "ObservationLabel",
    "map_component",
    "categorize",
    "classify_responsibilities",
    "classify_dataset",
]


class Category(str, Enum):
    TYPICAL = "typical"
    OUTLIER = "outlier"
    GOOD_LEVERAGE = "good_leverage"
    BAD_LEVERAGE = "bad_leverage"


@dataclass(frozen=True, eq=False)
class ObservationLabel:
    """Cluster assignment plus atypicality category for one observation.

    ``y_typical``/``x_typical`` are the typicality posteriors at the
    assigned component.
    """

    component: int  # 1-based
    category: Category
    comp_posterior: np.ndarray
    y_typical: float
    x_typical: float


def map_component(posterior_row) -> int:
    """1-based index of the largest posterior; ties break to the lowest index."""
    return int(np.argmax(np.asarray(posterior_row))) + 1


def categorize(y_typical: float, x_typical: float) -> Category:
    """Quadrant rule on the two typicality posteriors (closed at 1/2)."""
    response_ok = y_typical >= 0.5
    covariate_ok = x_typical >= 0.5
    if response_ok and covariate_ok:
        return Category.TYPICAL
    if response_ok:
        return Category.GOOD_LEVERAGE
    if covariate_ok:
        return Category.OUTLIER
    return Category.BAD_LEVERAGE


def classify_responsibilities(resp: Responsibilities) -> list[ObservationLabel]:
    """Label observations directly from E-step responsibility matrices."""
    labels = []
    for i in range(resp.n):
        h = map_component(resp.comp[i])
        u = float(resp.y_typical[i, h - 1])
        v = float(resp.x_typical[i, h - 1])
        labels.append(
            ObservationLabel(
                component=h,
                category=categorize(u, v),
                comp_posterior=resp.comp[i].copy(),
                y_typical=u,
                x_typical=v,
            )
        )
    return labels


def classify_dataset(data: np.ndarray, fit: FitResult) -> list[ObservationLabel]:
    """Label every observation from the fit's converged responsibilities."""
    n = np.asarray(data).shape[0]
    if fit.resp.n != n:
        raise ValueError(f"fit holds {fit.resp.n} observations, data has {n}")
    return classify_responsibilities(fit.resp)
