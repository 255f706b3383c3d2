"""Goodness-of-fit measures and ranking of competing fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import RankSizeError
from .optimizer import FitResult

CRITERIA = ("r_squared", "chi_square_per_dof")


def _pair(observed, predicted) -> tuple[np.ndarray, np.ndarray]:
    o = np.asarray(observed, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if o.shape != p.shape or o.ndim != 1:
        raise RankSizeError(f"length mismatch: {o.shape} vs {p.shape}")
    return o, p


def chi_square(observed, predicted) -> float:
    """Unweighted sum of squared residuals."""
    o, p = _pair(observed, predicted)
    if o.size < 1:
        raise RankSizeError("need at least one point")
    return float(np.sum((o - p) ** 2))


def r_squared(observed, predicted) -> float:
    """1 - SSR/TSS with TSS taken about the observed mean. May be negative."""
    o, p = _pair(observed, predicted)
    if o.size < 2:
        raise RankSizeError("need at least two points")
    tss = float(np.sum((o - o.mean()) ** 2))
    if tss == 0:
        raise RankSizeError("r_squared is undefined for constant observations")
    return 1.0 - chi_square(o, p) / tss


@dataclass(frozen=True)
class ComparisonEntry:
    family: str
    chi_square: float
    r_squared: float | None
    n_params: int
    rank_by_criterion: int
    chi_square_per_dof: float

    def to_dict(self) -> dict:
        per_dof = self.chi_square_per_dof
        return {
            "family": self.family,
            "chi_square": self.chi_square,
            "r_squared": self.r_squared,
            "n_params": self.n_params,
            "chi_square_per_dof": per_dof if math.isfinite(per_dof) else None,
            "rank": self.rank_by_criterion,
        }


@dataclass(frozen=True)
class ModelComparison:
    entries: tuple[ComparisonEntry, ...]
    criterion: str

    def to_list(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]

    def best(self) -> ComparisonEntry:
        return self.entries[0]


def compare(fits: Sequence[FitResult], criterion: str = "r_squared") -> ModelComparison:
    """Rank fits: higher R^2 (or lower chi^2 per N-p dof) first.

    Ties go to the model with fewer parameters, then to family name.
    Undefined R^2 sorts last.
    """
    if criterion not in CRITERIA:
        raise RankSizeError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    fits = list(fits)
    if not fits:
        raise RankSizeError("nothing to compare")

    def key(f: FitResult):
        if criterion == "r_squared":
            score = -f.r_squared if f.r_squared is not None else math.inf
        else:
            score = f.chi_square_per_dof
        return (score, f.model.n_params, f.model.family)

    ordered = sorted(fits, key=key)
    entries = tuple(
        ComparisonEntry(f.model.family, f.chi_square, f.r_squared, f.model.n_params, i,
                        f.chi_square_per_dof)
        for i, f in enumerate(ordered, start=1)
    )
    return ModelComparison(entries, criterion)
