"""Three-class decomposition of a ranking: top, middle, tail.

1. The top-class boundary r1 sits where the slope of a smoothed ln(size)
   curve changes sharply: a prominent peak of |d| with
   d(r) = s(r+1) - s(r) and s the centred moving average of ln(size).
2. Ranks 1..r1 get a power-law fit.
3. Ranks r1+1..N get a universal-Lavalette fit on their own reduced
   ranking (r' = r - r1, N' = N - r1).
4. The shoulder is the first rank from which the middle fit's relative
   residual stays one-signed and, averaged over a window, exceeds a
   threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import FitError, RankSizeError
from .ingest import RankedSeries
from .models import ModelSpec
from .optimizer import FitOptions, FitResult, fit


@dataclass(frozen=True)
class SegmentationConfig:
    smoothing_window: int = 5
    derivative_peak_min_prominence: float | None = None  # None: 2 x median |d|
    shoulder_window: int = 15
    shoulder_rel_threshold: float = 0.10
    top_class_max: int = 20

    def __post_init__(self):
        w = self.smoothing_window
        if int(w) != w or w < 3 or w % 2 == 0:
            raise RankSizeError("smoothing_window must be an odd integer >= 3")
        if int(self.shoulder_window) != self.shoulder_window or self.shoulder_window < 3:
            raise RankSizeError("shoulder_window must be an integer >= 3")
        if not self.shoulder_rel_threshold > 0:
            raise RankSizeError("shoulder_rel_threshold must be positive")
        if self.derivative_peak_min_prominence is not None and not self.derivative_peak_min_prominence > 0:
            raise RankSizeError("derivative_peak_min_prominence must be positive")
        if int(self.top_class_max) != self.top_class_max or self.top_class_max < 1:
            raise RankSizeError("top_class_max must be a positive integer")


@dataclass(frozen=True)
class TopBoundaryCandidate:
    r1: int
    peak_rank: int
    prominence: float


@dataclass(frozen=True)
class SegmentationResult:
    n: int
    r1: int
    shoulder_rank: int | None
    top_fit: FitResult | None
    middle_fit: FitResult
    warnings: tuple[str, ...] = ()

    @property
    def classes(self) -> tuple[tuple[int, int] | None, ...]:
        """(top, middle, tail) closed rank intervals; empty classes are None."""
        end_middle = self.n if self.shoulder_rank is None else self.shoulder_rank - 1
        top = (1, self.r1) if self.r1 >= 1 else None
        middle = (self.r1 + 1, end_middle) if end_middle >= self.r1 + 1 else None
        tail = (self.shoulder_rank, self.n) if self.shoulder_rank is not None else None
        return top, middle, tail

    def class_of(self, rank: int) -> str:
        names = ("top", "middle", "tail")
        for name, iv in zip(names, self.classes):
            if iv is not None and iv[0] <= rank <= iv[1]:
                return name
        raise RankSizeError(f"rank {rank} outside 1..{self.n}")

    def to_dict(self) -> dict:
        top, middle, tail = self.classes
        return {
            "n": self.n,
            "r1": self.r1,
            "shoulder_rank": self.shoulder_rank,
            "classes": {
                "top": list(top) if top else None,
                "middle": list(middle) if middle else None,
                "tail": list(tail) if tail else None,
            },
            "top_fit": self.top_fit.to_dict() if self.top_fit else None,
            "middle_fit": self.middle_fit.to_dict(),
            "warnings": list(self.warnings),
        }


# -- top boundary ------------------------------------------------------------

def _odd_reflect(values: np.ndarray, h: int) -> np.ndarray:
    # continues the local trend past each end, so the first difference is mirrored
    left = 2 * values[0] - values[h:0:-1]
    right = 2 * values[-1] - values[-2:-h - 2:-1]
    return np.concatenate([left, values, right])


def smoothed_log_derivative(series: RankedSeries, window: int) -> np.ndarray:
    """|d(r)| for r = 1..N-1 (index r-1), with d from the moving-average ln(size)."""
    h = window // 2
    logs = np.log(np.asarray(series.sizes))
    smooth = np.convolve(_odd_reflect(logs, h), np.ones(window) / window, mode="valid")
    return np.abs(np.diff(smooth))


def top_boundary_candidates(series: RankedSeries,
                            config: SegmentationConfig | None = None) -> list[TopBoundaryCandidate]:
    """Every qualifying derivative peak with the boundary it implies, uncapped.

    A peak of the smoothed |d| at rank p spans raw slope steps p-h..p+h
    (h = window // 2); the boundary is placed just before the largest
    increase of the raw |ln y(q+1) - ln y(q)| within that span.
    """
    config = config or SegmentationConfig()
    w = config.smoothing_window
    if series.n < 3 * w:
        raise RankSizeError(f"series too short: need at least {3 * w} ranks, got {series.n}")
    h = w // 2
    dabs = smoothed_log_derivative(series, w)
    threshold = config.derivative_peak_min_prominence
    if threshold is None:
        threshold = 2.0 * float(np.median(dabs))
    if threshold <= 0:
        return []
    peaks, props = find_peaks(dabs, prominence=threshold)
    raw = np.abs(np.diff(np.log(np.asarray(series.sizes))))
    jumps = np.diff(raw)  # jumps[q-2] = |step q| - |step q-1|, q = 2..N-1
    out = []
    for idx, prom in zip(peaks, props["prominences"]):
        p = int(idx) + 1
        lo, hi = max(2, p - h), min(series.n - 1, p + h)
        if hi < lo:
            continue
        q = lo + int(np.argmax(jumps[lo - 2:hi - 1]))
        out.append(TopBoundaryCandidate(q - 1, p, float(prom)))
    return out


def detect_top_boundary(series: RankedSeries, config: SegmentationConfig | None = None) -> int:
    """Rank r1 ending the top class, or 0 when no qualifying peak exists."""
    config = config or SegmentationConfig()
    usable = [c for c in top_boundary_candidates(series, config)
              if 1 <= c.r1 <= config.top_class_max]
    if not usable:
        return 0
    return max(usable, key=lambda c: (c.prominence, -c.r1)).r1


# -- class fits --------------------------------------------------------------

def fit_top_class(series: RankedSeries, r1: int, options: FitOptions | None = None) -> FitResult:
    """Power-law (zipf) fit over ranks 1..r1."""
    if r1 < 2:
        raise FitError(f"top class needs at least 2 ranks to fit a power law, got r1={r1}")
    if r1 > series.n:
        raise FitError(f"r1={r1} exceeds series length {series.n}")
    ranks = np.arange(1, r1 + 1, dtype=float)
    return fit("zipf", (ranks, np.asarray(series.sizes[:r1])), options)


def fit_middle_class(series: RankedSeries, r1: int, options: FitOptions | None = None) -> FitResult:
    """Universal-Lavalette fit over ranks r1+1..N, re-ranked from 1."""
    n_mid = series.n - r1
    if r1 < 0 or n_mid < 4:
        raise FitError(f"middle class needs at least 4 ranks beyond r1={r1}, got {max(n_mid, 0)}")
    local = np.arange(1, n_mid + 1, dtype=float)
    spec = ModelSpec("universal_lavalette", n_mid)
    return fit(spec, (local, np.asarray(series.sizes[r1:])), options, rank_offset=r1)


def relative_residuals(series: RankedSeries, middle_fit: FitResult) -> np.ndarray:
    """(y - yhat)/yhat over ranks rank_offset+1..N."""
    start = middle_fit.rank_offset
    ranks = np.arange(start + 1, series.n + 1, dtype=float)
    y = np.asarray(series.sizes[start:])
    yhat = middle_fit.predict_ranks(ranks)
    return (y - yhat) / yhat


def detect_shoulder(series: RankedSeries, middle_fit: FitResult,
                    config: SegmentationConfig | None = None) -> int | None:
    """First rank where the middle fit starts deviating systematically, or None."""
    config = config or SegmentationConfig()
    if not middle_fit.converged:
        raise FitError("shoulder detection needs a converged middle-class fit")
    if middle_fit.rank_offset + middle_fit.n_points != series.n:
        raise FitError("middle-class fit does not cover the end of the series")
    e = relative_residuals(series, middle_fit)
    w = config.shoulder_window
    if e.size < w:
        return None
    windows = np.lib.stride_tricks.sliding_window_view(e, w)
    means = windows.mean(axis=1)
    one_sided = np.all(windows > 0, axis=1) | np.all(windows < 0, axis=1)
    hits = np.flatnonzero(one_sided & (np.abs(means) > config.shoulder_rel_threshold))
    if hits.size == 0:
        return None
    return middle_fit.rank_offset + int(hits[0]) + 1


# -- pipeline ----------------------------------------------------------------

def segment(series: RankedSeries, config: SegmentationConfig | None = None,
            options: FitOptions | None = None) -> SegmentationResult:
    config = config or SegmentationConfig()
    warnings = []
    candidates = top_boundary_candidates(series, config)
    r1 = detect_top_boundary(series, config)
    if r1 == 0:
        capped = [c for c in candidates if c.r1 > config.top_class_max]
        if capped:
            warnings.append(
                f"no top class detected within top_class_max={config.top_class_max}; "
                f"strongest excluded boundary at rank {max(capped, key=lambda c: c.prominence).r1}"
            )
        else:
            warnings.append("no top class detected")

    top_fit = None
    if r1 >= 2:
        top_fit = fit_top_class(series, r1, options)
    elif r1 == 1:
        warnings.append("top class is a single rank; no power-law fit")

    middle_fit = fit_middle_class(series, r1, options)
    shoulder = None
    if middle_fit.converged:
        shoulder = detect_shoulder(series, middle_fit, config)
        if shoulder is None:
            warnings.append("no shoulder detected")
    else:
        warnings.append(f"middle-class fit did not converge ({middle_fit.termination}); "
                        "shoulder not searched")
    return SegmentationResult(series.n, r1, shoulder, top_fit, middle_fit, tuple(warnings))
