"""Synthetic ranked series drawn from the model families.

Noise is multiplicative, ``y * (1 + sigma * eps)`` with standard normal
``eps`` from numpy's PCG64 generator, so a given seed reproduces the same
series on any platform numpy supports. Noisy values are re-sorted so the
output is always a valid :class:`RankedSeries`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ModelDomainError, RankSizeError
from .ingest import RankedSeries
from .models import ModelSpec, ParamVector, evaluate, family_info

NOISE_KINDS = ("none", "multiplicative_gaussian")
MAX_RESAMPLES = 100


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = "none"
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise RankSizeError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if not self.sigma >= 0:
            raise RankSizeError("sigma must be non-negative")
        if not 0 <= int(self.seed) < 2**64:
            raise RankSizeError("seed must be a 64-bit unsigned integer")

    @classmethod
    def gaussian(cls, sigma: float, seed: int = 0) -> "NoiseSpec":
        return cls("multiplicative_gaussian", sigma, seed)


@dataclass(frozen=True)
class Segment:
    family: str
    params: Sequence[float] | Mapping[str, float]
    first: int
    last: int

    @property
    def length(self) -> int:
        return self.last - self.first + 1

    def spec(self) -> ModelSpec:
        return ModelSpec(self.family, self.length if family_info(self.family).needs_n else None)

    def values(self, local_ranks) -> np.ndarray:
        """Model values at ranks counted from the segment start (1 = first)."""
        spec = self.spec()
        params = ParamVector.for_model(spec, self.params)
        return np.atleast_1d(evaluate(spec, params, spec.x_from_ranks(local_ranks)))


@dataclass(frozen=True)
class TailSuppression:
    """Multiply sizes from rank ``start`` on by ``1 - depth * ramp_fraction``.

    The factor falls linearly from 1 to ``1 - depth`` over ``ramp`` ranks,
    reaching ``1 - depth/ramp`` at ``start`` itself; ``ramp=1`` is a step.
    """

    start: int
    depth: float
    ramp: int = 1

    def __post_init__(self):
        if self.start < 1 or self.ramp < 1:
            raise RankSizeError("tail start and ramp must be positive")
        if not 0 <= self.depth < 1:
            raise RankSizeError("tail depth must lie in [0, 1)")

    def factor(self, ranks) -> np.ndarray:
        ranks = np.asarray(ranks, dtype=float)
        frac = np.clip((ranks - self.start + 1) / self.ramp, 0.0, 1.0)
        return 1.0 - self.depth * frac


@dataclass(frozen=True)
class SpliceSpec:
    segments: tuple[Segment, ...]
    continuity: bool = True
    tail: TailSuppression | None = None

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise RankSizeError("a splice needs at least one segment")
        if segs[0].first != 1:
            raise RankSizeError("first segment must start at rank 1")
        for a, b in zip(segs, segs[1:]):
            if b.first != a.last + 1:
                raise RankSizeError("segments must be contiguous and in rank order")
        for s in segs:
            if s.last < s.first:
                raise RankSizeError("segment interval is empty")

    @property
    def n(self) -> int:
        return self.segments[-1].last


def _boundary_ratio(seg: Segment) -> float:
    """Ratio model(last + 1) / model(last) of a segment's own model.

    Families bounded at their own N cannot be evaluated past the segment;
    they continue geometrically from their last step instead.
    """
    try:
        tail = seg.values([seg.length, seg.length + 1])
    except ModelDomainError:
        if seg.length < 2:
            return 1.0
        tail = seg.values([seg.length - 1, seg.length])
    return float(tail[1] / tail[0])


def _apply_noise(y: np.ndarray, noise: NoiseSpec) -> np.ndarray:
    if noise.kind == "none" or noise.sigma == 0:
        return y.copy()
    rng = np.random.Generator(np.random.PCG64(noise.seed))
    factor = 1.0 + noise.sigma * rng.standard_normal(y.size)
    for _ in range(MAX_RESAMPLES):
        bad = factor <= 0
        if not bad.any():
            break
        factor[bad] = 1.0 + noise.sigma * rng.standard_normal(int(bad.sum()))
    else:
        raise RankSizeError(
            f"noise sigma={noise.sigma} keeps producing non-positive sizes after {MAX_RESAMPLES} draws"
        )
    return y * factor


def _to_series(y: np.ndarray) -> RankedSeries:
    y = np.sort(y)[::-1]
    width = max(4, len(str(y.size)))
    labels = tuple(f"item-{i + 1:0{width}d}" for i in range(y.size))
    return RankedSeries(labels, y)


def model_curve(model, params, n: int) -> np.ndarray:
    spec = model if isinstance(model, ModelSpec) else ModelSpec(
        model, n if family_info(model).needs_n else None)
    ranks = np.arange(1, n + 1, dtype=float)
    return np.atleast_1d(evaluate(spec, ParamVector.for_model(spec, params)
                                  if not isinstance(params, ParamVector) else params,
                                  spec.x_from_ranks(ranks)))


def generate(model, params, n: int, noise: NoiseSpec | None = None,
             tail: TailSuppression | None = None) -> RankedSeries:
    """Sizes of ``model`` at ranks 1..n, optionally tail-suppressed and noisy."""
    if n < 3:
        raise RankSizeError("n must be at least 3")
    y = model_curve(model, params, n)
    if tail is not None:
        y = y * tail.factor(np.arange(1, n + 1))
    return _to_series(_apply_noise(y, noise or NoiseSpec()))


def spliced_curve(splice: SpliceSpec) -> np.ndarray:
    """Noise-free piecewise sizes for ranks 1..splice.n (before sorting)."""
    parts = []
    prev_last = prev_ratio = None
    for seg in splice.segments:
        y = seg.values(np.arange(1, seg.length + 1, dtype=float))
        if splice.continuity and prev_last is not None:
            y = y * (prev_last * prev_ratio / y[0])
        parts.append(y)
        prev_last, prev_ratio = float(y[-1]), _boundary_ratio(seg)
    y = np.concatenate(parts)
    if splice.tail is not None:
        y = y * splice.tail.factor(np.arange(1, y.size + 1))
    return y


def generate_spliced(splice: SpliceSpec, n: int | None = None,
                     noise: NoiseSpec | None = None) -> RankedSeries:
    """Piecewise series: each segment on its own local ranks, joined without jumps."""
    if n is not None and n != splice.n:
        raise RankSizeError(f"n={n} does not match the splice length {splice.n}")
    return _to_series(_apply_noise(spliced_curve(splice), noise or NoiseSpec()))


def three_class_splice(n: int = 443, top_ranks: int = 6, top_alpha: float = 0.17,
                       phi: float = 0.30, psi: float = 3.68, shoulder: int | None = 160,
                       depth: float = 0.2, ramp: int = 1, amplitude: float = 150.0) -> SpliceSpec:
    """Top power law, universal-Lavalette middle, optionally suppressed tail."""
    segments = []
    if top_ranks > 0:
        segments.append(Segment("zipf", (amplitude, top_alpha), 1, top_ranks))
    segments.append(Segment("universal_lavalette", (amplitude, phi, psi), top_ranks + 1, n))
    tail = TailSuppression(shoulder, depth, ramp) if shoulder else None
    return SpliceSpec(tuple(segments), True, tail)
