"""Descriptive statistics of a ranked series (count, extremes, moments)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy import stats as sps

from .ingest import RankedSeries


@dataclass(frozen=True)
class SummaryStats:
    n: int
    minimum: float
    maximum: float
    mean: float
    median: float
    rms: float
    variance: float
    std_error: float
    skewness: float | None
    kurtosis_excess: float | None
    mean_over_sigma: float | None

    @property
    def degenerate(self) -> bool:
        """True when the variance is zero and the ratio/shape moments are undefined."""
        return self.mean_over_sigma is None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        names = [f.name for f in fields(self)]
        writer.writerow(names)
        writer.writerow(["" if getattr(self, k) is None else repr(getattr(self, k)) for k in names])
        return buf.getvalue()


def summarize(series: RankedSeries | np.ndarray, bias_corrected: bool = True) -> SummaryStats:
    """Summarise the sizes of ``series``.

    Variance uses the N-1 denominator; std_error is sqrt(variance/N).
    With ``bias_corrected`` (default) skewness and excess kurtosis are the
    adjusted sample estimators (G1, G2); otherwise the plain population
    moment ratios. Corrected kurtosis needs N >= 4 and is None below that.
    """
    x = np.asarray(series.sizes if isinstance(series, RankedSeries) else series, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least two values")
    mean = float(np.mean(x))
    variance = float(np.var(x, ddof=1))
    rms = math.sqrt(float(np.mean(x * x)))

    if variance > 0:
        skew = float(sps.skew(x, bias=not bias_corrected))
        if bias_corrected and n < 4:
            kurt = None
        else:
            kurt = float(sps.kurtosis(x, fisher=True, bias=not bias_corrected))
        ratio = mean / math.sqrt(variance)
    else:
        skew = kurt = ratio = None

    return SummaryStats(
        n=int(n),
        minimum=float(np.min(x)),
        maximum=float(np.max(x)),
        mean=mean,
        median=float(np.median(x)),
        rms=rms,
        variance=variance,
        std_error=math.sqrt(variance / n),
        skewness=skew,
        kurtosis_excess=kurt,
        mean_over_sigma=ratio,
    )
