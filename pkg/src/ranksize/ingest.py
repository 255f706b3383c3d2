"""Reading ranked-size data and building validated ranked series.

Input is delimited text (comma or tab), one ``label, size`` record per line,
with an optional header row. A header is recognised when the size field of
the first non-blank line does not parse as a number.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import ParseError, RankSizeError, TooFewRecordsError

MIN_SERIES_LENGTH = 3

TIE_POLICIES = ("label", "input")

VERDICTS = (
    "stayed-in-top-K",
    "moved-down-out",
    "moved-up-in",
    "outside-both",
    "new",
    "departed",
)


@dataclass(frozen=True)
class RawRecord:
    label: str
    size: float

    def __post_init__(self):
        label = self.label.strip()
        if not label:
            raise RankSizeError("record label is empty")
        object.__setattr__(self, "label", label)
        size = float(self.size)
        if not math.isfinite(size) or size <= 0:
            raise RankSizeError(f"size must be positive and finite, got {self.size!r}")
        object.__setattr__(self, "size", size)


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RankedSeries:
    """Sizes sorted descending with dense ranks 1..N.

    ``sizes[i]`` is the size at rank ``i + 1``.
    """

    labels: tuple[str, ...]
    sizes: np.ndarray

    def __post_init__(self):
        sizes = _frozen_array(self.sizes)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "labels", tuple(self.labels))
        if sizes.ndim != 1 or len(self.labels) != sizes.size:
            raise RankSizeError("labels and sizes must be 1-d and of equal length")
        if sizes.size < MIN_SERIES_LENGTH:
            raise TooFewRecordsError(
                f"too few records: need at least {MIN_SERIES_LENGTH}, got {sizes.size}"
            )
        if not np.all(np.isfinite(sizes)) or np.any(sizes <= 0):
            raise RankSizeError("sizes must be positive and finite")
        if np.any(np.diff(sizes) > 0):
            raise RankSizeError("sizes must be non-increasing in rank")

    @property
    def n(self) -> int:
        return int(self.sizes.size)

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=float)

    @property
    def entries(self) -> list[tuple[int, str, float]]:
        return [(i + 1, lab, float(s)) for i, (lab, s) in enumerate(zip(self.labels, self.sizes))]

    def records(self) -> list[RawRecord]:
        return [RawRecord(lab, float(s)) for lab, s in zip(self.labels, self.sizes)]

    def scaled(self, factor: float) -> "RankedSeries":
        if factor <= 0:
            raise RankSizeError("scale factor must be positive")
        return RankedSeries(self.labels, self.sizes * factor)

    def __eq__(self, other):
        if not isinstance(other, RankedSeries):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.sizes, other.sizes)

    def __hash__(self):
        return hash((self.labels, self.sizes.tobytes()))

    def __len__(self):
        return self.n


@dataclass(frozen=True, eq=False)
class UniversalSeries:
    """A ranked series re-expressed on the normalised rank u = r/(N+1)."""

    u: np.ndarray
    sizes: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "u", _frozen_array(self.u))
        object.__setattr__(self, "sizes", _frozen_array(self.sizes))

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.u.tolist(), self.sizes.tolist()))

    def ranks(self) -> np.ndarray:
        return np.rint(self.u * (self.n + 1)).astype(int)


@dataclass(frozen=True)
class RankMotion:
    label: str
    rank_a: int | None
    rank_b: int | None
    verdict: str

    def to_dict(self) -> dict:
        return {"label": self.label, "rank_a": self.rank_a, "rank_b": self.rank_b,
                "verdict": self.verdict}


# -- parsing ---------------------------------------------------------------

def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _parse_float(text: str) -> float | None:
    try:
        return float(text.strip())
    except ValueError:
        return None


def _resolve_column(col, header: list[str] | None, what: str) -> int:
    if isinstance(col, int):
        return col
    if header is None:
        raise ParseError(f"{what} column {col!r} given by name but input has no header row")
    names = [h.strip() for h in header]
    if col not in names:
        raise ParseError(f"{what} column {col!r} not in header {names}")
    return names.index(col)


def parse_records(
    source: bytes | str | IO,
    delimiter: str | None = None,
    label_col: int | str = 0,
    size_col: int | str = 1,
) -> list[RawRecord]:
    """Parse delimited ``label, size`` text into records.

    ``source`` may be bytes (UTF-8), a string, or a readable stream.
    ``delimiter`` defaults to tab if the first line holds one, else comma.
    Columns are 0-based indices or header names.
    """
    text = _read_text(source)
    lines = text.splitlines()
    first = next((ln for ln in lines if ln.strip()), None)
    if first is None:
        raise ParseError("empty input")
    if delimiter is None:
        delimiter = "\t" if "\t" in first else ","

    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    header = None
    li = si = None
    records = []
    for row in reader:
        lineno = reader.line_num
        if not row or all(not f.strip() for f in row):
            continue
        if li is None:
            # first non-blank row: decide whether it is a header
            probe = size_col if isinstance(size_col, int) else None
            if probe is None or (probe < len(row) and _parse_float(row[probe]) is None):
                header = row
                li = _resolve_column(label_col, header, "label")
                si = _resolve_column(size_col, header, "size")
                continue
            li, si = label_col, size_col
        if max(li, si) >= len(row):
            raise ParseError(f"expected at least {max(li, si) + 1} fields, got {len(row)}", lineno)
        size = _parse_float(row[si])
        if size is None:
            raise ParseError(f"size field {row[si]!r} is not a number", lineno)
        if not math.isfinite(size) or size <= 0:
            raise ParseError(f"size must be positive and finite, got {row[si].strip()}", lineno)
        if not row[li].strip():
            raise ParseError("empty label", lineno)
        records.append(RawRecord(row[li], size))
    if not records:
        raise ParseError("empty input: no data records")
    return records


def read_series(path, **kwargs) -> RankedSeries:
    with open(path, "rb") as fh:
        return rank_series(parse_records(fh, **kwargs))


def write_series(series: RankedSeries, stream: IO[str]) -> None:
    """Write ``series`` in the delimited format :func:`parse_records` reads."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["label", "size"])
    for label, size in zip(series.labels, series.sizes):
        writer.writerow([label, repr(float(size))])


# -- ranking ---------------------------------------------------------------

def rank_series(records: Sequence[RawRecord], tie_policy: str = "label") -> RankedSeries:
    """Sort records by size descending and assign dense ranks 1..N.

    Ties are broken by ascending label (``"label"``) or by input order
    (``"input"``).
    """
    if tie_policy not in TIE_POLICIES:
        raise RankSizeError(f"unknown tie policy {tie_policy!r}; expected one of {TIE_POLICIES}")
    records = list(records)
    if len(records) < MIN_SERIES_LENGTH:
        raise TooFewRecordsError(
            f"too few records: need at least {MIN_SERIES_LENGTH}, got {len(records)}"
        )
    if tie_policy == "label":
        ordered = sorted(records, key=lambda rec: (-rec.size, rec.label))
    else:
        ordered = sorted(records, key=lambda rec: -rec.size)
    return RankedSeries(tuple(r.label for r in ordered), [r.size for r in ordered])


def series_from_sizes(sizes: Iterable[float], labels: Sequence[str] | None = None,
                      tie_policy: str = "label") -> RankedSeries:
    sizes = list(sizes)
    if labels is None:
        width = max(4, len(str(len(sizes))))
        labels = [f"item-{i + 1:0{width}d}" for i in range(len(sizes))]
    return rank_series([RawRecord(lab, s) for lab, s in zip(labels, sizes)], tie_policy)


def to_universal(series: RankedSeries) -> UniversalSeries:
    n = series.n
    return UniversalSeries(series.ranks / (n + 1), series.sizes.copy(), n)


# -- rank motion -----------------------------------------------------------

def motion_verdict(rank_a: int | None, rank_b: int | None, k: int) -> str:
    if rank_a is None and rank_b is None:
        raise RankSizeError("label must be ranked in at least one series")
    if rank_a is None:
        return "new"
    if rank_b is None:
        return "departed"
    if rank_a <= k and rank_b <= k:
        return "stayed-in-top-K"
    if rank_a <= k:
        return "moved-down-out"
    if rank_b <= k:
        return "moved-up-in"
    return "outside-both"


def _rank_map(series: RankedSeries, which: str) -> dict[str, int]:
    ranks = {}
    for rank, label, _ in series.entries:
        if label in ranks:
            raise RankSizeError(f"duplicate label {label!r} in series {which}")
        ranks[label] = rank
    return ranks


def rank_motion(series_a: RankedSeries, series_b: RankedSeries, k: int) -> list[RankMotion]:
    """Classify every label's move relative to the top-``k`` between two rankings.

    Output is ordered by rank in ``series_a``, then by rank in ``series_b``
    for labels absent from ``series_a``.
    """
    if k < 1:
        raise RankSizeError("k must be at least 1")
    if k > series_a.n and k > series_b.n:
        raise RankSizeError(f"k={k} exceeds the length of both series ({series_a.n}, {series_b.n})")
    a = _rank_map(series_a, "a")
    b = _rank_map(series_b, "b")
    inf = float("inf")
    labels = sorted(set(a) | set(b), key=lambda lab: (a.get(lab, inf), b.get(lab, inf), lab))
    return [RankMotion(lab, a.get(lab), b.get(lab), motion_verdict(a.get(lab), b.get(lab), k))
            for lab in labels]
