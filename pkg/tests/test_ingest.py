import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ranksize.errors import ParseError, RankSizeError, TooFewRecordsError
from ranksize.ingest import (RankedSeries, RawRecord, parse_records, rank_motion, rank_series,
                             series_from_sizes, to_universal, write_series, VERDICTS)

from conftest import BOTH_TOP10, STARRED_DOWN, STARRED_UP, RANKS_0910, RANKS_1314, series_from_ranks


def test_parse_single_record():
    recs = parse_records(b"FC Barcelona,136.951\n")
    assert recs == [RawRecord("FC Barcelona", 136.951)]


def test_parse_ties_allowed():
    recs = parse_records("A,1.0\nB,1.0\n")
    assert [r.size for r in recs] == [1.0, 1.0]


def test_parse_negative_size_reports_line():
    with pytest.raises(ParseError) as exc:
        parse_records("A,-3\n")
    assert exc.value.line == 1


def test_parse_malformed_line_number():
    with pytest.raises(ParseError) as exc:
        parse_records("A,1\nB,2\nC\n")
    assert exc.value.line == 3
    with pytest.raises(ParseError, match="line 2"):
        parse_records("A,1\nB,abc\n")


@pytest.mark.parametrize("text", ["", "\n\n", "label,size\n"])
def test_parse_empty(text):
    with pytest.raises(ParseError):
        parse_records(text)


def test_parse_header_and_tab_autodetect():
    recs = parse_records("team\tcoeff\nReal Madrid CF\t159.456\nFC Porto\t100.1\n")
    assert [r.label for r in recs] == ["Real Madrid CF", "FC Porto"]


def test_parse_named_columns_and_quoting():
    text = 'rank,coefficient,team\n1,"1.5",\"Team, with comma\"\n'
    recs = parse_records(text, label_col="team", size_col="coefficient")
    assert recs == [RawRecord("Team, with comma", 1.5)]


def test_parse_named_column_without_header():
    with pytest.raises(ParseError):
        parse_records("A,1\n", size_col="size")


def test_rank_series_sorts():
    s = rank_series([RawRecord("x", 5), RawRecord("y", 9), RawRecord("z", 1)])
    assert s.entries == [(1, "y", 9.0), (2, "x", 5.0), (3, "z", 1.0)]


def test_rank_series_tie_policy():
    recs = [RawRecord("B", 4), RawRecord("A", 4), RawRecord("C", 1)]
    s = rank_series(recs)
    assert s.labels[:2] == ("A", "B")
    s = rank_series(recs, tie_policy="input")
    assert s.labels[:2] == ("B", "A")


def test_rank_series_too_few():
    with pytest.raises(TooFewRecordsError):
        rank_series([RawRecord("a", 1), RawRecord("b", 2)])


def test_rank_series_coefficient_extremes(rng):
    # 424 teams spanning the 09/10 minimum and maximum coefficient
    sizes = np.concatenate([[0.150, 136.951], rng.uniform(0.2, 130, 422)])
    rng.shuffle(sizes)
    s = series_from_sizes(sizes)
    assert s.n == 424
    assert s.sizes[0] == 136.951
    assert s.sizes[-1] == 0.150


def test_ranked_series_invariants():
    with pytest.raises(RankSizeError):
        RankedSeries(("a", "b", "c"), [1.0, 2.0, 0.5])
    s = RankedSeries(("a", "b", "c"), [3.0, 2.0, 1.0])
    assert s.ranks.tolist() == [1, 2, 3]
    with pytest.raises(ValueError):
        s.sizes[0] = 10.0


def test_to_universal_examples():
    s = series_from_sizes(range(9, 0, -1))
    u = to_universal(s)
    assert u.u[0] == 0.1
    assert u.u[-1] == 0.9
    assert 1 - u.u[-1] == pytest.approx(1 / 10, rel=1e-15)
    assert 160 / 454 == pytest.approx(0.352, abs=5e-4)


sizes_strategy = st.lists(st.floats(min_value=1e-3, max_value=1e3, allow_nan=False),
                          min_size=3, max_size=60)


@given(sizes_strategy)
def test_rank_series_idempotent(sizes):
    s = series_from_sizes(sizes)
    assert rank_series(s.records()) == s


@given(sizes_strategy)
def test_to_universal_invertible(sizes):
    s = series_from_sizes(sizes)
    u = to_universal(s)
    assert np.all(np.diff(u.u) > 0)
    assert np.all((u.u > 0) & (u.u < 1))
    assert np.array_equal(np.rint(u.u * (s.n + 1)), s.ranks)


def test_write_parse_roundtrip(rng):
    s = series_from_sizes(rng.lognormal(size=50), labels=[f"team {i}, x" for i in range(50)])
    buf = io.StringIO()
    write_series(s, buf)
    assert rank_series(parse_records(buf.getvalue())) == s


# -- rank motion: 09/10 vs 13/14 top ten plus movers -------------------------

def test_motion_0910_to_1314():
    a, b = series_from_ranks(RANKS_0910), series_from_ranks(RANKS_1314)
    verdicts = {m.label: m.verdict for m in rank_motion(a, b, 10)}
    for lab in STARRED_DOWN:
        assert verdicts[lab] == "moved-down-out", lab
    for lab in STARRED_UP:
        assert verdicts[lab] == "moved-up-in", lab
    for lab in BOTH_TOP10:
        assert verdicts[lab] == "stayed-in-top-K", lab


def test_motion_examples():
    a = RankedSeries(("x", "y", "z"), [3, 2, 1])
    b = RankedSeries(("x", "y", "w"), [3, 2, 1])
    v = {m.label: m.verdict for m in rank_motion(a, b, 1)}
    assert v == {"x": "stayed-in-top-K", "y": "outside-both", "z": "departed", "w": "new"}


def test_motion_k_too_large():
    a = RankedSeries(("x", "y", "z"), [3, 2, 1])
    with pytest.raises(RankSizeError):
        rank_motion(a, a, 4)
    with pytest.raises(RankSizeError):
        rank_motion(a, a, 0)


labels_st = st.lists(st.sampled_from([f"t{i}" for i in range(15)]), min_size=3, max_size=15,
                     unique=True)


@given(labels_st, labels_st, st.integers(min_value=1, max_value=15))
def test_motion_partitions_label_union(la, lb, k):
    a = RankedSeries(tuple(la), np.linspace(10, 1, len(la)))
    b = RankedSeries(tuple(lb), np.linspace(10, 1, len(lb)))
    if k > len(la) and k > len(lb):
        with pytest.raises(RankSizeError):
            rank_motion(a, b, k)
        return
    motions = rank_motion(a, b, k)
    assert sorted(m.label for m in motions) == sorted(set(la) | set(lb))
    assert all(m.verdict in VERDICTS for m in motions)
