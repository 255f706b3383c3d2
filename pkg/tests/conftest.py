import sys

import numpy as np
import pytest

from ranksize.models import ModelSpec, evaluate
from ranksize.ingest import RankedSeries, series_from_sizes

# published 2011/12 universal-form fit
FIT_1112 = {"lambda_hat": 48.58, "phi": 0.206, "psi": 4.557}
N_1112 = 443


def universal_curve(params=FIT_1112, n=N_1112):
    spec = ModelSpec("universal_lavalette", n)
    r = np.arange(1, n + 1)
    return evaluate(spec, params, r / (n + 1))


# 09/10 vs 13/14 rankings: top ten plus movers
RANKS_0910 = {  # 09/10 ranks
    "FC Barcelona": 1, "Manchester United FC": 2, "Chelsea FC": 3, "Arsenal FC": 4,
    "Liverpool FC": 5, "FC Bayern Munchen": 6, "Sevilla FC": 7, "FC Internazionale Milano": 8,
    "AC Milan": 9, "Olympique Lyonnais": 10, "Real Madrid CF": 13, "FC Porto": 15,
    "SL Benfica": 17, "Valencia CF": 20, "Club Atletico de Madrid": 23,
}
RANKS_1314 = {  # 13/14 ranks
    "Real Madrid CF": 1, "FC Barcelona": 2, "FC Bayern Munchen": 3, "Chelsea FC": 4,
    "Manchester United FC": 5, "SL Benfica": 6, "Club Atletico de Madrid": 7, "Valencia CF": 8,
    "Arsenal FC": 9, "FC Porto": 10, "AC Milan": 11, "Olympique Lyonnais": 12,
    "FC Internazionale Milano": 13, "Sevilla FC": 25, "Liverpool FC": 32,
}
STARRED_DOWN = ["Liverpool FC", "Sevilla FC", "FC Internazionale Milano", "AC Milan",
                "Olympique Lyonnais"]
STARRED_UP = ["Real Madrid CF", "FC Porto", "SL Benfica", "Valencia CF", "Club Atletico de Madrid"]
BOTH_TOP10 = ["FC Barcelona", "Manchester United FC", "Chelsea FC", "Arsenal FC",
              "FC Bayern Munchen"]


def series_from_ranks(ranks: dict) -> RankedSeries:
    """Build a series whose ranks match ``ranks``; gaps are filled by filler teams."""
    n = max(ranks.values())
    by_rank = {r: lab for lab, r in ranks.items()}
    labels = [by_rank.get(r, f"zz-filler-{r:03d}") for r in range(1, n + 1)]
    return RankedSeries(tuple(labels), np.linspace(100.0, 1.0, n))


@pytest.fixture
def reference_series():
    return series_from_sizes(universal_curve())


@pytest.fixture
def rng():
    return np.random.default_rng(20140531)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[1])):
        terminalreporter.write_line(line)
