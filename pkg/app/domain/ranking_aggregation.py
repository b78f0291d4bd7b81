from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from app.core.exceptions import RankAggregationError
from app.domain.entities.sweep import ResultTable

DEFAULT_EXCLUDED = ("Teacher", "Relevance Only")


@dataclass(frozen=True)
class RankSummary:
    method: str
    best: float
    worst: float
    mean: float
    tables: int


def table_ranks(table: ResultTable, metric: str, excluded: Iterable[str] = DEFAULT_EXCLUDED) -> Dict[str, float]:
    """Rank the methods of one table by descending metric, averaging ties."""
    excluded = set(excluded)
    methods = [
        row.method for row in table.rows
        if row.method not in excluded and row.metrics.get(metric) is not None
    ]
    if not methods:
        return {}
    values = np.array([table.row(m).metrics[metric] for m in methods], dtype=np.float64)
    return dict(zip(methods, rankdata(-values, method="average").tolist()))


def aggregate_ranks(
    tables: Sequence[ResultTable],
    metric: str = "NDCG@5",
    methods: Optional[Sequence[str]] = None,
    excluded: Iterable[str] = DEFAULT_EXCLUDED,
) -> List[RankSummary]:
    """Best, worst and mean rank of every method across tables, sorted by mean rank.

    A method missing from a table (n/a) is skipped for that table only.
    """
    if not tables:
        raise RankAggregationError("no result tables given")
    excluded = tuple(excluded)
    per_table = [table_ranks(t, metric, excluded) for t in tables]

    if methods is None:
        methods = []
        for ranks in per_table:
            methods.extend(m for m in ranks if m not in methods)

    summaries = []
    for method in methods:
        ranks = [r[method] for r in per_table if method in r]
        if not ranks:
            raise RankAggregationError(f"method {method!r} appears in no table")
        summaries.append(RankSummary(method, min(ranks), max(ranks), float(np.mean(ranks)), len(ranks)))
    return sorted(summaries, key=lambda s: (s.mean, s.method))
