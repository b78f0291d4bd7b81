import logging
from typing import Dict, Mapping, Optional, Sequence

import numpy as np

from app.core.exceptions import MetricConfigurationError
from app.domain.entities.evaluation import EvalReport
from app.domain.entities.ranking import Dataset
from app.domain.losses.base import as_pair
from app.schemas.metrics import EmptyQueryPolicy, MetricKind, MetricSpec

logger = logging.getLogger(__name__)

RunMapping = Mapping[str, Mapping[str, float]]

GAIN_EXPONENTIAL = "exponential"
GAIN_IDENTITY = "identity"


def _gains(relevance: np.ndarray, gain: str) -> np.ndarray:
    if gain == GAIN_EXPONENTIAL:
        return np.exp2(relevance) - 1.0
    if gain == GAIN_IDENTITY:
        return relevance
    raise ValueError(f"Unknown gain mode: {gain}")


def _cutoff(n: int, k: Optional[int]) -> int:
    return n if k is None else min(int(k), n)


def ndcg_at_k(relevance, scores, k: Optional[int] = None, gain: str = GAIN_EXPONENTIAL) -> float:
    """NDCG@k with ranks from a stable descending sort of the scores.

    Returns 0.0 when the ideal DCG is zero; callers apply the empty-query policy.
    """
    y, s = as_pair(relevance, scores)
    g = _gains(y, gain)
    depth = _cutoff(y.size, k)
    discounts = 1.0 / np.log2(np.arange(2, depth + 2))
    order = np.argsort(-s, kind="stable")[:depth]
    ideal = float(np.sum(np.sort(g)[::-1][:depth] * discounts))
    if ideal <= 0.0:
        return 0.0
    return float(np.sum(g[order] * discounts)) / ideal


def mrr_at_k(binary_relevance, scores, k: Optional[int] = None) -> float:
    """Reciprocal rank of the first relevant item, 0 when it falls past k."""
    y, s = as_pair(binary_relevance, scores)
    order = np.argsort(-s, kind="stable")
    hits = np.flatnonzero(y[order] > 0)
    if hits.size == 0:
        return 0.0
    rank = int(hits[0]) + 1
    if k is not None and rank > k:
        return 0.0
    return 1.0 / rank


def binarize(labels: np.ndarray, threshold: float) -> np.ndarray:
    return (labels >= threshold).astype(np.float64)


def _query_arrays(scored: Mapping[str, float], judged: Mapping[str, float]):
    # ties in score fall back to doc_id order
    doc_ids = sorted(scored, key=lambda d: (-float(scored[d]), d))
    scores = np.array([float(scored[d]) for d in doc_ids], dtype=np.float64)
    labels = np.array([float(judged.get(d, 0.0)) for d in doc_ids], dtype=np.float64)
    return labels, scores


def _mrr_labels(labels: np.ndarray, spec: MetricSpec, query_id: str) -> np.ndarray:
    if spec.binarize_threshold is not None:
        return binarize(labels, spec.binarize_threshold)
    if np.any((labels != 0.0) & (labels != 1.0)):
        raise MetricConfigurationError(
            f"{spec.name} needs binary labels; query {query_id} is graded and no binarize threshold is set"
        )
    return labels


def check_metric_labels(ds: Dataset, specs: Sequence[MetricSpec]) -> None:
    """Fail before any training when an MRR metric would meet graded labels without a threshold."""
    for spec in specs:
        if spec.kind != MetricKind.MRR or spec.binarize_threshold is not None:
            continue
        for rl in ds:
            if rl.relevance is not None:
                _mrr_labels(np.asarray(rl.relevance, dtype=np.float64), spec, rl.query_id)


def evaluate(run: RunMapping, qrels: RunMapping, spec: MetricSpec) -> EvalReport:
    """Score every query of a run against the judgments and aggregate ×100."""
    per_query: Dict[str, float] = {}
    dropped = 0
    unjudged = []

    for query_id in sorted(run):
        scored = run[query_id]
        if query_id not in qrels:
            unjudged.append(query_id)
        labels, scores = _query_arrays(scored, qrels.get(query_id, {}))

        if spec.kind == MetricKind.MRR:
            labels = _mrr_labels(labels, spec, query_id)

        if not np.any(labels > 0):
            if spec.empty_query_policy == EmptyQueryPolicy.PERFECT:
                per_query[query_id] = 1.0
            elif spec.empty_query_policy == EmptyQueryPolicy.ZERO:
                per_query[query_id] = 0.0
            else:
                dropped += 1
            continue

        if spec.kind == MetricKind.NDCG:
            per_query[query_id] = ndcg_at_k(labels, scores, spec.cutoff)
        else:
            per_query[query_id] = mrr_at_k(labels, scores, spec.cutoff)

    if unjudged:
        logger.warning(f"{len(unjudged)} run queries have no judgments and count as empty: {unjudged[:5]}")
    if dropped and spec.empty_query_policy == EmptyQueryPolicy.IGNORE:
        logger.warning(f"{spec.name}: {dropped} queries without positive labels ignored")

    values = list(per_query.values())
    aggregate = 100.0 * float(np.mean(values)) if values else 0.0
    return EvalReport(
        metric=spec.name,
        per_query=per_query,
        aggregate=aggregate,
        retained_count=len(per_query),
        dropped_count=dropped,
        empty_query_policy=spec.empty_query_policy.value,
        unjudged_queries=unjudged,
    )


def dataset_to_run(ds: Dataset, scores: Optional[Mapping[str, np.ndarray]] = None) -> Dict[str, Dict[str, float]]:
    """Run view of a dataset: the given per-query scores, or its teacher scores."""
    run = {}
    for rl in ds:
        values = scores[rl.query_id] if scores is not None else rl.teacher_scores
        if values is None:
            continue
        run[rl.query_id] = {d: float(v) for d, v in zip(rl.doc_ids, values)}
    return run


def dataset_to_qrels(ds: Dataset) -> Dict[str, Dict[str, float]]:
    return {
        rl.query_id: {d: float(v) for d, v in zip(rl.doc_ids, rl.relevance)}
        for rl in ds
        if rl.relevance is not None
    }
