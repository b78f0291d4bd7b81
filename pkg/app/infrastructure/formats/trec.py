import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Union

import numpy as np

from app.core.exceptions import DuplicateRunEntryError, TrecFormatError
from app.domain.entities.ranking import Dataset, RankList
from app.domain.entities.trec import TrecQrelRecord, TrecRunRecord

logger = logging.getLogger(__name__)

TextSource = Union[str, Iterable[str]]


def iter_lines(source: TextSource) -> Iterable[str]:
    if isinstance(source, str):
        return source.splitlines()
    return source


def _finite(text: str, what: str, line_number: int, source_name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise TrecFormatError(f"unparseable {what} {text!r}", line_number, source_name)
    if not math.isfinite(value):
        raise TrecFormatError(f"{what} must be finite, got {text!r}", line_number, source_name)
    return value


def parse_trec_run(source: TextSource, source_name: str = "") -> List[TrecRunRecord]:
    """Parse `<qid> <ph> <docid> <rank> <score> <tag>` lines."""
    records = []
    for line_number, line in enumerate(iter_lines(source), start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 6:
            raise TrecFormatError(f"expected 6 fields, got {len(fields)}", line_number, source_name)
        query_id, placeholder, doc_id, rank_text, score_text, tag = fields
        try:
            rank = int(rank_text)
        except ValueError:
            raise TrecFormatError(f"unparseable rank {rank_text!r}", line_number, source_name)
        if rank < 1:
            raise TrecFormatError(f"rank must be >= 1, got {rank}", line_number, source_name)
        score = _finite(score_text, "score", line_number, source_name)
        records.append(TrecRunRecord(query_id, doc_id, rank, score, tag, placeholder))
    return records


def write_trec_run(records: Sequence[TrecRunRecord]) -> str:
    # repr gives the shortest string that parses back to the same double
    return "".join(
        f"{r.query_id} {r.placeholder} {r.doc_id} {r.rank} {r.score!r} {r.tag}\n" for r in records
    )


def parse_qrels(source: TextSource, source_name: str = "") -> List[TrecQrelRecord]:
    """Parse `<qid> <ph> <docid> <label>` lines."""
    records = []
    for line_number, line in enumerate(iter_lines(source), start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 4:
            raise TrecFormatError(f"expected 4 fields, got {len(fields)}", line_number, source_name)
        query_id, placeholder, doc_id, label_text = fields
        label = _finite(label_text, "label", line_number, source_name)
        if label < 0:
            raise TrecFormatError(f"label must be >= 0, got {label_text!r}", line_number, source_name)
        records.append(TrecQrelRecord(query_id, doc_id, label, placeholder))
    return records


def _format_label(label: float) -> str:
    if float(label).is_integer():
        return str(int(label))
    return repr(float(label))


def write_qrels(records: Sequence[TrecQrelRecord]) -> str:
    return "".join(f"{r.query_id} {r.placeholder} {r.doc_id} {_format_label(r.label)}\n" for r in records)


def run_to_mapping(records: Sequence[TrecRunRecord]) -> Dict[str, Dict[str, float]]:
    """{query_id: {doc_id: score}}; a repeated (query, doc) pair is an error."""
    mapping: Dict[str, Dict[str, float]] = {}
    for r in records:
        docs = mapping.setdefault(r.query_id, {})
        if r.doc_id in docs:
            raise DuplicateRunEntryError(f"duplicate run entry for query {r.query_id}, doc {r.doc_id}")
        docs[r.doc_id] = r.score
    return mapping


def qrels_to_mapping(records: Sequence[TrecQrelRecord]) -> Dict[str, Dict[str, float]]:
    mapping: Dict[str, Dict[str, float]] = {}
    for r in records:
        # the last judgment of a pair wins
        mapping.setdefault(r.query_id, {})[r.doc_id] = r.label
    return mapping


@dataclass
class JoinResult:
    dataset: Dataset
    dropped_qrel_docs: int = 0
    empty_queries: List[str] = field(default_factory=list)


def join_run_qrels(
    run: Sequence[TrecRunRecord], qrels: Sequence[TrecQrelRecord], name: str = ""
) -> JoinResult:
    """Build one list per run query: teacher scores from the run, labels from the qrels."""
    scores = run_to_mapping(run)
    labels = qrels_to_mapping(qrels)

    lists = []
    empty = []
    dropped = 0
    for query_id, docs in scores.items():
        judged = labels.get(query_id, {})
        doc_ids = list(docs)
        relevance = np.array([judged.get(d, 0.0) for d in doc_ids])
        dropped += sum(1 for d in judged if d not in docs)
        if not np.any(relevance > 0):
            empty.append(query_id)
        lists.append(RankList(query_id, tuple(doc_ids), relevance=relevance, teacher_scores=list(docs.values())))
    dropped += sum(len(docs) for query_id, docs in labels.items() if query_id not in scores)

    if dropped:
        logger.warning(f"{dropped} judged documents are absent from the run and were dropped")
    if empty:
        logger.warning(f"{len(empty)} queries have no positive labels")
    return JoinResult(Dataset(tuple(lists), name=name), dropped, empty)


def attach_teacher_scores(ds: Dataset, run: Sequence[TrecRunRecord]) -> Dataset:
    """Copy scores from a run onto the matching documents of a dataset."""
    scores = run_to_mapping(run)
    lists = []
    for rl in ds:
        docs = scores.get(rl.query_id)
        if docs is None:
            raise TrecFormatError(f"teacher run has no scores for query {rl.query_id}")
        missing = [d for d in rl.doc_ids if d not in docs]
        if missing:
            raise TrecFormatError(f"teacher run misses {len(missing)} documents of query {rl.query_id}")
        lists.append(RankList(
            rl.query_id, rl.doc_ids, rl.features, rl.relevance, [docs[d] for d in rl.doc_ids]
        ))
    return ds.with_lists(lists)


def dataset_to_run_records(ds: Dataset, scores: Dict[str, np.ndarray], tag: str) -> List[TrecRunRecord]:
    """Rank each list by descending score, ties by doc_id, and emit run records."""
    records = []
    for rl in ds:
        values = scores[rl.query_id]
        ranked = sorted(zip(rl.doc_ids, values), key=lambda p: (-float(p[1]), p[0]))
        for rank, (doc_id, value) in enumerate(ranked, start=1):
            records.append(TrecRunRecord(rl.query_id, doc_id, rank, float(value), tag))
    return records


def run_to_dataset(run: Sequence[TrecRunRecord], name: str = "") -> Dataset:
    """Teacher-only lists from a run, one per query in order of appearance."""
    lists = [
        RankList(query_id, tuple(docs), teacher_scores=list(docs.values()))
        for query_id, docs in run_to_mapping(run).items()
    ]
    return Dataset(tuple(lists), name=name)
