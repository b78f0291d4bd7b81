import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.core.exceptions import LibsvmFormatError
from app.domain.entities.ranking import Dataset, RankList
from app.infrastructure.formats.trec import TextSource, iter_lines


def _parse_line(line: str, line_number: int, source_name: str) -> Optional[Tuple[str, float, Dict[int, float]]]:
    data, _, _comment = line.partition("#")
    tokens = data.split()
    if not tokens:
        return None
    if len(tokens) < 2 or not tokens[1].startswith("qid:") or len(tokens[1]) == 4:
        raise LibsvmFormatError("expected '<label> qid:<q> ...'", line_number, source_name)
    try:
        label = float(tokens[0])
    except ValueError:
        raise LibsvmFormatError(f"unparseable label {tokens[0]!r}", line_number, source_name)
    if not math.isfinite(label):
        raise LibsvmFormatError(f"label must be finite, got {tokens[0]!r}", line_number, source_name)

    features: Dict[int, float] = {}
    previous = 0
    for token in tokens[2:]:
        fid_text, sep, value_text = token.partition(":")
        try:
            fid = int(fid_text)
            value = float(value_text)
        except ValueError:
            raise LibsvmFormatError(f"malformed feature token {token!r}", line_number, source_name)
        if not sep or fid < 1:
            raise LibsvmFormatError(f"malformed feature token {token!r}", line_number, source_name)
        if fid <= previous:
            raise LibsvmFormatError(f"feature ids must increase, {fid} follows {previous}", line_number, source_name)
        features[fid] = value
        previous = fid
    return tokens[1][4:], label, features


def parse_libsvm_ranking(
    source: TextSource, source_name: str = "", feature_dim: Optional[int] = None, name: str = ""
) -> Dataset:
    """Parse `<label> qid:<q> <fid>:<val> ...` lines into one list per query.

    Lines of a query are grouped in order of first appearance; doc ids are
    positions within the query. Features densify to the largest feature id,
    or to `feature_dim` when given.
    """
    rows: Dict[str, List[Tuple[float, Dict[int, float]]]] = {}
    max_fid = 0
    for line_number, line in enumerate(iter_lines(source), start=1):
        parsed = _parse_line(line, line_number, source_name)
        if parsed is None:
            continue
        query_id, label, features = parsed
        if features:
            max_fid = max(max_fid, max(features))
        rows.setdefault(query_id, []).append((label, features))

    if feature_dim is None:
        feature_dim = max_fid
    elif max_fid > feature_dim:
        raise LibsvmFormatError(f"feature id {max_fid} exceeds feature_dim {feature_dim}", source=source_name)

    lists = []
    for query_id, docs in rows.items():
        matrix = np.zeros((len(docs), feature_dim))
        for i, (_, features) in enumerate(docs):
            for fid, value in features.items():
                matrix[i, fid - 1] = value
        lists.append(RankList(
            query_id=query_id,
            doc_ids=tuple(str(i) for i in range(len(docs))),
            features=matrix,
            relevance=[label for label, _ in docs],
        ))
    return Dataset(tuple(lists), feature_dim=feature_dim, name=name)


def _format_value(value: float) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def write_libsvm_ranking(ds: Dataset) -> str:
    """Dense rendering of a dataset; every feature column is written."""
    lines = []
    for rl in ds:
        labels = rl.relevance if rl.relevance is not None else np.zeros(rl.size)
        features = rl.features if rl.features is not None else np.zeros((rl.size, 0))
        for label, row in zip(labels, features):
            cells = " ".join(f"{j}:{float(v)!r}" for j, v in enumerate(row, start=1))
            lines.append(f"{_format_value(label)} qid:{rl.query_id} {cells}".rstrip() + "\n")
    return "".join(lines)
