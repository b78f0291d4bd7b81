from dataclasses import dataclass


@dataclass(frozen=True)
class TrecRunRecord:
    """One line of a TREC run file."""
    query_id: str
    doc_id: str
    rank: int
    score: float
    tag: str
    placeholder: str = "Q0"


@dataclass(frozen=True)
class TrecQrelRecord:
    """One line of a TREC qrel file."""
    query_id: str
    doc_id: str
    label: float
    placeholder: str = "0"
