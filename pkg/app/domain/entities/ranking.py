from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np


def _frozen_array(values, ndim: int) -> Optional[np.ndarray]:
    if values is None:
        return None
    array = np.array(values, dtype=np.float64, ndmin=ndim)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class RankList:
    """One query's candidate documents with their features and labels."""
    query_id: str
    doc_ids: Tuple[str, ...]
    features: Optional[np.ndarray] = None
    relevance: Optional[np.ndarray] = None
    teacher_scores: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "query_id", str(self.query_id))
        object.__setattr__(self, "doc_ids", tuple(str(d) for d in self.doc_ids))
        object.__setattr__(self, "features", _frozen_array(self.features, 2))
        object.__setattr__(self, "relevance", _frozen_array(self.relevance, 1))
        object.__setattr__(self, "teacher_scores", _frozen_array(self.teacher_scores, 1))

    @property
    def size(self) -> int:
        return len(self.doc_ids)

    @property
    def has_features(self) -> bool:
        return self.features is not None

    @property
    def has_relevance(self) -> bool:
        return self.relevance is not None

    @property
    def has_teacher_scores(self) -> bool:
        return self.teacher_scores is not None


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of rank lists."""
    lists: Tuple[RankList, ...]
    feature_dim: int = 0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "lists", tuple(self.lists))

    def __len__(self) -> int:
        return len(self.lists)

    def __iter__(self):
        return iter(self.lists)

    @property
    def query_ids(self) -> Tuple[str, ...]:
        return tuple(rl.query_id for rl in self.lists)

    @property
    def max_list_length(self) -> int:
        return max((rl.size for rl in self.lists), default=0)

    def by_query(self) -> dict:
        return {rl.query_id: rl for rl in self.lists}

    def has_relevance(self) -> bool:
        return any(rl.has_relevance for rl in self.lists)

    def has_teacher_scores(self) -> bool:
        return any(rl.has_teacher_scores for rl in self.lists)

    def with_lists(self, lists: Sequence[RankList], name: Optional[str] = None) -> "Dataset":
        return Dataset(lists=tuple(lists), feature_dim=self.feature_dim, name=self.name if name is None else name)
