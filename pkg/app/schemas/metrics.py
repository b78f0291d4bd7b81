import re
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class MetricKind(str, Enum):
    NDCG = "ndcg"
    MRR = "mrr"


class EmptyQueryPolicy(str, Enum):
    PERFECT = "perfect"
    ZERO = "zero"
    IGNORE = "ignore"


_METRIC_PATTERN = re.compile(r"^(ndcg|mrr)(?:@(\d+))?$", re.IGNORECASE)


class MetricSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: MetricKind
    cutoff: Optional[int] = Field(default=None, gt=0, description="None means unbounded")
    empty_query_policy: EmptyQueryPolicy = EmptyQueryPolicy.IGNORE
    binarize_threshold: Optional[float] = None

    @property
    def name(self) -> str:
        base = self.kind.value.upper()
        return base if self.cutoff is None else f"{base}@{self.cutoff}"

    @classmethod
    def parse(cls, text: str, **kwargs) -> "MetricSpec":
        """Build a spec from names such as 'ndcg@5', 'MRR@10' or 'ndcg'."""
        match = _METRIC_PATTERN.match(text.strip())
        if not match:
            raise ValueError(f"Unknown metric: {text!r}")
        cutoff = int(match.group(2)) if match.group(2) else None
        return cls(kind=MetricKind(match.group(1).lower()), cutoff=cutoff, **kwargs)


STANDARD_METRIC_NAMES = ("MRR@10", "MRR", "NDCG@1", "NDCG@5", "NDCG")


def standard_metric_specs(
    policy: EmptyQueryPolicy = EmptyQueryPolicy.IGNORE,
    binarize_threshold: Optional[float] = None,
) -> List[MetricSpec]:
    """The five reported columns: MRR@10, MRR, NDCG@1, NDCG@5, NDCG."""
    return [
        MetricSpec.parse(name, empty_query_policy=policy, binarize_threshold=binarize_threshold)
        for name in STANDARD_METRIC_NAMES
    ]
