from dataclasses import dataclass, field
from typing import Dict, List


@dataclass
class EvalReport:
    """Per-query metric values plus their ×100 aggregate."""
    metric: str
    per_query: Dict[str, float]
    aggregate: float
    retained_count: int
    dropped_count: int
    empty_query_policy: str
    unjudged_queries: List[str] = field(default_factory=list)

    @property
    def total_count(self) -> int:
        return self.retained_count + self.dropped_count


@dataclass(frozen=True)
class ScoreStats:
    """Pooled distribution summary of teacher scores."""
    mean: float
    std: float
    min: float
    p25: float
    p50: float
    p75: float
    max: float
    count: int = 0

    def as_row(self) -> List[float]:
        return [self.mean, self.std, self.min, self.p25, self.p50, self.p75, self.max]
