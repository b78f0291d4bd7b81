from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional

STATUS_OK = "ok"
STATUS_FAILED = "failed"
STATUS_REFERENCE = "reference"

TEACHER_METHOD = "Teacher"


@dataclass
class SweepRecord:
    """Outcome of one grid point (or the teacher reference) of a sweep."""
    sweep_id: str
    config_id: str
    ordinal: int
    method: str
    status: str
    config: Dict[str, Any] = field(default_factory=dict)
    val_ndcg5: Optional[float] = None
    best_step: int = 0
    transform_on: Optional[bool] = None
    test_metrics: Dict[str, float] = field(default_factory=dict)
    test_per_query: Dict[str, Dict[str, float]] = field(default_factory=dict)
    error: Optional[str] = None
    id: Optional[int] = None
    created_at: Optional[datetime] = None

    @property
    def succeeded(self) -> bool:
        return self.status == STATUS_OK


@dataclass
class ResultRow:
    method: str
    config_id: str = ""
    metrics: Dict[str, Optional[float]] = field(default_factory=dict)
    per_query: Dict[str, Dict[str, float]] = field(default_factory=dict)
    transform_on: Optional[bool] = None
    seed: Optional[int] = None


@dataclass
class ResultTable:
    """One row per method; metric columns as in the reported tables."""
    name: str
    metric_names: List[str]
    rows: List[ResultRow] = field(default_factory=list)

    @property
    def methods(self) -> List[str]:
        return [r.method for r in self.rows]

    def row(self, method: str) -> ResultRow:
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)

    def __contains__(self, method: str) -> bool:
        return method in self.methods
