from pydantic import BaseModel, Field, field_validator
from datetime import datetime, timezone
from typing import Dict, List, Optional
from app.schemas.metrics import STANDARD_METRIC_NAMES, EmptyQueryPolicy, MetricSpec


class EvaluateRequest(BaseModel):
    run: str = Field(..., min_length=1, description="TREC run file contents")
    qrels: str = Field(..., min_length=1, description="TREC qrel file contents")
    metrics: List[str] = Field(default_factory=lambda: list(STANDARD_METRIC_NAMES), min_length=1)
    policy: EmptyQueryPolicy = Field(default=EmptyQueryPolicy.IGNORE, description="Empty-query policy")
    binarize_threshold: Optional[float] = Field(None, description="Label threshold used by MRR")
    include_per_query: bool = Field(default=False, description="Return per-query values")

    @field_validator("metrics")
    @classmethod
    def validate_metrics(cls, v):
        for name in v:
            MetricSpec.parse(name)
        return v

    def metric_specs(self) -> List[MetricSpec]:
        return [
            MetricSpec.parse(name, empty_query_policy=self.policy, binarize_threshold=self.binarize_threshold)
            for name in self.metrics
        ]


class MetricResult(BaseModel):
    metric: str = Field(..., description="Metric name, e.g. NDCG@5")
    aggregate: float = Field(..., description="Mean over retained queries, times 100")
    retained_count: int = Field(..., ge=0)
    dropped_count: int = Field(..., ge=0)
    per_query: Optional[Dict[str, float]] = Field(None, description="Per-query values in [0, 1]")


class EvaluateResponse(BaseModel):
    success: bool = Field(default=True)
    empty_query_policy: EmptyQueryPolicy
    results: List[MetricResult]
    unjudged_queries: List[str] = Field(default_factory=list)


class StatsRequest(BaseModel):
    run: str = Field(..., min_length=1, description="TREC run file contents with teacher scores")


class StatsResponse(BaseModel):
    mean: float
    std: float = Field(..., ge=0.0)
    min: float
    p25: float
    p50: float
    p75: float
    max: float
    count: int = Field(..., ge=0)


class ResultRowResponse(BaseModel):
    method: str
    config_id: str
    transform_on: Optional[bool] = None
    metrics: Dict[str, Optional[float]]


class SweepTableResponse(BaseModel):
    sweep_id: str
    rows: List[ResultRowResponse]


class HealthCheckResponse(BaseModel):
    status: str = Field(..., description="Health status")
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc), description="Check timestamp")
    version: str = Field(..., description="Toolkit version")
    database_connected: bool = Field(..., description="Record store connection status")


class ErrorResponse(BaseModel):
    success: bool = Field(default=False, description="Always false for errors")
    error: str = Field(..., description="Error message")
    detail: Optional[str] = Field(None, description="Detailed error information")
    status_code: int = Field(..., description="HTTP status code")
