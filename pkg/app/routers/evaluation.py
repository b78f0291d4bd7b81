import logging
from fastapi import APIRouter, Depends, HTTPException, status
from app.dependencies.services import get_evaluation_service, get_score_statistics_service, get_sweep_use_case
from app.domain.use_cases.sweep_use_case import SweepUseCase
from app.infrastructure.formats.trec import parse_trec_run, run_to_dataset
from app.schemas.evaluation import (
    EvaluateRequest,
    EvaluateResponse,
    MetricResult,
    ResultRowResponse,
    StatsRequest,
    StatsResponse,
    SweepTableResponse,
)
from app.services.evaluation_service import EvaluationService
from app.services.score_statistics_service import ScoreStatisticsService

logger = logging.getLogger(__name__)

router = APIRouter(tags=["evaluation"])


@router.post("/evaluate", response_model=EvaluateResponse)
def evaluate_endpoint(
    request: EvaluateRequest,
    evaluation_service: EvaluationService = Depends(get_evaluation_service),
):
    """Evaluate a TREC run against TREC qrels."""
    reports = evaluation_service.evaluate_trec(request.run, request.qrels, request.metric_specs())
    unjudged = next(iter(reports.values())).unjudged_queries
    logger.info(f"Evaluated {len(reports)} metrics under policy {request.policy.value}")
    return EvaluateResponse(
        empty_query_policy=request.policy,
        results=[
            MetricResult(
                metric=name,
                aggregate=report.aggregate,
                retained_count=report.retained_count,
                dropped_count=report.dropped_count,
                per_query=report.per_query if request.include_per_query else None,
            )
            for name, report in reports.items()
        ],
        unjudged_queries=unjudged,
    )


@router.post("/stats", response_model=StatsResponse)
def stats_endpoint(
    request: StatsRequest,
    statistics_service: ScoreStatisticsService = Depends(get_score_statistics_service),
):
    """Distribution statistics of the scores in a TREC run."""
    dataset = run_to_dataset(parse_trec_run(request.run, "run"))
    stats = statistics_service.teacher_score_stats(dataset)
    return StatsResponse(**vars(stats))


@router.get("/sweeps/{sweep_id}", response_model=SweepTableResponse)
def sweep_table_endpoint(sweep_id: str, sweep_use_case: SweepUseCase = Depends(get_sweep_use_case)):
    """Result table of a stored sweep, selected from its records."""
    if not sweep_use_case.has_sweep(sweep_id):
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=f"Sweep {sweep_id} not found")
    table = sweep_use_case.select_from_repository(sweep_id)
    return SweepTableResponse(
        sweep_id=sweep_id,
        rows=[
            ResultRowResponse(method=r.method, config_id=r.config_id, transform_on=r.transform_on, metrics=r.metrics)
            for r in table.rows
        ],
    )
