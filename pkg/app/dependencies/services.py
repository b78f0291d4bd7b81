from fastapi import Depends
from sqlalchemy.orm import Session
from app.core.config import settings
from app.domain.use_cases.sweep_use_case import SweepUseCase
from app.infrastructure.repositories.sqlalchemy_sweep_record_repository import SqlAlchemySweepRecordRepository
from app.models.database import get_db
from app.services.evaluation_service import EvaluationService
from app.services.score_statistics_service import ScoreStatisticsService

# Singleton instances
_evaluation_service = EvaluationService()
_score_statistics_service = ScoreStatisticsService()


def get_evaluation_service() -> EvaluationService:
    return _evaluation_service


def get_score_statistics_service() -> ScoreStatisticsService:
    return _score_statistics_service


def get_sweep_use_case(db: Session = Depends(get_db)) -> SweepUseCase:
    """Sweep use case backed by the configured record store."""
    return SweepUseCase(SqlAlchemySweepRecordRepository(db), jobs=settings.jobs)
