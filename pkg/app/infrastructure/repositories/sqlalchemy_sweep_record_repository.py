import json
from typing import List, Optional
from sqlalchemy.orm import Session
from app.domain.entities.sweep import SweepRecord
from app.domain.repositories.sweep_record_repository import SweepRecordRepositoryInterface
from app.models.sweep_record import SweepRecordModel


class SqlAlchemySweepRecordRepository(SweepRecordRepositoryInterface):
    """SQLAlchemy implementation of the sweep record repository."""

    def __init__(self, db_session: Session):
        self._db_session = db_session

    @staticmethod
    def _to_entity(row: SweepRecordModel) -> SweepRecord:
        return SweepRecord(
            id=row.id,
            sweep_id=row.sweep_id,
            config_id=row.config_id,
            ordinal=row.ordinal,
            method=row.method,
            status=row.status,
            config=json.loads(row.config),
            val_ndcg5=row.val_ndcg5,
            best_step=row.best_step,
            transform_on=row.transform_on,
            test_metrics=json.loads(row.test_metrics),
            test_per_query=json.loads(row.test_per_query),
            error=row.error,
            created_at=row.created_at,
        )

    def _find(self, sweep_id: str, config_id: str) -> Optional[SweepRecordModel]:
        return self._db_session.query(SweepRecordModel).filter(
            SweepRecordModel.sweep_id == sweep_id,
            SweepRecordModel.config_id == config_id,
        ).first()

    def save(self, record: SweepRecord) -> SweepRecord:
        """Save a sweep record, replacing one with the same sweep and config id."""
        row = self._find(record.sweep_id, record.config_id)
        if row is None:
            row = SweepRecordModel(sweep_id=record.sweep_id, config_id=record.config_id)
            self._db_session.add(row)
        row.ordinal = record.ordinal
        row.method = record.method
        row.status = record.status
        row.config = json.dumps(record.config, sort_keys=True)
        row.val_ndcg5 = record.val_ndcg5
        row.best_step = record.best_step
        row.transform_on = record.transform_on
        row.test_metrics = json.dumps(record.test_metrics, sort_keys=True)
        row.test_per_query = json.dumps(record.test_per_query, sort_keys=True)
        row.error = record.error

        self._db_session.commit()
        self._db_session.refresh(row)
        return self._to_entity(row)

    def list_by_sweep(self, sweep_id: str) -> List[SweepRecord]:
        """List the records of a sweep in grid order."""
        rows = self._db_session.query(SweepRecordModel).filter(
            SweepRecordModel.sweep_id == sweep_id
        ).order_by(SweepRecordModel.ordinal).all()
        return [self._to_entity(row) for row in rows]

    def get(self, sweep_id: str, config_id: str) -> Optional[SweepRecord]:
        """Get one record."""
        row = self._find(sweep_id, config_id)
        return self._to_entity(row) if row else None

    def delete_sweep(self, sweep_id: str) -> int:
        """Delete every record of a sweep."""
        count = self._db_session.query(SweepRecordModel).filter(
            SweepRecordModel.sweep_id == sweep_id
        ).delete()
        self._db_session.commit()
        return count
