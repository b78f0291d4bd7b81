from dataclasses import replace
from datetime import datetime, timezone
from typing import Dict, List, Optional, Tuple
from app.domain.entities.sweep import SweepRecord
from app.domain.repositories.sweep_record_repository import SweepRecordRepositoryInterface


class InMemorySweepRecordRepository(SweepRecordRepositoryInterface):
    """Dictionary-backed sweep record store."""

    def __init__(self):
        self._records: Dict[Tuple[str, str], SweepRecord] = {}
        self._next_id = 1

    def save(self, record: SweepRecord) -> SweepRecord:
        key = (record.sweep_id, record.config_id)
        existing = self._records.get(key)
        record_id = existing.id if existing else self._next_id
        if not existing:
            self._next_id += 1
        stored = replace(record, id=record_id, created_at=record.created_at or datetime.now(timezone.utc))
        self._records[key] = stored
        return stored

    def list_by_sweep(self, sweep_id: str) -> List[SweepRecord]:
        records = [r for (s, _), r in self._records.items() if s == sweep_id]
        return sorted(records, key=lambda r: r.ordinal)

    def get(self, sweep_id: str, config_id: str) -> Optional[SweepRecord]:
        return self._records.get((sweep_id, config_id))

    def delete_sweep(self, sweep_id: str) -> int:
        keys = [k for k in self._records if k[0] == sweep_id]
        for key in keys:
            del self._records[key]
        return len(keys)
