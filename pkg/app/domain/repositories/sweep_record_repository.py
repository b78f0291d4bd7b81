from abc import ABC, abstractmethod
from typing import List, Optional
from app.domain.entities.sweep import SweepRecord


class SweepRecordRepositoryInterface(ABC):
    """Abstract interface for sweep record storage."""

    @abstractmethod
    def save(self, record: SweepRecord) -> SweepRecord:
        """Save a sweep record, replacing one with the same sweep and config id."""
        pass

    @abstractmethod
    def list_by_sweep(self, sweep_id: str) -> List[SweepRecord]:
        """List the records of a sweep in grid order."""
        pass

    @abstractmethod
    def get(self, sweep_id: str, config_id: str) -> Optional[SweepRecord]:
        """Get one record."""
        pass

    @abstractmethod
    def delete_sweep(self, sweep_id: str) -> int:
        """Delete every record of a sweep and return how many were removed."""
        pass
