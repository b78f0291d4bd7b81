from sqlalchemy import Boolean, Column, DateTime, Float, Integer, String, Text, UniqueConstraint
from sqlalchemy.sql import func
from app.models.database import Base


class SweepRecordModel(Base):
    """One trained grid point of a sweep."""
    __tablename__ = "sweep_records"
    __table_args__ = (UniqueConstraint("sweep_id", "config_id", name="uq_sweep_config"),)

    id = Column(Integer, primary_key=True, index=True)
    sweep_id = Column(String(64), nullable=False, index=True)
    config_id = Column(String(64), nullable=False)
    ordinal = Column(Integer, nullable=False)
    method = Column(String(64), nullable=False)
    status = Column(String(16), nullable=False)
    config = Column(Text, nullable=False)
    val_ndcg5 = Column(Float, nullable=True)
    best_step = Column(Integer, nullable=False, default=0)
    transform_on = Column(Boolean, nullable=True)
    test_metrics = Column(Text, nullable=False)
    test_per_query = Column(Text, nullable=False)
    error = Column(Text, nullable=True)
    created_at = Column(DateTime(timezone=True), server_default=func.now())
