import os
import sys
import warnings
from pathlib import Path

# Suppress specific deprecation warnings
warnings.filterwarnings("ignore", message=".*Support for class-based.*", category=DeprecationWarning)

# Add the project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# keep the test session away from the file-backed default database
os.environ.setdefault("RDKIT_DATABASE_URL", "sqlite:///:memory:")

import numpy as np
import pytest
from fastapi.testclient import TestClient
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from app.domain.entities.ranking import Dataset, RankList
from app.infrastructure.repositories.in_memory_sweep_record_repository import InMemorySweepRecordRepository
from app.main import app
from app.models.database import Base, get_db, init_db
from app.services.synthetic_data_service import SyntheticDataService

FIXTURES = Path(__file__).parent / "fixtures"

# Create in-memory SQLite database for testing
SQLALCHEMY_DATABASE_URL = "sqlite:///:memory:"

engine = create_engine(
    SQLALCHEMY_DATABASE_URL,
    connect_args={"check_same_thread": False},
    poolclass=StaticPool,
)

TestingSessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


def override_get_db():
    """Override database dependency for testing."""
    try:
        db = TestingSessionLocal()
        yield db
    finally:
        db.close()


@pytest.fixture(scope="session")
def test_db():
    """Create test database."""
    init_db(bind=engine)
    yield
    Base.metadata.drop_all(bind=engine)


@pytest.fixture
def db_session(test_db):
    """Session on the test database, emptied afterwards."""
    db = TestingSessionLocal()
    yield db
    db.close()
    with engine.begin() as connection:
        for table in reversed(Base.metadata.sorted_tables):
            connection.execute(table.delete())


@pytest.fixture
def client(test_db):
    """Create test client with database override."""
    app.dependency_overrides[get_db] = override_get_db
    with TestClient(app) as test_client:
        yield test_client
    app.dependency_overrides.clear()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def in_memory_repository():
    return InMemorySweepRecordRepository()


def make_synthetic(
    n_queries, seed, list_len=(8, 12), feature_dim=4, teacher_quality=0.9, label_sparsity=0.2, name="synthetic",
    label_noise=0.0,
):
    return SyntheticDataService().generate_synthetic(
        n_queries=n_queries,
        list_len_range=list_len,
        feature_dim=feature_dim,
        teacher_quality=teacher_quality,
        label_sparsity=label_sparsity,
        label_noise=label_noise,
        seed=seed,
        name=name,
    )


@pytest.fixture(scope="session")
def synthetic_splits():
    """Small train/val/test splits from independent seeds."""
    return {
        "train": make_synthetic(40, seed=11, name="train"),
        "val": make_synthetic(15, seed=12, name="val"),
        "test": make_synthetic(15, seed=13, name="test"),
    }


@pytest.fixture
def tiny_dataset():
    """Two hand-written lists with features, relevance and teacher scores."""
    return Dataset(
        lists=(
            RankList(
                query_id="q1",
                doc_ids=("a", "b", "c"),
                features=[[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]],
                relevance=[2.0, 0.0, 1.0],
                teacher_scores=[3.0, -1.0, 1.0],
            ),
            RankList(
                query_id="q2",
                doc_ids=("d", "e"),
                features=[[0.2, 0.8], [0.9, 0.1]],
                relevance=[0.0, 1.0],
                teacher_scores=[0.5, 2.5],
            ),
        ),
        feature_dim=2,
        name="tiny",
    )
