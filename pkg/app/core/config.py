import os
from pathlib import Path
from typing import Optional


class Settings:
    """Application settings."""

    def __init__(self):
        self.out_dir: str = os.getenv("RDKIT_OUT_DIR", "outputs")
        self.log_level: str = os.getenv("RDKIT_LOG_LEVEL", "INFO").upper()
        self.jobs: int = int(os.getenv("RDKIT_JOBS", str(os.cpu_count() or 1)))
        self.database_url: str = os.getenv("RDKIT_DATABASE_URL", f"sqlite:///{Path(self.out_dir) / 'sweeps.db'}")
        self.seed: int = int(os.getenv("RDKIT_SEED", "0"))
        self.published_results_dir: Optional[str] = os.getenv("RDKIT_PUBLISHED_DIR")


# Load environment variables from .env file if it exists
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

settings = Settings()
