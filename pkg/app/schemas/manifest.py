from pydantic import BaseModel, ConfigDict, Field
from typing import Any, Dict, List
from app import __version__


class RunManifest(BaseModel):
    """Everything needed to re-run a CLI invocation."""
    model_config = ConfigDict(frozen=True)

    command: str = Field(..., min_length=1)
    argv: List[str] = Field(..., description="Arguments after the program name")
    config: Dict[str, Any] = Field(default_factory=dict, description="Resolved option values")
    seeds: Dict[str, int] = Field(default_factory=dict, description="Root seed and derived sub-seeds")
    inputs: Dict[str, str] = Field(default_factory=dict, description="Input path -> sha256")
    artifacts: List[str] = Field(default_factory=list, description="Written output paths")
    version: str = Field(default=__version__)
