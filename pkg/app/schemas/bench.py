from typing import List, Optional

from pydantic import Field, model_validator

from .base import Document


class TaskSpec(Document):
    """One benchmark task: a CSV file or a synthetic generator."""

    name: str
    path: Optional[str] = None
    generator: Optional[str] = None
    target: str = "target"
    positive_label: Optional[str] = None
    n_obs: int = Field(default=50, ge=1)
    n_rows: int = Field(default=500, ge=1)  # generator tasks only
    split_fraction: float = Field(default=0.7, gt=0.0, lt=1.0)
    seed: int = 0

    @model_validator(mode="after")
    def check_source(self):
        if (self.path is None) == (self.generator is None):
            raise ValueError("task needs exactly one of 'path' or 'generator'")
        return self


class BenchRowDocument(Document):
    """Interaction buckets and test AUC for one (task, model family)."""

    task: str
    family: str
    status: str  # ok, failed
    buckets: List[int] = Field(default_factory=lambda: [0, 0, 0, 0, 0])
    auc: Optional[float] = None
    error_message: Optional[str] = None


class BenchResultDocument(Document):
    seed: int
    observations_per_task: Optional[int] = None
    rows: List[BenchRowDocument]
