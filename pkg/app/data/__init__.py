"""Data ingestion, splitting, sampling and synthetic generators."""

from .loader import load_csv, load_manifest, load_task
from .sampling import ObservationSample, sample_observations, split, train_size
from .synth import GENERATORS, synth

__all__ = [
    "load_csv",
    "load_manifest",
    "load_task",
    "ObservationSample",
    "sample_observations",
    "split",
    "train_size",
    "GENERATORS",
    "synth",
]
