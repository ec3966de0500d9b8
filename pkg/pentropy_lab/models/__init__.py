"""
Data models for the P-entropy laboratory.

This module contains the measure-preserving systems, partitions, entropy
profiles, weak-limit results, sampling and experiment configuration types.
"""

from .config import ExperimentConfig
from .entropy import EntropyMethod, EntropyProfile, EntropyRow, ProgressionSchedule, RowError
from .limits import (
    AdmissibleModel,
    FingerprintRow,
    FitResult,
    KappaRow,
    RigidityReport,
    ThetaRow,
)
from .partition import CylinderPartition, IntervalPartition, LabeledDecomposition
from .sampling import SampleConfig
from .systems import (
    Cylinder,
    IntervalExchange,
    MeasurableSet,
    RankOneRecipe,
    RankOneStage,
    SymbolicShift,
    Tower,
)

__all__ = [
    "IntervalExchange",
    "SymbolicShift",
    "Cylinder",
    "RankOneStage",
    "RankOneRecipe",
    "Tower",
    "MeasurableSet",
    "IntervalPartition",
    "CylinderPartition",
    "LabeledDecomposition",
    "EntropyMethod",
    "ProgressionSchedule",
    "EntropyRow",
    "RowError",
    "EntropyProfile",
    "AdmissibleModel",
    "FitResult",
    "KappaRow",
    "ThetaRow",
    "FingerprintRow",
    "RigidityReport",
    "SampleConfig",
    "ExperimentConfig",
]
