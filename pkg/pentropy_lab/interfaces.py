"""
Protocol interfaces for the P-entropy laboratory.

The orchestrator depends on these boundaries only, so tests can inject
fakes for configuration loading and report emission.
"""

from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, Iterable, List, Optional, Protocol, Sequence, Tuple

if TYPE_CHECKING:
    from .components.mc_oracle import OracleRow
    from .components.rigidity_scanner import TowerRigidityRow
    from .models.config import ExperimentConfig
    from .models.entropy import EntropyProfile, ProgressionSchedule
    from .models.limits import (
        FingerprintRow,
        FitResult,
        KappaRow,
        RigidityReport,
        ThetaRow,
    )


class IConfigurationManager(Protocol):
    """Protocol for configuration loading and validation."""

    def load_config(
        self, flags: Optional[Dict[str, Any]] = None, command: Optional[str] = None
    ) -> "ExperimentConfig":
        """Load, merge and validate the experiment configuration."""
        ...

    def get_config(self) -> "ExperimentConfig":
        """Get the current configuration."""
        ...


class IReportWriter(Protocol):
    """Protocol for CSV/JSON report emission."""

    written: List[Path]

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        ...

    def write_json(self, name: str, obj: Any) -> Path:
        ...

    def write_profile(self, profile: "EntropyProfile") -> List[Path]:
        ...

    def write_schedule(
        self, schedule: "ProgressionSchedule", witness: Optional[Dict[str, Any]] = None
    ) -> Path:
        ...

    def write_correlations(self, table: Dict[int, List[float]]) -> Path:
        ...

    def write_kappa(self, rows: Sequence["KappaRow"]) -> Path:
        ...

    def write_theta(self, rows: Sequence["ThetaRow"]) -> Path:
        ...

    def write_fits(self, fits: Sequence["FitResult"]) -> Path:
        ...

    def write_separation(self, r: float, rows: Sequence[Tuple[int, bool]]) -> Path:
        ...

    def write_fingerprint(self, rows: Sequence["FingerprintRow"]) -> Path:
        ...

    def write_rigidity(self, reports: Sequence["RigidityReport"]) -> Path:
        ...

    def write_heights(self, heights: Sequence[int]) -> Path:
        ...

    def write_tower_rigidity(self, rows: Sequence["TowerRigidityRow"]) -> Path:
        ...

    def write_oracle(self, rows: Sequence["OracleRow"]) -> Path:
        ...
