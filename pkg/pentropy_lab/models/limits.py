"""
Weak-limit diagnostic models: admissible models, fits, scans, rigidity
reports and triple-correlation fingerprints.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class AdmissibleModel:
    """a * Theta + sum_i a_i T^i with nonnegative weights summing to 1."""

    a: float
    coefficients: Dict[int, float] = field(default_factory=dict)

    def validate(self) -> bool:
        if self.a < -SUM_TOLERANCE:
            raise ValueError("Coefficient of Theta must be nonnegative")
        for i, value in self.coefficients.items():
            if value < -SUM_TOLERANCE:
                raise ValueError(f"Coefficient a_{i} must be nonnegative")
        total = self.a + sum(self.coefficients.values())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"Admissible coefficients sum to {total!r}, not 1")
        return True

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.coefficients))

    def vector(self) -> Tuple[float, ...]:
        """(a, a_i for i in sorted support)."""
        return (self.a,) + tuple(self.coefficients[i] for i in self.support)

    def predict(self, product: float, correlations: Dict[int, float]) -> float:
        """Model value a mu(A)mu(B) + sum_i a_i mu(T^i A & B)."""
        return self.a * product + sum(
            weight * correlations[i] for i, weight in self.coefficients.items()
        )


@dataclass(frozen=True)
class FitResult:
    """Best admissible model at time m and its max-deviation residual."""

    model: AdmissibleModel
    residual: float
    m: int
    degenerate: bool = False

    def validate(self) -> bool:
        if self.residual < 0:
            raise ValueError("Residual cannot be negative")
        return self.model.validate()

    @property
    def kappa(self) -> float:
        return self.model.a

    @property
    def unexplained_mass(self) -> float:
        """1 - c for a rigidity fit with support {0}."""
        return 1.0 - self.model.coefficients.get(0, 0.0)


@dataclass(frozen=True)
class KappaRow:
    m: int
    kappa: float
    residual: float


@dataclass(frozen=True)
class ThetaRow:
    m: int
    theta_distance: float


@dataclass(frozen=True)
class FingerprintRow:
    """Forward and backward triple correlations against the two targets."""

    m: int
    n: int
    measure: float
    forward: float
    backward: float
    target_forward: float
    target_backward: float
    discriminating: bool

    @property
    def gap_forward(self) -> float:
        return self.forward - self.target_forward

    @property
    def gap_backward(self) -> float:
        return self.backward - self.target_backward


@dataclass
class RigidityReport:
    """
    Minimal time N(S, j) in (j, m_cap] with mu(T^m B_i & B_i) > c mu(B_i)
    for every i <= j, or None when the cap was exhausted.
    """

    j: int
    N: Optional[int]
    witness_m: Optional[int]
    c: float
    test_sets: List[str]
    m_cap: int
    correlations: List[float] = field(default_factory=list)
    diagnostic: Optional[str] = None
    return_time: Optional[bool] = None

    def validate(self) -> bool:
        if not 0 < self.c < 1:
            raise ValueError("Rigidity constant must lie in (0, 1)")
        if self.N is not None:
            if self.witness_m is None or not self.j < self.witness_m <= self.N:
                raise ValueError("Witness must satisfy j < witness_m <= N")
        return True

    @property
    def exhausted(self) -> bool:
        return self.N is None

    def as_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "j": self.j,
            "N": self.N,
            "witness_m": self.witness_m,
            "c": self.c,
        }
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        if self.return_time is not None:
            out["return_time"] = self.return_time
        return out
