"""
Entropy models: progression schedules and P-entropy profiles.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple


class EntropyMethod(Enum):
    """How a profile row was obtained."""

    EXACT = "exact"
    ANALYTIC = "analytic"
    MONTECARLO = "montecarlo"


@dataclass(frozen=True)
class ProgressionSchedule:
    """
    The map j -> L(j) defining P_j = {j, 2j, ..., L(j) j}.

    Either rule-based (L(j) = slope * j + intercept) or tabulated.
    """

    slope: int = 1
    intercept: int = 0
    table: Mapping[int, int] = field(default_factory=dict)

    def validate(self) -> bool:
        if self.table:
            for j, length in self.table.items():
                if j < 1:
                    raise ValueError(f"Schedule index must be >= 1, got {j}")
                if length < 1:
                    raise ValueError(f"L({j}) must be >= 1, got {length}")
        else:
            if self.slope < 0:
                raise ValueError("Schedule slope must be nonnegative")
            if self.slope + self.intercept < 1:
                raise ValueError("Schedule must give L(1) >= 1")
        return True

    @classmethod
    def linear(cls, slope: int = 1, intercept: int = 0) -> "ProgressionSchedule":
        return cls(slope=slope, intercept=intercept)

    @classmethod
    def constant(cls, length: int) -> "ProgressionSchedule":
        return cls(slope=0, intercept=length)

    @classmethod
    def tabulated(cls, table: Mapping[int, int]) -> "ProgressionSchedule":
        schedule = cls(table=dict(sorted(table.items())))
        schedule.validate()
        return schedule

    @property
    def is_tabulated(self) -> bool:
        return bool(self.table)

    def length(self, j: int) -> int:
        if self.table:
            if j not in self.table:
                raise KeyError(f"Schedule has no entry for j={j}")
            return self.table[j]
        return max(1, self.slope * j + self.intercept)

    def progression(self, j: int) -> Tuple[int, ...]:
        return tuple(j * k for k in range(1, self.length(j) + 1))

    def looks_unbounded(self, j_values: Optional[Sequence[int]] = None) -> bool:
        """Nondecreasing and growing over the tabulated (or given) range."""
        js = sorted(j_values if j_values is not None else self.table.keys())
        if len(js) < 2:
            return not self.table and self.slope > 0
        lengths = [self.length(j) for j in js]
        nondecreasing = all(a <= b for a, b in zip(lengths, lengths[1:]))
        return nondecreasing and lengths[-1] > lengths[0]

    def as_dict(self) -> Dict[str, List[int]]:
        js = sorted(self.table)
        return {"j": js, "L": [self.table[j] for j in js]}


@dataclass(frozen=True)
class EntropyRow:
    """One row of a P-entropy profile, entropies in nats."""

    j: int
    L: int
    H_join: float
    h_j: float
    method: EntropyMethod
    stderr: Optional[float] = None

    def validate(self, partition_entropy: Optional[float] = None) -> bool:
        if self.L < 1:
            raise ValueError("L must be at least 1")
        if self.h_j < -1e-12:
            raise ValueError("h_j cannot be negative")
        if not math.isclose(self.h_j, self.H_join / self.L, rel_tol=1e-12, abs_tol=1e-15):
            raise ValueError("h_j must equal H_join / L")
        if partition_entropy is not None and self.h_j > partition_entropy + 1e-9:
            if self.method is not EntropyMethod.MONTECARLO:
                raise ValueError("h_j exceeds the entropy of the partition")
        return True


@dataclass(frozen=True)
class RowError:
    """A profile row that failed; siblings are unaffected."""

    j: int
    code: str
    message: str


@dataclass
class EntropyProfile:
    """Trajectory of h_j over a set of j; never a limsup claim."""

    system: str
    partition: str
    partition_entropy: float
    rows: List[EntropyRow] = field(default_factory=list)
    errors: List[RowError] = field(default_factory=list)

    def validate(self) -> bool:
        for row in self.rows:
            row.validate(self.partition_entropy)
        return True

    def values(self) -> Dict[int, float]:
        return {row.j: row.h_j for row in self.rows}
