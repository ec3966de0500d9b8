"""
Partition models: interval partitions of [0, 1), cylinder partitions of a
shift, and the labeled decomposition representing a join.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Tuple

import numpy as np

from ..utils.arithmetic import (
    MEASURE_TOLERANCE,
    Scalar,
    all_exact,
    as_array,
    coerce,
    to_extended,
)


@dataclass(frozen=True)
class IntervalPartition:
    """Atoms [b_i, b_{i+1}) with b_0 = 0 and an implicit final endpoint 1."""

    breakpoints: Tuple[Scalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", coerce(self.breakpoints))
        self.validate()

    def validate(self) -> bool:
        if not self.breakpoints:
            raise ValueError("Partition needs at least the breakpoint 0")
        if self.breakpoints[0] != 0:
            raise ValueError("First breakpoint must be 0")
        for left, right in zip(self.breakpoints, self.breakpoints[1:]):
            if not left < right:
                raise ValueError("Breakpoints must be strictly increasing")
        if self.breakpoints[-1] >= 1:
            raise ValueError("Breakpoints must lie in [0, 1)")
        return True

    @classmethod
    def dyadic(cls, depth: int) -> "IntervalPartition":
        """The uniform partition into 2^depth atoms."""
        if depth < 0:
            raise ValueError("Dyadic depth must be nonnegative")
        n = 2**depth
        return cls(tuple(Fraction(i, n) for i in range(n)))

    @classmethod
    def trivial(cls) -> "IntervalPartition":
        return cls((Fraction(0),))

    @property
    def cell_count(self) -> int:
        return len(self.breakpoints)

    @cached_property
    def exact(self) -> bool:
        return all_exact(self.breakpoints)

    @cached_property
    def cell_measures(self) -> Tuple[Scalar, ...]:
        ends = self.breakpoints[1:] + (Fraction(1) if self.exact else to_extended(1),)
        return tuple(b - a for a, b in zip(self.breakpoints, ends))

    def breakpoint_array(self, exact: bool) -> np.ndarray:
        if exact and not self.exact:
            raise ValueError("Partition has inexact breakpoints")
        return as_array(self.breakpoints, exact)

    def cell_index_many(self, points: np.ndarray, exact: bool) -> np.ndarray:
        """Atom index of each point (half-open cells)."""
        bps = self.breakpoint_array(exact)
        return np.searchsorted(bps, points, side="right") - 1

    def describe(self) -> str:
        return f"partition({self.cell_count} cells)"


@dataclass(frozen=True)
class CylinderPartition:
    """Partition of a shift space by the symbols at coordinates 0..depth-1."""

    depth: int = 1

    def validate(self) -> bool:
        if self.depth < 1:
            raise ValueError("Cylinder partition depth must be at least 1")
        return True

    def describe(self) -> str:
        return f"cylinders(depth={self.depth})"


@dataclass
class LabeledDecomposition:
    """
    Exact representation of a join over a progression.

    ``elementary_breakpoints`` has one entry per elementary interval (its left
    endpoint); ``labels[k]`` is the tuple of atom indices visited by the
    midpoint of interval k at times 1..L; intervals sharing a tuple form one
    atom of the join, whose total measure is in ``group_measures``.
    """

    elementary_breakpoints: np.ndarray
    elementary_lengths: np.ndarray
    labels: np.ndarray
    group_index: np.ndarray
    group_measures: np.ndarray
    exact: bool = False

    def validate(self) -> bool:
        total = float(np.sum(self.group_measures.astype(float)))
        if abs(total - 1.0) > MEASURE_TOLERANCE:
            raise ValueError(f"Group measures sum to {total!r}, not 1")
        if len(self.elementary_breakpoints) != len(self.labels):
            raise ValueError("Every elementary interval needs a label tuple")
        return True

    @property
    def elementary_count(self) -> int:
        return len(self.elementary_breakpoints)

    @property
    def group_count(self) -> int:
        return len(self.group_measures)

    @property
    def factor_count(self) -> int:
        return self.labels.shape[1] if self.labels.ndim == 2 else 0
