"""
Analytic computations on Bernoulli shifts by coordinate counting.
"""

import math
from typing import Dict, Iterable, Optional, Sequence, Union

import numpy as np

from ..models.systems import Cylinder, SymbolicShift
from ..utils.error_handling import ValidationError

CylinderLike = Union[Cylinder, Sequence[int]]


def as_cylinder(value: CylinderLike) -> Cylinder:
    if isinstance(value, Cylinder):
        return value
    return Cylinder(tuple(value))


def _check_symbols(shift: SymbolicShift, cylinder: Cylinder) -> None:
    bad = [s for s in cylinder.word if not 0 <= s < shift.alphabet_size]
    if bad:
        raise ValidationError(
            [f"Symbol {s} is outside the alphabet 0..{shift.alphabet_size - 1}" for s in bad]
        )


def constraints(cylinders: Iterable[Cylinder]) -> Optional[Dict[int, int]]:
    """Merged coordinate constraints, or None when two cylinders disagree."""
    merged: Dict[int, int] = {}
    for cylinder in cylinders:
        for coordinate, symbol in cylinder.coordinates():
            if merged.setdefault(coordinate, symbol) != symbol:
                return None
    return merged


def joint_measure(shift: SymbolicShift, cylinders: Iterable[CylinderLike]) -> float:
    """Product measure of an intersection of cylinders."""
    cylinders = [as_cylinder(c) for c in cylinders]
    for cylinder in cylinders:
        _check_symbols(shift, cylinder)
    merged = constraints(cylinders)
    if merged is None:
        return 0.0
    return float(math.prod(shift.probabilities[s] for s in merged.values()))


def cylinder_measure(shift: SymbolicShift, cylinder: CylinderLike) -> float:
    return joint_measure(shift, [cylinder])


def shift_correlation(
    shift: SymbolicShift, cylinder_a: CylinderLike, cylinder_b: CylinderLike, m: int
) -> float:
    """mu(T^m A & B) for the left shift T."""
    a = as_cylinder(cylinder_a)
    return joint_measure(shift, [a.shifted(m), as_cylinder(cylinder_b)])


def shift_triple_correlation(
    shift: SymbolicShift, cylinder: CylinderLike, m: int, n: int
) -> float:
    """mu(A & T^m A & T^n A)."""
    a = as_cylinder(cylinder)
    return joint_measure(shift, [a, a.shifted(m), a.shifted(n)])


def symbol_entropy(shift: SymbolicShift) -> float:
    """H(p) in nats."""
    return -sum(float(p) * math.log(float(p)) for p in shift.probabilities)


def progression_coordinates(j: int, L: int, depth: int = 1) -> np.ndarray:
    """Coordinates read by the join over T^{-j}, ..., T^{-Lj} of the depth-k partition."""
    coordinates = {m * j + t for m in range(1, L + 1) for t in range(depth)}
    return np.array(sorted(coordinates), dtype=np.int64)


def join_entropy(shift: SymbolicShift, j: int, L: int, depth: int = 1) -> float:
    """Exact join entropy: distinct coordinates are independent."""
    return len(progression_coordinates(j, L, depth)) * symbol_entropy(shift)


def sample_symbols(
    shift: SymbolicShift, count: int, width: int, rng: np.random.Generator
) -> np.ndarray:
    """``count`` independent rows of ``width`` symbols."""
    probabilities = np.array([float(p) for p in shift.probabilities])
    probabilities = probabilities / probabilities.sum()
    return rng.choice(shift.alphabet_size, size=(count, width), p=probabilities).astype(
        np.int64
    )


def matches(
    symbols: np.ndarray, column_of: Dict[int, int], cylinder: Cylinder
) -> np.ndarray:
    """Rows of sampled symbols lying in the cylinder."""
    hit = np.ones(symbols.shape[0], dtype=bool)
    for coordinate, symbol in cylinder.coordinates():
        hit &= symbols[:, column_of[coordinate]] == symbol
    return hit
