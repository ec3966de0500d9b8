"""
Scalar arithmetic shared by the exact engines.

Two number modes exist. When every input length is rational the engines run
on ``fractions.Fraction`` and all comparisons are exact. Otherwise they run
on numpy ``longdouble`` (80-bit extended precision on x86-64 Linux) with a
global breakpoint-merge tolerance.
"""

import math
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

TOLERANCE = 1e-12
MEASURE_TOLERANCE = 1e-10

EXTENDED = np.longdouble

Scalar = Union[Fraction, np.longdouble]


def golden_mean() -> np.longdouble:
    """(sqrt(5) - 1) / 2 in extended precision."""
    return (np.sqrt(EXTENDED(5)) - EXTENDED(1)) / EXTENDED(2)


def parse_number(value) -> Scalar:
    """
    Parse a descriptor number.

    Integers, Fractions and "p/q" strings stay exact; "golden" gives the
    golden mean; everything else becomes an extended float.
    """
    if isinstance(value, bool):
        raise ValueError(f"Not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("golden", "phi-1", "golden_mean"):
            return golden_mean()
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return EXTENDED(text)
    return EXTENDED(value)


def all_exact(values: Iterable) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def coerce(values: Sequence) -> Tuple[Scalar, ...]:
    """Keep a sequence exact if every entry is rational, else extend all."""
    parsed = [parse_number(v) for v in values]
    if all_exact(parsed):
        return tuple(parsed)
    return tuple(to_extended(v) for v in parsed)


def to_extended(value) -> np.longdouble:
    if isinstance(value, Fraction):
        return EXTENDED(value.numerator) / EXTENDED(value.denominator)
    return EXTENDED(value)


def tolerance_for(exact: bool) -> float:
    return 0 if exact else TOLERANCE


def as_array(values: Iterable, exact: bool) -> np.ndarray:
    """numpy array in the number mode: object dtype for Fractions."""
    if exact:
        return np.array(list(values), dtype=object)
    return np.array([to_extended(v) for v in values], dtype=EXTENDED)


def frac_part(value: Scalar) -> Scalar:
    """value mod 1."""
    if isinstance(value, Fraction):
        return value - math.floor(value)
    return value - np.floor(value)


def is_close(a: Scalar, b: Scalar, tol: float = TOLERANCE) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(to_extended(a) - to_extended(b)) <= tol


def merge_sorted(points: np.ndarray, tol: float) -> Tuple[np.ndarray, int]:
    """
    Sort points and drop those within ``tol`` of their left neighbour.

    Returns the merged array and the number of points dropped because they
    coincided with a neighbour within the tolerance.
    """
    if len(points) == 0:
        return points, 0
    ordered = np.sort(points)
    gaps = ordered[1:] - ordered[:-1]
    keep = np.ones(len(ordered), dtype=bool)
    keep[1:] = np.asarray(gaps > tol, dtype=bool)
    return ordered[keep], int(len(ordered) - np.count_nonzero(keep))
