"""
Monte Carlo oracles cross-checking the exact engines.

Every estimate draws from the Philox stream of its SampleConfig, so a fixed
seed and task index reproduce the same numbers bit for bit.
"""

import math
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np

from ..models.partition import CylinderPartition, IntervalPartition
from ..models.sampling import SampleConfig
from ..models.systems import Cylinder, IntervalExchange, MeasurableSet, SymbolicShift, Tower
from ..utils.arithmetic import EXTENDED
from ..utils.error_handling import ValidationError
from ..utils.logging import get_logger
from . import bernoulli, rank_one
from .entropy_calculator import join_entropy, mc_entropy_estimate
from .iet_engine import apply_many, power
from .refiner import contains_many

logger = get_logger("mcoracle")

DEFAULT_K = 3.0
STDERR_FLOOR = 1e-9


@dataclass(frozen=True)
class JoinHistogram:
    """Distinct label tuples (rows) and how often each was sampled."""

    tuples: np.ndarray
    counts: np.ndarray
    N: int

    def as_dict(self) -> Dict[Tuple[int, ...], int]:
        return {tuple(int(v) for v in row): int(c) for row, c in zip(self.tuples, self.counts)}

    def frequencies(self) -> Dict[Tuple[int, ...], float]:
        return {key: count / self.N for key, count in self.as_dict().items()}


@dataclass(frozen=True)
class OracleRow:
    """Exact join entropy against its Monte Carlo estimate."""

    j: int
    L: int
    exact: float
    estimate: float
    stderr: float
    passed: bool


def _uniform_points(config: SampleConfig) -> np.ndarray:
    config.validate()
    return config.generator().random(config.N).astype(EXTENDED)


def _histogram(labels: np.ndarray, N: int) -> JoinHistogram:
    tuples, counts = np.unique(labels, axis=0, return_counts=True)
    return JoinHistogram(tuples=tuples, counts=counts, N=N)


def mc_join_histogram(
    system: Union[IntervalExchange, SymbolicShift],
    xi: Union[IntervalPartition, CylinderPartition],
    j: int,
    L: int,
    config: SampleConfig,
) -> JoinHistogram:
    """
    Histogram of label tuples of N sampled points: xi-cells of R^m x for
    m = 1..L with R = T^j, or of sampled words for a Bernoulli shift.
    """
    if j < 1 or L < 1:
        raise ValidationError([f"j and L must be at least 1 (j={j}, L={L})"])
    if isinstance(system, SymbolicShift):
        if not isinstance(xi, CylinderPartition):
            raise ValidationError(["Bernoulli shifts use cylinder partitions"])
        return _shift_histogram(system, xi.depth, j, L, config)

    R = power(system, j)
    x = _uniform_points(config)
    labels = np.empty((config.N, L), dtype=np.int32)
    for m in range(L):
        x = apply_many(R, x)
        labels[:, m] = xi.cell_index_many(x, exact=False)
    return _histogram(labels, config.N)


def _shift_histogram(
    shift: SymbolicShift, depth: int, j: int, L: int, config: SampleConfig
) -> JoinHistogram:
    config.validate()
    coordinates = bernoulli.progression_coordinates(j, L, depth)
    column_of = {int(c): k for k, c in enumerate(coordinates)}
    symbols = bernoulli.sample_symbols(shift, config.N, len(coordinates), config.generator())
    labels = np.zeros((config.N, L), dtype=np.int64)
    for m in range(1, L + 1):
        for t in range(depth):
            labels[:, m - 1] = labels[:, m - 1] * shift.alphabet_size + symbols[
                :, column_of[m * j + t]
            ]
    return _histogram(labels, config.N)


def mc_correlation(
    system: Union[IntervalExchange, SymbolicShift, Tower],
    A: Union[MeasurableSet, Cylinder],
    B: Union[MeasurableSet, Cylinder],
    m: int,
    config: SampleConfig,
) -> Tuple[float, float]:
    """Binomial estimate of mu(T^m A & B) = mu(A & T^{-m} B) and its stderr."""
    if isinstance(system, SymbolicShift):
        hits = _shift_hits(system, A, B, m, config)
    else:
        x = _uniform_points(config)
        in_a = contains_many(A, x)
        if isinstance(system, Tower):
            y, defined = rank_one.apply_many(system, x, m)
            in_a &= defined
        else:
            y = apply_many(power(system, m), x) if m else x
        hits = in_a & contains_many(B, y)
    p = float(np.count_nonzero(hits)) / config.N
    return p, math.sqrt(p * (1 - p) / config.N)


def _shift_hits(
    shift: SymbolicShift, A: Cylinder, B: Cylinder, m: int, config: SampleConfig
) -> np.ndarray:
    config.validate()
    moved = A.shifted(m)
    coordinates = sorted({c for c, _ in moved.coordinates()} | {c for c, _ in B.coordinates()})
    column_of = {c: k for k, c in enumerate(coordinates)}
    symbols = bernoulli.sample_symbols(shift, config.N, len(coordinates), config.generator())
    return bernoulli.matches(symbols, column_of, moved) & bernoulli.matches(
        symbols, column_of, B
    )


def agreement_test(
    exact: float,
    estimate: float,
    stderr: float,
    k: float = DEFAULT_K,
    floor: float = STDERR_FLOOR,
) -> bool:
    """|exact - estimate| <= k * stderr + floor."""
    if stderr < 0:
        raise ValidationError(["Standard error cannot be negative"])
    return abs(exact - estimate) <= k * stderr + floor


def mc_entropy_check(
    system: Union[IntervalExchange, SymbolicShift],
    xi: Union[IntervalPartition, CylinderPartition],
    j: int,
    L: int,
    config: SampleConfig,
    k: float = DEFAULT_K,
) -> OracleRow:
    """Exact (or analytic) join entropy against the Miller-Madow estimate."""
    exact, _ = join_entropy(system, xi, j, L)
    histogram = mc_join_histogram(system, xi, j, L, config)
    estimate, stderr = mc_entropy_estimate(histogram.counts, histogram.N)
    passed = agreement_test(exact, estimate, stderr, k)
    logger.info(
        "Entropy oracle",
        extra={"j": j, "L": L, "exact": exact, "estimate": estimate, "passed": passed},
    )
    return OracleRow(j, L, exact, estimate, stderr, passed)
