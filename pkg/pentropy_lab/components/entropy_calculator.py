"""
Entropy calculator for partitions, joins over progressions and P-entropy
profiles.

Entropies are in nats. Interval exchanges go through the exact join engine,
Bernoulli shifts through the analytic coordinate count, and either can be
cross-checked by the Monte Carlo oracle.
"""

import math
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..models.entropy import (
    EntropyMethod,
    EntropyProfile,
    EntropyRow,
    ProgressionSchedule,
    RowError,
)
from ..models.partition import CylinderPartition, IntervalPartition
from ..models.sampling import SampleConfig
from ..models.systems import IntervalExchange, SymbolicShift
from ..utils.error_handling import (
    ErrorSeverity,
    LabError,
    ValidationError,
    category_for,
    get_error_tracker,
)
from ..utils.logging import get_logger
from . import bernoulli
from .refiner import DEFAULT_SIZE_CAP, join_over_progression

logger = get_logger("entropy")

SUM_TOLERANCE = 1e-9

EntropySystem = Union[IntervalExchange, SymbolicShift]
EntropyPartition = Union[IntervalPartition, CylinderPartition]


def shannon_entropy(measures: Iterable[float]) -> float:
    """-sum mu_i ln mu_i with 0 ln 0 = 0."""
    values = np.asarray([float(v) for v in measures], dtype=float)
    errors = []
    if values.size == 0:
        errors.append("Entropy needs at least one measure")
    if np.any(values < 0):
        errors.append("Measures must be nonnegative")
    if values.size and abs(values.sum() - 1.0) > SUM_TOLERANCE:
        errors.append(f"Measures sum to {values.sum()!r}, not 1")
    if errors:
        raise ValidationError(errors)
    positive = values[values > 0]
    return float(-np.sum(positive * np.log(positive)))


def partition_entropy(system: EntropySystem, xi: EntropyPartition) -> float:
    """H(xi) for an interval partition or the depth-k cylinder partition."""
    if isinstance(xi, CylinderPartition):
        if not isinstance(system, SymbolicShift):
            raise ValidationError(["Cylinder partitions apply to Bernoulli shifts only"])
        return xi.depth * bernoulli.symbol_entropy(system)
    return shannon_entropy(xi.cell_measures)


def join_entropy(
    system: EntropySystem,
    xi: EntropyPartition,
    j: int,
    L: int,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> Tuple[float, EntropyMethod]:
    """H of the join over P_j = {j, 2j, ..., Lj} and how it was obtained."""
    if j < 1 or L < 1:
        raise ValidationError([f"j and L must be at least 1 (j={j}, L={L})"])
    if isinstance(system, SymbolicShift):
        if not isinstance(xi, CylinderPartition):
            raise ValidationError(
                ["Bernoulli shifts use cylinder partitions ({\"cylinder\": k})"]
            )
        return bernoulli.join_entropy(system, j, L, xi.depth), EntropyMethod.ANALYTIC
    if isinstance(xi, CylinderPartition):
        raise ValidationError(["Cylinder partitions apply to Bernoulli shifts only"])
    decomposition = join_over_progression(system, xi, j, L, size_cap=size_cap)
    return shannon_entropy(decomposition.group_measures), EntropyMethod.EXACT


def h_j(
    system: EntropySystem,
    xi: EntropyPartition,
    j: int,
    L: int,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> float:
    """Normalized join entropy H(join over P_j) / |P_j|."""
    H, _ = join_entropy(system, xi, j, L, size_cap)
    return H / L


def bernoulli_sharpness(
    shift: SymbolicShift, j: int, L: int, n: int, depth: int = 1
) -> Tuple[float, bool]:
    """
    h_j of the generating partition and whether h_j > H(xi) - 1/n holds;
    for Bernoulli shifts this holds with equality h_j = H(xi).
    """
    xi = CylinderPartition(depth)
    value = h_j(shift, xi, j, L)
    return value, value > partition_entropy(shift, xi) - 1.0 / n


def _monte_carlo_row(
    system: EntropySystem,
    xi: EntropyPartition,
    j: int,
    L: int,
    sampling: SampleConfig,
) -> EntropyRow:
    from .mc_oracle import mc_join_histogram

    histogram = mc_join_histogram(system, xi, j, L, sampling)
    H, stderr = mc_entropy_estimate(histogram.counts, histogram.N)
    return EntropyRow(j, L, H, H / L, EntropyMethod.MONTECARLO, stderr)


def profile_row(
    system: EntropySystem,
    xi: EntropyPartition,
    j: int,
    L: int,
    method: Optional[EntropyMethod] = None,
    sampling: Optional[SampleConfig] = None,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> EntropyRow:
    """One profile row; ``method=None`` picks exact or analytic by system type."""
    if method is EntropyMethod.MONTECARLO:
        if sampling is None:
            raise ValidationError(["Monte Carlo rows need a sample configuration"])
        return _monte_carlo_row(system, xi, j, L, sampling)
    H, used = join_entropy(system, xi, j, L, size_cap)
    if method is not None and method is not used:
        raise ValidationError(
            [f"Method {method.value} is not available for {type(system).__name__}"]
        )
    return EntropyRow(j, L, H, H / L, used, None)


def p_entropy_profile(
    system: EntropySystem,
    xi: EntropyPartition,
    schedule: ProgressionSchedule,
    j_set: Sequence[int],
    method: Optional[EntropyMethod] = None,
    sampling: Optional[SampleConfig] = None,
    size_cap: int = DEFAULT_SIZE_CAP,
    description: Optional[str] = None,
) -> EntropyProfile:
    """
    Rows of (j, L(j), H_join, h_j) for each j. A failing row is recorded in
    ``errors`` and the others are still computed.
    """
    if not j_set:
        raise ValidationError(["j_set must not be empty"])

    profile = EntropyProfile(
        system=description or getattr(system, "describe", lambda: str(system))(),
        partition=xi.describe(),
        partition_entropy=partition_entropy(system, xi),
    )
    for j in j_set:
        row_sampling = sampling.for_task(j) if sampling is not None else None
        try:
            row = profile_row(
                system, xi, j, schedule.length(j), method, row_sampling, size_cap
            )
        except (LabError, ValueError, KeyError) as e:
            code = getattr(e, "code", "validation")
            get_error_tracker().record_error(
                component="entropy",
                category=category_for(e),
                severity=ErrorSeverity.MEDIUM,
                message=f"Profile row j={j} failed: {e}",
                exception=e,
                context={"j": j},
            )
            profile.errors.append(RowError(j, code, str(e)))
            continue
        profile.rows.append(row)

    logger.info(
        "Profile computed",
        extra={"rows": len(profile.rows), "errors": len(profile.errors)},
    )
    return profile


def count_bound(L: int, cells: int, d: int) -> float:
    """ln(L (c + d - 2) + 1) / L, the elementary-count bound on h_j."""
    return math.log(L * (cells + d - 2) + 1) / L


def mc_entropy_estimate(
    counts: Union[Mapping[object, int], Sequence[int], np.ndarray], N: Optional[int] = None
) -> Tuple[float, float]:
    """
    Plug-in entropy of a histogram with the Miller-Madow correction
    (K - 1) / (2N), K the number of observed tuples, and its standard error:
    the delta-method variance plus the chi-square term (K - 1) / (2 N^2),
    which dominates when the distribution is close to uniform.
    """
    if isinstance(counts, Mapping):
        counts = list(counts.values())
    counts = np.asarray(counts, dtype=float)
    counts = counts[counts > 0]
    total = float(counts.sum())
    N = int(total) if N is None else int(N)
    if N < 1:
        raise ValidationError(["Sample count must be at least 1"])
    K = len(counts)
    p = counts / N
    logs = np.log(p)
    plug_in = float(-np.sum(p * logs))
    second = float(np.sum(p * logs**2))
    variance = max(second - plug_in**2, 0.0) / N + (K - 1) / (2.0 * N * N)
    return plug_in + (K - 1) / (2 * N), math.sqrt(variance)
