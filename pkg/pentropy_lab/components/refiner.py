"""
Partition refinement: pullbacks, joins over progressions and interval-set
arithmetic under interval exchanges.
"""

import math
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

import numpy as np

from ..models.partition import IntervalPartition, LabeledDecomposition
from ..models.systems import IntervalExchange, MeasurableSet
from ..utils.arithmetic import (
    EXTENDED,
    Scalar,
    as_array,
    merge_sorted,
    tolerance_for,
)
from ..utils.error_handling import LabError, SizeCapError
from ..utils.logging import get_logger
from .iet_engine import apply_many, discontinuities, invert, power, warn_degenerate

logger = get_logger("refine")

DEFAULT_SIZE_CAP = 10**7


def _mode(T: IntervalExchange, xi: IntervalPartition) -> bool:
    return T.exact and xi.exact


def pullback(T: IntervalExchange, xi: IntervalPartition) -> IntervalPartition:
    """T^{-1} xi as an interval partition."""
    exact = _mode(T, xi)
    interior = xi.breakpoint_array(exact)[1:]
    pulled = apply_many(invert(T), interior)
    zero = as_array([0], exact)
    points, merged = merge_sorted(
        np.concatenate([zero, pulled, as_array(discontinuities(T), exact)]),
        tolerance_for(exact),
    )
    warn_degenerate(merged, "pullback")
    return IntervalPartition(tuple(points))


def elementary_breakpoints(
    R: IntervalExchange,
    xi: IntervalPartition,
    L: int,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> np.ndarray:
    """
    Left endpoints of the elementary intervals of R^{-1} xi v ... v R^{-L} xi,
    from B_1 = R^{-1}(B_xi) u disc(R) and B_L = R^{-1}(B_xi u B_{L-1}) u disc(R).
    """
    exact = _mode(R, xi)
    tol = tolerance_for(exact)
    inverse = invert(R)
    xi_interior = xi.breakpoint_array(exact)[1:]
    disc = as_array(discontinuities(R), exact)
    current = xi_interior[:0]
    merged_total = 0

    for step in range(1, L + 1):
        # exact repeats in the union are harmless; near-repeats are degenerate
        union, near = merge_sorted(np.unique(np.concatenate([xi_interior, current])), tol)
        pulled = apply_many(inverse, union)
        current, merged = merge_sorted(np.concatenate([pulled, disc]), tol)
        # 0 is implicit
        if len(current) and current[0] <= tol:
            current = current[1:]
            merged += 1
        merged_total += near + merged
        if len(current) + 1 > size_cap:
            raise SizeCapError(
                f"Join needs more than {size_cap} elementary intervals at L={step}",
                {"size_cap": size_cap, "L": step, "count": len(current) + 1},
            )

    warn_degenerate(merged_total, "join_over_progression")
    return np.concatenate([as_array([0], exact), current])


def _interval_geometry(
    breakpoints: np.ndarray, exact: bool
) -> Tuple[np.ndarray, np.ndarray]:
    one = Fraction(1) if exact else EXTENDED(1)
    ends = np.append(breakpoints[1:], np.array([one], dtype=breakpoints.dtype))
    return ends - breakpoints, (breakpoints + ends) / 2


def label_columns(
    R: IntervalExchange, xi: IntervalPartition, points: np.ndarray, L: int, exact: bool
) -> Iterator[np.ndarray]:
    """xi-cell index of R^m(point) for m = 1..L."""
    x = points
    for _ in range(L):
        x = apply_many(R, x)
        yield xi.cell_index_many(x, exact).astype(np.int32)


class _Grouping:
    """Incremental grouping of intervals by label prefix."""

    def __init__(self, count: int, cells: int, lengths: np.ndarray):
        self.group = np.zeros(count, dtype=np.int64)
        self.cells = cells
        self.weights = lengths

    def add(self, column: np.ndarray) -> np.ndarray:
        keys = self.group * self.cells + column
        _, inverse = np.unique(keys, return_inverse=True)
        self.group = inverse.ravel().astype(np.int64)
        return np.bincount(self.group, weights=self.weights)


def shannon_from_measures(measures: np.ndarray) -> float:
    positive = measures[measures > 0]
    return float(-np.sum(positive * np.log(positive)))


def join_over_progression(
    T: IntervalExchange,
    xi: IntervalPartition,
    j: int,
    L: int,
    size_cap: int = DEFAULT_SIZE_CAP,
    verify: bool = True,
    rng: Optional[np.random.Generator] = None,
) -> LabeledDecomposition:
    """
    Exact decomposition of R^{-1} xi v ... v R^{-L} xi with R = T^j.
    """
    if j < 1 or L < 1:
        raise ValueError("Progression step and length must be at least 1")
    R = power(T, j)
    exact = _mode(R, xi)
    breakpoints = elementary_breakpoints(R, xi, L, size_cap)
    lengths, mids = _interval_geometry(breakpoints, exact)
    weights = np.asarray(lengths, dtype=float)

    grouping = _Grouping(len(breakpoints), xi.cell_count, weights)
    labels = np.empty((len(breakpoints), L), dtype=np.int32)
    measures = np.ones(1)
    for m, column in enumerate(label_columns(R, xi, mids, L, exact)):
        labels[:, m] = column
        measures = grouping.add(column)

    decomposition = LabeledDecomposition(
        elementary_breakpoints=breakpoints,
        elementary_lengths=lengths,
        labels=labels,
        group_index=grouping.group,
        group_measures=measures,
        exact=exact,
    )
    decomposition.validate()

    if verify:
        failures = verify_label_constancy(decomposition, R, xi, rng)
        if failures:
            raise LabError(
                f"Label tuples vary inside {len(failures)} sampled elementary interval(s)",
                {"intervals": failures[:10]},
            )

    logger.debug(
        "Join computed",
        extra={
            "j": j,
            "L": L,
            "elementary": decomposition.elementary_count,
            "groups": decomposition.group_count,
        },
    )
    return decomposition


def join_entropy_prefixes(
    T: IntervalExchange,
    xi: IntervalPartition,
    j: int,
    L_max: int,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> np.ndarray:
    """
    Join entropy for every prefix length L = 1..L_max from one pass; entry
    L - 1 is H(R^{-1} xi v ... v R^{-L} xi).
    """
    R = power(T, j)
    exact = _mode(R, xi)
    breakpoints = elementary_breakpoints(R, xi, L_max, size_cap)
    lengths, mids = _interval_geometry(breakpoints, exact)
    grouping = _Grouping(len(breakpoints), xi.cell_count, np.asarray(lengths, dtype=float))
    out = np.empty(L_max)
    for m, column in enumerate(label_columns(R, xi, mids, L_max, exact)):
        out[m] = shannon_from_measures(grouping.add(column))
    return out


def verify_label_constancy(
    decomposition: LabeledDecomposition,
    R: IntervalExchange,
    xi: IntervalPartition,
    rng: Optional[np.random.Generator] = None,
    fraction: float = 0.01,
    points_per_interval: int = 3,
) -> List[int]:
    """
    Recompute labels at random interior points of a random sample of
    elementary intervals; returns the indices whose labels disagree.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    count = decomposition.elementary_count
    sample_size = min(count, max(1, math.ceil(fraction * count)))
    chosen = np.sort(rng.choice(count, size=sample_size, replace=False))
    exact = decomposition.exact

    starts = decomposition.elementary_breakpoints[chosen]
    widths = decomposition.elementary_lengths[chosen]
    failures: List[int] = []
    L = decomposition.factor_count
    for _ in range(points_per_interval):
        u = rng.uniform(0.05, 0.95, size=sample_size)
        if exact:
            u = np.array([Fraction(float(v)) for v in u], dtype=object)
        else:
            u = u.astype(EXTENDED)
        points = starts + widths * u
        for m, column in enumerate(label_columns(R, xi, points, L, exact)):
            bad = np.flatnonzero(column != decomposition.labels[chosen, m])
            failures.extend(int(chosen[b]) for b in bad)
    return sorted(set(failures))


def measure(A: MeasurableSet) -> Scalar:
    return A.measure


def _common_mode(*sets: MeasurableSet) -> Tuple[MeasurableSet, ...]:
    exact = all(s.exact for s in sets)
    return tuple(s.in_mode(exact) for s in sets)


def set_intersection(A: MeasurableSet, B: MeasurableSet) -> MeasurableSet:
    A, B = _common_mode(A, B)
    out: List[Tuple[Scalar, Scalar]] = []
    i = k = 0
    while i < len(A.intervals) and k < len(B.intervals):
        a0, a1 = A.intervals[i]
        b0, b1 = B.intervals[k]
        lo, hi = max(a0, b0), min(a1, b1)
        if lo < hi:
            out.append((lo, hi))
        if a1 <= b1:
            i += 1
        else:
            k += 1
    return MeasurableSet(tuple(out)) if out else MeasurableSet.empty()


def set_union(A: MeasurableSet, B: MeasurableSet) -> MeasurableSet:
    A, B = _common_mode(A, B)
    tol = tolerance_for(A.exact and B.exact)
    return MeasurableSet.from_intervals(A.intervals + B.intervals, tol)


def image_under(S: IntervalExchange, A: MeasurableSet) -> MeasurableSet:
    """S(A): each interval is cut at the domain breakpoints of S and translated."""
    exact = S.exact and A.exact
    if not exact:
        A = A.in_mode(False)
    starts = S.start_array if exact else as_array(S.starts, False)
    offsets = S.offset_array if exact else as_array(S.offsets, False)
    zero = Fraction(0) if exact else EXTENDED(0)
    one = Fraction(1) if exact else EXTENDED(1)
    pieces: List[Tuple[Scalar, Scalar]] = []
    for a, b in A.intervals:
        first = int(np.searchsorted(starts, a, side="right")) - 1
        last = int(np.searchsorted(starts, b, side="left")) - 1
        for k in range(first, last + 1):
            lo = max(a, starts[k])
            hi = min(b, starts[k + 1]) if k + 1 < len(starts) else b
            if lo < hi:
                pieces.append(
                    (max(lo + offsets[k], zero), min(hi + offsets[k], one))
                )
    return MeasurableSet.from_intervals(pieces, tolerance_for(exact))


def set_image(T: IntervalExchange, A: MeasurableSet, m: int = 1) -> MeasurableSet:
    """T^m(A) for any integer m."""
    if m == 0:
        return A
    return image_under(power(T, m), A)


def set_preimage(T: IntervalExchange, A: MeasurableSet) -> MeasurableSet:
    """T^{-1}(A)."""
    return image_under(invert(T), A)


def contains_many(A: MeasurableSet, points: np.ndarray) -> np.ndarray:
    """Membership mask of points in A."""
    if not A.intervals:
        return np.zeros(len(points), dtype=bool)
    exact = A.exact and points.dtype == object
    starts = as_array([a for a, _ in A.intervals], exact)
    ends = as_array([b for _, b in A.intervals], exact)
    k = np.searchsorted(starts, points, side="right") - 1
    k_safe = np.clip(k, 0, len(starts) - 1)
    return np.asarray((k >= 0) & np.asarray(points < ends[k_safe], dtype=bool), dtype=bool)
