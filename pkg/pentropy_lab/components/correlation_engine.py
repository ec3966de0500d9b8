"""
Correlation engine: mu(T^m A & B), triple correlations, asymmetry
fingerprints and distances from the constant projection Theta.

Interval exchanges and rank-one towers use exact interval-set arithmetic,
Bernoulli shifts use coordinate counting on cylinders.
"""

from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from ..models.limits import FingerprintRow, ThetaRow
from ..models.systems import (
    Cylinder,
    IntervalExchange,
    MeasurableSet,
    SymbolicShift,
    Tower,
)
from ..utils.arithmetic import MEASURE_TOLERANCE
from ..utils.error_handling import ValidationError
from ..utils.logging import get_logger
from . import bernoulli, rank_one
from .refiner import set_image, set_intersection

logger = get_logger("limits")

System = Union[IntervalExchange, SymbolicShift, Tower]
TestSet = Union[MeasurableSet, Cylinder]
TestPair = Tuple[TestSet, TestSet]


def set_measure(system: System, A: TestSet) -> float:
    if isinstance(system, SymbolicShift):
        return bernoulli.cylinder_measure(system, _cylinder(A))
    return float(_interval_set(A).measure)


def _cylinder(A: TestSet) -> Cylinder:
    if not isinstance(A, Cylinder):
        raise ValidationError(["Bernoulli shifts take cylinder test sets"])
    return A


def _interval_set(A: TestSet) -> MeasurableSet:
    if not isinstance(A, MeasurableSet):
        raise ValidationError(["Interval systems take interval test sets"])
    return A


def transport(system: System, A: MeasurableSet, m: int) -> MeasurableSet:
    """T^m A for an interval exchange or a rank-one tower."""
    if isinstance(system, Tower):
        return rank_one.push_forward(system, A, m)
    return set_image(system, A, m)


def correlation(system: System, A: TestSet, B: TestSet, m: int) -> float:
    """mu(T^m A & B)."""
    if isinstance(system, SymbolicShift):
        return bernoulli.shift_correlation(system, _cylinder(A), _cylinder(B), m)
    moved = transport(system, _interval_set(A), m)
    return float(set_intersection(moved, _interval_set(B)).measure)


def triple_correlation(system: System, A: TestSet, m: int, n: int) -> float:
    """mu(A & T^m A & T^n A)."""
    if isinstance(system, SymbolicShift):
        return bernoulli.shift_triple_correlation(system, _cylinder(A), m, n)
    A = _interval_set(A)
    both = set_intersection(A, transport(system, A, m))
    return float(set_intersection(both, transport(system, A, n)).measure)


def fingerprint_targets(mu: float) -> Tuple[float, float]:
    """((mu + 2 mu^3) / 3, mu^2): forward and backward limit values."""
    return (mu + 2 * mu**3) / 3, mu**2


def _discriminating(mu) -> bool:
    if isinstance(mu, Fraction):
        return mu != Fraction(1, 2)
    return abs(float(mu) - 0.5) > MEASURE_TOLERANCE


def asymmetry_fingerprint(
    system: System, A: TestSet, times: Sequence[Tuple[int, int]]
) -> List[FingerprintRow]:
    """
    Forward triple correlations at (m, n), backward ones at (-m, -n), and
    both targets. At mu(A) = 1/2 the targets coincide and rows are marked
    non-discriminating.
    """
    if isinstance(system, SymbolicShift):
        mu_exact = None
        mu = set_measure(system, A)
    else:
        mu_exact = _interval_set(A).measure
        mu = float(mu_exact)
    if mu <= MEASURE_TOLERANCE or mu >= 1 - MEASURE_TOLERANCE:
        raise ValidationError([f"Fingerprint set must have measure in (0, 1), got {mu!r}"])

    forward_target, backward_target = fingerprint_targets(mu)
    discriminating = _discriminating(mu_exact if mu_exact is not None else mu)
    rows = []
    for m, n in times:
        rows.append(
            FingerprintRow(
                m=m,
                n=n,
                measure=mu,
                forward=triple_correlation(system, A, m, n),
                backward=triple_correlation(system, A, -m, -n),
                target_forward=forward_target,
                target_backward=backward_target,
                discriminating=discriminating,
            )
        )
    if not discriminating:
        logger.warning(
            "Fingerprint targets coincide at mu(A) = 1/2",
            extra={"measure": mu},
        )
    return rows


def fingerprint_family(
    system: System, sets: Sequence[TestSet], times: Sequence[Tuple[int, int]]
) -> List[FingerprintRow]:
    """Fingerprints over several sets; at least one must have mu(A) != 1/2."""
    rows: List[FingerprintRow] = []
    for A in sets:
        rows.extend(asymmetry_fingerprint(system, A, times))
    if rows and not any(row.discriminating for row in rows):
        raise ValidationError(
            ["At least one fingerprint set needs a measure other than 1/2"]
        )
    return rows


def theta_distance(system: System, m: int, test_pairs: Sequence[TestPair]) -> float:
    """max over pairs of |mu(T^m A & B) - mu(A) mu(B)|."""
    if not test_pairs:
        raise ValidationError(["theta_distance needs at least one test pair"])
    return max(
        abs(correlation(system, A, B, m) - set_measure(system, A) * set_measure(system, B))
        for A, B in test_pairs
    )


def theta_scan(
    system: System, m_range: Iterable[int], test_pairs: Sequence[TestPair]
) -> List[ThetaRow]:
    return [ThetaRow(m, theta_distance(system, m, test_pairs)) for m in m_range]


def separation_holds(rows: Sequence[ThetaRow], r: float, n: int) -> bool:
    """Some scanned m > n has distance from Theta above r."""
    return any(row.m > n and row.theta_distance > r for row in rows)


def correlation_table(
    system: System, pairs: Sequence[TestPair], times: Iterable[int]
) -> Dict[int, List[float]]:
    """Correlations of every pair at every time."""
    return {m: [correlation(system, A, B, m) for A, B in pairs] for m in times}


def default_test_sets(max_depth: int = 5) -> List[MeasurableSet]:
    """Dyadic intervals of depth 1..max_depth, then [0, 1/3)."""
    sets = [
        MeasurableSet.interval(Fraction(k, 2**depth), Fraction(k + 1, 2**depth))
        for depth in range(1, max_depth + 1)
        for k in range(2**depth)
    ]
    sets.append(MeasurableSet.interval(Fraction(0), Fraction(1, 3)))
    return sets


def default_test_pairs(max_depth: int = 2) -> List[TestPair]:
    """All ordered pairs of dyadic intervals up to max_depth plus ([0,1/3), [0,1/3))."""
    dyadic = default_test_sets(max_depth)[:-1]
    third = MeasurableSet.interval(Fraction(0), Fraction(1, 3))
    return [(A, B) for A in dyadic for B in dyadic] + [(third, third)]


def default_cylinder_sets(max_length: int = 2) -> List[Cylinder]:
    """All binary words of length 1..max_length at coordinate 0."""
    out = []
    for length in range(1, max_length + 1):
        for code in range(2**length):
            word = tuple((code >> (length - 1 - t)) & 1 for t in range(length))
            out.append(Cylinder(word))
    return out
