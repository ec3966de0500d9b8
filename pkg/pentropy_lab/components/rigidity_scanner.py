"""
Partial-rigidity scanner.

N(S, j) is the least m in (j, m_cap] with mu(S^m B_i & B_i) > c mu(B_i)
for every i <= j. Scans over several j share one table of return
correlations, built by pushing each test set forward one step at a time.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import mpmath
import numpy as np

from ..models.limits import RigidityReport
from ..models.systems import IntervalExchange, MeasurableSet, RankOneRecipe, SymbolicShift, Tower
from ..utils.arithmetic import EXTENDED, Scalar
from ..utils.error_handling import ValidationError
from ..utils.logging import get_logger
from . import bernoulli, rank_one
from .correlation_engine import System, TestSet, set_measure
from .refiner import image_under, set_intersection

logger = get_logger("limits.rigidity")


def _describe_set(A: TestSet) -> str:
    if isinstance(A, MeasurableSet):
        return A.describe()
    return f"cylinder({''.join(map(str, A.word))}@{A.position})"


def return_correlations(system: System, test_sets: Sequence[TestSet], m_cap: int) -> np.ndarray:
    """
    Array of shape (m_cap + 1, len(test_sets)) holding mu(S^m B_i & B_i).
    """
    table = np.zeros((m_cap + 1, len(test_sets)))
    for i, B in enumerate(test_sets):
        table[0, i] = set_measure(system, B)
        if isinstance(system, SymbolicShift):
            for m in range(1, m_cap + 1):
                table[m, i] = bernoulli.shift_correlation(system, B, B, m)
        elif isinstance(system, Tower):
            for m in range(1, m_cap + 1):
                moved = rank_one.push_forward(system, B, m)
                table[m, i] = float(set_intersection(moved, B).measure)
        else:
            moved = B
            for m in range(1, m_cap + 1):
                moved = image_under(system, moved)
                table[m, i] = float(set_intersection(moved, B).measure)
    return table


def _check(test_sets: Sequence[TestSet], c: float, j: int, m_cap: int) -> None:
    errors = []
    if not 0 < c < 1:
        errors.append(f"Rigidity constant c must lie in (0, 1), got {c!r}")
    if j < 1:
        errors.append(f"j must be at least 1, got {j}")
    if len(test_sets) < j:
        errors.append(f"Need at least j={j} test sets, got {len(test_sets)}")
    if m_cap <= j:
        errors.append(f"m_cap must exceed j (m_cap={m_cap}, j={j})")
    if errors:
        raise ValidationError(errors)


def _report_from_table(
    table: np.ndarray,
    test_sets: Sequence[TestSet],
    c: float,
    j: int,
    m_cap: int,
    return_times: Optional[Sequence[int]] = None,
) -> RigidityReport:
    measures = table[0, :j]
    passing = np.all(table[j + 1 :, :j] > c * measures, axis=1)
    hits = np.flatnonzero(passing)
    labels = [_describe_set(B) for B in test_sets[:j]]
    if hits.size == 0:
        logger.warning(
            "Rigidity scan exhausted m_cap",
            extra={"j": j, "m_cap": m_cap, "c": c},
        )
        return RigidityReport(
            j=j,
            N=None,
            witness_m=None,
            c=c,
            test_sets=labels,
            m_cap=m_cap,
            diagnostic=f"no m in ({j}, {m_cap}] satisfies the rigidity inequality",
        )
    m = j + 1 + int(hits[0])
    report = RigidityReport(
        j=j,
        N=m,
        witness_m=m,
        c=c,
        test_sets=labels,
        m_cap=m_cap,
        correlations=[float(v) for v in table[m, :j]],
        return_time=(m in return_times) if return_times is not None else None,
    )
    report.validate()
    return report


def rigidity_scan(
    system: System,
    test_sets: Sequence[TestSet],
    c: float,
    j: int,
    m_cap: int,
) -> RigidityReport:
    """Least m in (j, m_cap] passing the rigidity test for B_1..B_j."""
    return rigidity_profile(system, test_sets, c, [j], m_cap)[0]


def rigidity_profile(
    system: System,
    test_sets: Sequence[TestSet],
    c: float,
    j_values: Sequence[int],
    m_cap: int,
) -> List[RigidityReport]:
    """One report per j from a shared correlation table."""
    if not j_values:
        raise ValidationError(["Rigidity scan needs at least one j"])
    for j in j_values:
        _check(test_sets, c, j, m_cap)
    j_max = max(j_values)
    table = return_correlations(system, test_sets[:j_max], m_cap)
    alpha = rotation_number(system)
    return_times = None
    if alpha is not None:
        return_times = [q for q in convergent_denominators(alpha, 64) if q <= m_cap]
    reports = [
        _report_from_table(table, test_sets, c, j, m_cap, return_times) for j in j_values
    ]
    logger.info(
        "Rigidity profile computed",
        extra={"j_values": list(j_values), "m_cap": m_cap, "N": [r.N for r in reports]},
    )
    return reports


def rotation_number(system: System) -> Optional[Scalar]:
    """alpha when the system is the rotation x -> x + alpha, else None."""
    if isinstance(system, IntervalExchange) and system.d == 2 and system.permutation == (2, 1):
        return system.lengths[1]
    return None


def convergent_denominators(alpha, count: int = 32) -> List[int]:
    """
    Denominators q_0, q_1, ... of the continued-fraction convergents of
    alpha. Rationals expand exactly and stop at their own denominator;
    extended values expand in mpmath at 50 digits.
    """
    if isinstance(alpha, (Fraction, int)):
        x = Fraction(alpha) % 1
    else:
        with mpmath.workdps(50):
            x = mpmath.mpf(np.format_float_positional(EXTENDED(alpha), unique=True))
            x = x - mpmath.floor(x)
    denominators = [1]
    previous = 0
    with mpmath.workdps(50):
        for _ in range(count - 1):
            if x == 0:
                break
            x = 1 / x
            a = int(math.floor(x)) if isinstance(x, Fraction) else int(mpmath.floor(x))
            x = x - a
            denominators.append(a * denominators[-1] + previous)
            previous = denominators[-2]
    return denominators


@dataclass(frozen=True)
class TowerRigidityRow:
    """mu(T^{h_n} A & A) for A the lower half of the stage-n levels."""

    n: int
    height: int
    measure: float
    correlation: float

    @property
    def ratio(self) -> float:
        return self.correlation / self.measure if self.measure else 0.0


def tower_rigidity(recipe: RankOneRecipe, stages: Sequence[int]) -> List[TowerRigidityRow]:
    """Return correlations at the tower heights, evaluated on the final tower."""
    final = rank_one.final_tower(recipe)
    rows = []
    for n in stages:
        tower = rank_one.build_tower(recipe, n)
        A = rank_one.lower_half(tower)
        moved = rank_one.push_forward(final, A, tower.height)
        rows.append(
            TowerRigidityRow(
                n=n,
                height=tower.height,
                measure=float(A.measure),
                correlation=float(set_intersection(moved, A).measure),
            )
        )
    return rows
